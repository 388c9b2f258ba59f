#include "cmservo/controller.hpp"

#include <cmath>

namespace cmservo {

namespace {

Vec broadcast_gains(const Vec& gains, int target_dim, int group, const char* what) {
  if (gains.size() == target_dim) return gains;
  if (gains.size() == 1) return Vec::Constant(target_dim, gains(0));
  if (group > 1 && gains.size() == group && target_dim % group == 0) {
    Vec out(target_dim);
    for (int i = 0; i < target_dim / group; ++i) out.segment(i * group, group) = gains;
    return out;
  }
  throw std::invalid_argument(std::string(what) + ": gain vector size does not match channels");
}

}  // namespace

void ControllerConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("ControllerConfig: beta must lie in [0, 1]");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("ControllerConfig: epsilon must be > 0");
  if (max_steps < 0) throw std::invalid_argument("ControllerConfig: max_steps must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("ControllerConfig: dt must be > 0");
  if (lambda_theta.size() < 1 || lambda_features.size() < 1) {
    throw std::invalid_argument("ControllerConfig: filter gains missing");
  }
  if (j_init.rows() != gamma_d.dim()) {
    throw std::invalid_argument("ControllerConfig: j_init rows must match gamma_d dimension");
  }
  if (j_init.cols() != constraints.dim()) {
    throw std::invalid_argument("ControllerConfig: j_init cols must match constraint dimension");
  }
  if (ffv.objective_dim() != gamma_d.dim()) {
    throw std::invalid_argument("ControllerConfig: gamma_d dimension must match the FFV");
  }
}

Controller::Controller(ControllerConfig cfg, PlantFeedback& plant)
    : cfg_(std::move(cfg)),
      plant_(plant),
      n_(plant.actuation_dim()),
      estimate_(init_jacobian(cfg_.j_init.cols(), cfg_.j_init.rows(), JacobianInitMode::kOnes)),
      theta_filter_(Vec::Ones(1), 1.0),
      feature_filter_(Vec::Ones(1), 1.0),
      theta_commanded_(Vec::Zero(plant.actuation_dim())) {
  cfg_.validate();
  if (cfg_.j_init.cols() != n_) {
    throw std::invalid_argument("Controller: j_init cols must match the plant actuation dim");
  }
  estimate_ = JacobianEstimate(cfg_.j_init.matrix(), cfg_.beta);

  const FeaturePointSet first = plant_.observe();
  cfg_.ffv.check_point_count(first.point_count());
  const int feature_dim = static_cast<int>(first.flat().size());

  theta_filter_ = LowPassFilter(
      broadcast_gains(cfg_.lambda_theta, n_, 0, "lambda_theta"), cfg_.dt);
  feature_filter_ = LowPassFilter(
      broadcast_gains(cfg_.lambda_features, feature_dim, 2, "lambda_features"), cfg_.dt);

  theta_filtered_prev_ = theta_filter_.apply(theta_commanded_);
  const Vec features_filtered = feature_filter_.apply(first.flat());
  gamma_filtered_prev_ =
      eval_ffv(cfg_.ffv, FeaturePointSet(features_filtered)).values();
  termination_error_ = compute_termination_error(gamma_filtered_prev_);

  records_.push_back(make_record(0, first, Vec::Zero(n_), false, false, 0.0));
}

double Controller::compute_termination_error(const Vec& gamma_filtered) const {
  if (cfg_.ffv.kind() == FfvKind::Kind::kCurvature) {
    // Shape control thresholds on the radius error in pixels; the raw
    // objective is a curvature (px^-1) and would make epsilon unit-less.
    const double kappa = std::max(std::abs(gamma_filtered(0)), 1e-12);
    const double kappa_d = std::max(std::abs(cfg_.gamma_d.values()(0)), 1e-12);
    return std::abs(1.0 / kappa - 1.0 / kappa_d);
  }
  return (gamma_filtered - cfg_.gamma_d.values()).norm();
}

double Controller::compute_ede(const FeaturePointSet& raw, const Vec& gamma_filtered) const {
  if (cfg_.ffv.kind() == FfvKind::Kind::kCurvature) {
    return compute_termination_error(gamma_filtered);
  }
  // Distance of the last selected point (the tip when tracked) to its target.
  const int last = cfg_.ffv.indices().back();
  const Eigen::Vector2d current = raw.point(last);
  const int offset = 2 * (static_cast<int>(cfg_.ffv.indices().size()) - 1);
  const Eigen::Vector2d desired(cfg_.gamma_d.values()(offset),
                                cfg_.gamma_d.values()(offset + 1));
  return ede(current, desired);
}

StepRecord Controller::make_record(int step, const FeaturePointSet& raw, const Vec& delta,
                                   bool solver_failed, bool update_applied,
                                   double secant_post) {
  StepRecord rec;
  rec.step = step;
  rec.theta = theta_commanded_;
  rec.features_flat = raw.flat();
  rec.gamma = gamma_filtered_prev_;
  rec.delta_theta = delta;
  rec.ede = compute_ede(raw, gamma_filtered_prev_);
  rec.ymm = ymm(estimate_);
  rec.converged = termination_error_ <= cfg_.epsilon;
  rec.solver_failed = solver_failed;
  rec.update_applied = update_applied;
  rec.secant_residual_post = secant_post;
  return rec;
}

const StepRecord& Controller::step_once() {
  const Vec error = gamma_filtered_prev_ - cfg_.gamma_d.values();

  Vec delta = Vec::Zero(n_);
  bool solver_failed = false;
  try {
    const StepSolution sol = solve_step(estimate_, FeedbackFeatureVector(-error),
                                        cfg_.constraints, cfg_.solver_iteration_cap);
    delta = sol.delta_theta.values();
  } catch (const SolverFailure&) {
    solver_failed = true;  // command zero and keep going; the plant stays put
  }

  plant_.command(ActuationDelta(delta));

  FeaturePointSet raw = plant_.observe();
  theta_commanded_ += delta;
  const Vec theta_filtered = theta_filter_.apply(theta_commanded_);

  Vec gamma_filtered;
  try {
    const Vec features_filtered = feature_filter_.apply(raw.flat());
    gamma_filtered = eval_ffv(cfg_.ffv, FeaturePointSet(features_filtered)).values();
  } catch (const std::exception& e) {
    ControlRunResult partial{records_, false, static_cast<int>(records_.size()) - 1,
                             termination_error_};
    throw ControlAbort(std::string("objective evaluation failed: ") + e.what(),
                       std::move(partial));
  }

  const Vec realized_delta = theta_filtered - theta_filtered_prev_;
  const Vec realized_gamma_change = gamma_filtered - gamma_filtered_prev_;

  bool update_applied = false;
  double secant_post = 0.0;
  const SecantPair pair{ActuationDelta(realized_delta), realized_gamma_change};
  if (realized_delta.norm() > kMinUpdateStepNorm) {
    if (auto updated = broyden_update(estimate_, pair)) {
      estimate_ = std::move(*updated);
      update_applied = true;
      secant_post = secant_residual(estimate_, pair);
    }
  }

  theta_filtered_prev_ = theta_filtered;
  gamma_filtered_prev_ = gamma_filtered;
  termination_error_ = compute_termination_error(gamma_filtered);

  records_.push_back(make_record(static_cast<int>(records_.size()), raw, delta,
                                 solver_failed, update_applied, secant_post));
  return records_.back();
}

ControlRunResult Controller::run() {
  int commands = 0;
  while (termination_error_ > cfg_.epsilon && commands < cfg_.max_steps) {
    step_once();
    ++commands;
  }
  return ControlRunResult{records_, termination_error_ <= cfg_.epsilon, commands,
                          termination_error_};
}

ControlRunResult run_control_loop(const ControllerConfig& cfg, PlantFeedback& plant) {
  Controller controller(cfg, plant);
  return controller.run();
}

}  // namespace cmservo
