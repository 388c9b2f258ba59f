#pragma once

#include "cmservo/core.hpp"
#include "cmservo/estimator.hpp"
#include "cmservo/ffv.hpp"
#include "cmservo/metrics.hpp"
#include "cmservo/signal.hpp"
#include "cmservo/stepsolver.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cmservo {

/// Everything the controller may know about the plant: command an increment,
/// observe tracked image points. No model information crosses this boundary.
class PlantFeedback {
 public:
  virtual ~PlantFeedback() = default;
  virtual void command(const ActuationDelta& delta) = 0;
  virtual FeaturePointSet observe() = 0;
  virtual int actuation_dim() const = 0;
};

struct ControllerConfig {
  double beta = 0.7;
  double epsilon = 1.0;  // termination threshold, objective units (px)
  int max_steps = 1000;
  double dt = 1.0 / 15.0;
  Vec lambda_theta;     // size n, or size 1 to broadcast
  Vec lambda_features;  // size 2M, size 2 (per point), or size 1 to broadcast
  ConstraintSet constraints = ConstraintSet::default_bounds(3);
  JacobianEstimate j_init = init_jacobian(3, 2, JacobianInitMode::kOnes);
  FfvKind ffv = FfvKind::overlay({0});
  FeedbackFeatureVector gamma_d = FeedbackFeatureVector(Vec::Zero(2));
  int solver_iteration_cap = 0;  // 0 = automatic

  void validate() const;
};

struct ControlRunResult {
  std::vector<StepRecord> records;
  bool converged = false;
  int steps_commanded = 0;
  double final_error = 0.0;  // termination metric at the last record
};

/// Raised when the plant (or objective evaluation on its feedback) fails
/// irrecoverably mid-run; carries the log up to the failure.
struct ControlAbort : std::runtime_error {
  ControlAbort(const std::string& msg, ControlRunResult partial_result)
      : std::runtime_error(msg), partial(std::move(partial_result)) {}
  ControlRunResult partial;
};

/// One control loop bound to one plant. Each step solves for the increment
/// that cancels the filtered objective error, commands it, re-observes,
/// filters both signals, and feeds the realized (filtered) increment pair to
/// the rank-1 estimator; a solver failure commands zero and the loop goes on.
///
/// The estimator update uses the measured filtered changes rather than the
/// commanded step, so actuation imperfections (play, slack) fold into the
/// estimate instead of poisoning it.
class Controller {
 public:
  Controller(ControllerConfig cfg, PlantFeedback& plant);

  /// Executes one command/observe/update cycle and appends its record.
  const StepRecord& step_once();

  /// Runs until the termination error drops to epsilon or max_steps commands
  /// have been issued. Reaching max_steps is reported, not thrown.
  ControlRunResult run();

  double termination_error() const { return termination_error_; }
  const std::vector<StepRecord>& records() const { return records_; }
  const JacobianEstimate& estimate() const { return estimate_; }

 private:
  StepRecord make_record(int step, const FeaturePointSet& raw, const Vec& delta,
                         bool solver_failed, bool update_applied, double secant_post);
  double compute_termination_error(const Vec& gamma_filtered) const;
  double compute_ede(const FeaturePointSet& raw, const Vec& gamma_filtered) const;

  ControllerConfig cfg_;
  PlantFeedback& plant_;
  int n_;
  JacobianEstimate estimate_;
  LowPassFilter theta_filter_;
  LowPassFilter feature_filter_;
  Vec theta_commanded_;
  Vec theta_filtered_prev_;
  Vec gamma_filtered_prev_;
  double termination_error_ = 0.0;
  std::vector<StepRecord> records_;
};

/// Convenience wrapper: configure, run, return the full log.
ControlRunResult run_control_loop(const ControllerConfig& cfg, PlantFeedback& plant);

}  // namespace cmservo
