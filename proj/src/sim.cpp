#include "cmservo/sim.hpp"

#include <cmath>

namespace cmservo::sim {

void CmModel::validate() const {
  if (!(length_mm > 0.0)) throw std::invalid_argument("CmModel: length must be positive");
  if (!std::isfinite(bend_gain) || bend_gain == 0.0) {
    throw std::invalid_argument("CmModel: bend_gain must be finite and nonzero");
  }
  if (sample_fractions.empty()) {
    throw std::invalid_argument("CmModel: need at least one sample fraction");
  }
  double prev = 0.0;
  for (double s : sample_fractions) {
    if (!(s > prev)) {
      throw std::invalid_argument("CmModel: sample fractions must be strictly increasing in (0, 1]");
    }
    prev = s;
  }
  if (sample_fractions.back() != 1.0) {
    throw std::invalid_argument("CmModel: last sample fraction must be 1 (end-effector)");
  }
  if (backlash_width < 0.0) throw std::invalid_argument("CmModel: backlash_width must be >= 0");
}

CameraModel::CameraModel(Eigen::Matrix<double, 3, 4> projection, double pixel_noise_sigma)
    : P_(projection), sigma_(pixel_noise_sigma) {
  require_finite(P_, "CameraModel projection");
  if (!(sigma_ >= 0.0)) throw std::invalid_argument("CameraModel: noise sigma must be >= 0");
}

CameraModel CameraModel::look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                                 const Eigen::Vector3d& up, double focal_px,
                                 double pixel_noise_sigma) {
  const Eigen::Vector3d forward = (target - eye).normalized();
  Eigen::Vector3d right = forward.cross(up);
  if (right.norm() < 1e-12) {
    throw std::invalid_argument("CameraModel::look_at: up is parallel to the view direction");
  }
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right);  // image q grows against `up`

  Eigen::Matrix3d rotation;
  rotation.row(0) = right.transpose();
  rotation.row(1) = down.transpose();
  rotation.row(2) = forward.transpose();

  Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();
  intrinsics(0, 0) = focal_px;
  intrinsics(1, 1) = focal_px;

  Eigen::Matrix<double, 3, 4> extrinsics;
  extrinsics.leftCols<3>() = rotation;
  extrinsics.col(3) = -rotation * eye;
  return CameraModel(intrinsics * extrinsics, pixel_noise_sigma);
}

void ObstacleSpec::validate() const {
  if (const auto* hs = std::get_if<HalfSpace>(&geometry)) {
    require_finite(hs->point, "HalfSpace point");
    if (std::abs(hs->normal.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("HalfSpace: normal must be unit length");
    }
  } else {
    const auto& sp = std::get<Sphere>(geometry);
    require_finite(sp.center, "Sphere center");
    if (!(sp.radius > 0.0)) throw std::invalid_argument("Sphere: radius must be positive");
  }
  if (const auto* el = std::get_if<ElasticStiffness>(&stiffness)) {
    if (!(el->k > 0.0)) throw std::invalid_argument("ElasticStiffness: k must be positive");
  } else if (const auto* var = std::get_if<VariableStiffness>(&stiffness)) {
    if (!(var->k_soft > 0.0) || !(var->k_stiff > 0.0)) {
      throw std::invalid_argument("VariableStiffness: stiffnesses must be positive");
    }
    if (!(var->depth_threshold > 0.0)) {
      throw std::invalid_argument("VariableStiffness: depth_threshold must be positive");
    }
  }
  if (!(tangential_drag >= 0.0 && tangential_drag <= 1.0)) {
    throw std::invalid_argument("ObstacleSpec: tangential_drag must lie in [0, 1]");
  }
}

std::pair<double, Eigen::Vector3d> ObstacleSpec::signed_distance(
    const Eigen::Vector3d& p) const {
  if (const auto* hs = std::get_if<HalfSpace>(&geometry)) {
    return {(p - hs->point).dot(hs->normal), hs->normal};
  }
  const auto& sp = std::get<Sphere>(geometry);
  const Eigen::Vector3d offset = p - sp.center;
  const double dist = offset.norm();
  // At the exact center any direction works; pick a fixed one.
  const Eigen::Vector3d normal =
      dist > 1e-12 ? Eigen::Vector3d(offset / dist) : Eigen::Vector3d::UnitZ();
  return {dist - sp.radius, normal};
}

CmState apply_backlash(const CmState& state, const ActuationVector& commanded,
                       double backlash_width) {
  if (commanded.dim() != 3) throw std::invalid_argument("apply_backlash: expected 3 channels");
  Vec eff = state.theta_effective.values();
  const Vec& cmd = commanded.values();
  const double half = backlash_width / 2.0;
  for (int i = 0; i < 2; ++i) {
    eff(i) = std::clamp(eff(i), cmd(i) - half, cmd(i) + half);
  }
  eff(2) = cmd(2);  // roll has no play
  return CmState{commanded, ActuationVector(eff)};
}

CartesianPointSet forward_kinematics(const CmModel& model, const CmState& state) {
  model.validate();
  const Vec& theta = state.theta_effective.values();
  const double bend_a = theta(0);
  const double bend_b = theta(1);
  const double roll = theta(2);
  const double magnitude = std::hypot(bend_a, bend_b);
  const double kappa = model.bend_gain * magnitude;
  const double phi = std::atan2(bend_b, bend_a) + roll;

  std::vector<Eigen::Vector3d> pts;
  pts.reserve(model.sample_fractions.size());
  for (double s : model.sample_fractions) {
    const double arc = s * model.length_mm;
    if (kappa < kCurvatureEps) {
      pts.emplace_back(0.0, 0.0, arc);
    } else {
      const double radial = (1.0 - std::cos(kappa * arc)) / kappa;
      pts.emplace_back(radial * std::cos(phi), radial * std::sin(phi),
                       std::sin(kappa * arc) / kappa);
    }
  }
  return CartesianPointSet(std::move(pts));
}

namespace {

double stiffness_ratio(const ObstacleSpec& obstacle, double penetration, double k_cm) {
  if (std::holds_alternative<RigidStiffness>(obstacle.stiffness)) return 1.0;
  double k_obs;
  if (const auto* el = std::get_if<ElasticStiffness>(&obstacle.stiffness)) {
    k_obs = el->k;
  } else {
    const auto& var = std::get<VariableStiffness>(obstacle.stiffness);
    k_obs = penetration < var.depth_threshold ? var.k_soft : var.k_stiff;
  }
  return k_obs / (k_obs + k_cm);
}

}  // namespace

std::pair<CartesianPointSet, bool> resolve_contact(const CartesianPointSet& points,
                                                   const ObstacleSpec& obstacle,
                                                   const CartesianPointSet& previous_points,
                                                   double k_cm) {
  obstacle.validate();
  if (!(k_cm > 0.0)) throw std::invalid_argument("resolve_contact: k_cm must be positive");
  if (previous_points.point_count() != points.point_count()) {
    throw std::invalid_argument("resolve_contact: previous point count mismatch");
  }

  const bool rigid = std::holds_alternative<RigidStiffness>(obstacle.stiffness);
  bool contact = false;
  std::vector<Eigen::Vector3d> out;
  out.reserve(static_cast<size_t>(points.point_count()));
  for (int i = 0; i < points.point_count(); ++i) {
    const Eigen::Vector3d& p = points.point(i);
    auto [sd, normal] = obstacle.signed_distance(p);
    const double penetration = std::max(0.0, -sd);
    if (penetration <= 0.0) {
      out.push_back(p);
      continue;
    }
    contact = true;
    Eigen::Vector3d x = p + stiffness_ratio(obstacle, penetration, k_cm) * penetration * normal;

    const Eigen::Vector3d& prev = previous_points.point(i);
    const auto [prev_sd, prev_normal] = obstacle.signed_distance(prev);
    if (prev_sd <= 1e-9 && obstacle.tangential_drag > 0.0) {
      // Sticking friction anchored at the previous contact point: motion is
      // split about the surface normal there, and only the tangential part
      // survives scaling.
      const Eigen::Vector3d motion = x - prev;
      const Eigen::Vector3d normal_part = motion.dot(prev_normal) * prev_normal;
      x = prev + normal_part + (1.0 - obstacle.tangential_drag) * (motion - normal_part);
      if (rigid) {
        // Dragging along a curved surface may re-enter it; project back out.
        auto [sd2, n2] = obstacle.signed_distance(x);
        if (sd2 < 0.0) x -= sd2 * n2;
      }
    }
    out.push_back(x);
  }
  return {CartesianPointSet(std::move(out)), contact};
}

FeaturePointSet project_points(const CameraModel& camera, const CartesianPointSet& points) {
  std::vector<Eigen::Vector2d> px;
  px.reserve(static_cast<size_t>(points.point_count()));
  for (int i = 0; i < points.point_count(); ++i) {
    Eigen::Vector4d homogeneous;
    homogeneous << points.point(i), 1.0;
    const Eigen::Vector3d g = camera.projection() * homogeneous;
    if (!(g(2) > 0.0)) {
      throw std::domain_error("project_points: point at or behind the camera plane");
    }
    px.emplace_back(g(0) / g(2), g(1) / g(2));
  }
  return FeaturePointSet::from_points(px);
}

SimWorld::SimWorld(CmModel model, CameraModel camera, std::vector<ObstacleSpec> obstacles,
                   double structural_stiffness, std::uint64_t seed,
                   const ActuationVector& initial_theta)
    : model_(std::move(model)),
      camera_(camera),
      obstacles_(std::move(obstacles)),
      k_cm_(structural_stiffness),
      state_{initial_theta, initial_theta},
      resolved_points_(forward_kinematics(model_, state_)),
      truth_{resolved_points_, state_.theta_commanded, state_.theta_effective, false},
      rng_(seed) {
  model_.validate();
  for (const auto& o : obstacles_) o.validate();
  if (!(k_cm_ > 0.0)) throw std::invalid_argument("SimWorld: structural stiffness must be > 0");
  if (initial_theta.dim() != 3) throw std::invalid_argument("SimWorld: expected 3 channels");
  settle();
}

void SimWorld::settle() {
  CartesianPointSet free_points = forward_kinematics(model_, state_);
  bool contact = false;
  for (const auto& obstacle : obstacles_) {
    auto [resolved, touched] = resolve_contact(free_points, obstacle, resolved_points_, k_cm_);
    free_points = std::move(resolved);
    contact = contact || touched;
  }
  resolved_points_ = std::move(free_points);
  truth_ = StepTruth{resolved_points_, state_.theta_commanded, state_.theta_effective, contact};
}

void SimWorld::apply_delta(const ActuationDelta& delta) {
  if (delta.dim() != 3) throw std::invalid_argument("SimWorld: expected 3 channels");
  const ActuationVector commanded(state_.theta_commanded.values() + delta.values());
  state_ = apply_backlash(state_, commanded, model_.backlash_width);
  settle();
}

double SimWorld::gaussian() {
  // Box-Muller on explicit uniforms; std::normal_distribution's stream is
  // implementation-defined and logs must be byte-reproducible.
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double u1 = uniform(rng_);
  while (u1 <= 1e-300) u1 = uniform(rng_);
  const double u2 = uniform(rng_);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

FeaturePointSet SimWorld::measure() {
  FeaturePointSet exact = project_points(camera_, resolved_points_);
  if (camera_.pixel_noise_sigma() == 0.0) return exact;
  Vec noisy = exact.flat();
  for (int i = 0; i < noisy.size(); ++i) {
    noisy(i) += camera_.pixel_noise_sigma() * gaussian();
  }
  return FeaturePointSet(std::move(noisy));
}

std::pair<FeaturePointSet, StepTruth> SimWorld::step(const ActuationDelta& delta) {
  apply_delta(delta);
  return {measure(), truth_};
}

}  // namespace cmservo::sim
