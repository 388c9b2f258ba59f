#pragma once

#include "cmservo/core.hpp"

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

namespace cmservo::sim {

/// Below this curvature the backbone is evaluated with its straight-line limit.
inline constexpr double kCurvatureEps = 1e-9;

/// Constant-curvature manipulator: three inputs (two orthogonal bending
/// channels plus roll about the shaft), tracked points at fixed arc-length
/// fractions, and a symmetric play deadband on the bending channels.
struct CmModel {
  double length_mm = 40.0;
  double bend_gain = 0.05;  // curvature (1/mm) per unit of bending actuation
  std::vector<double> sample_fractions = {0.25, 0.5, 0.75, 1.0};
  double backlash_width = 0.0;  // deadband width per bending channel

  void validate() const;
  int point_count() const { return static_cast<int>(sample_fractions.size()); }
};

struct CmState {
  ActuationVector theta_commanded = ActuationVector::zero(3);
  ActuationVector theta_effective = ActuationVector::zero(3);
};

/// Pin-hole camera. z_cam of a point is the third component of P * [r; 1]
/// and must stay positive (point in front of the camera).
class CameraModel {
 public:
  CameraModel(Eigen::Matrix<double, 3, 4> projection, double pixel_noise_sigma);

  /// Camera at `eye` looking toward `target`, focal length in pixels.
  static CameraModel look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                             const Eigen::Vector3d& up, double focal_px,
                             double pixel_noise_sigma);

  const Eigen::Matrix<double, 3, 4>& projection() const { return P_; }
  double pixel_noise_sigma() const { return sigma_; }

 private:
  Eigen::Matrix<double, 3, 4> P_;
  double sigma_;
};

struct HalfSpace {
  Eigen::Vector3d point;   // any point on the boundary plane
  Eigen::Vector3d normal;  // unit, pointing into free space
};

struct Sphere {
  Eigen::Vector3d center;
  double radius;
};

struct RigidStiffness {};
struct ElasticStiffness {
  double k;  // N/mm against the manipulator's structural stiffness
};
struct VariableStiffness {
  double k_soft;
  double k_stiff;
  double depth_threshold;  // mm of penetration where the stiff regime begins
};

struct ObstacleSpec {
  std::variant<HalfSpace, Sphere> geometry;
  std::variant<RigidStiffness, ElasticStiffness, VariableStiffness> stiffness;
  double tangential_drag = 0.0;  // in [0, 1]

  void validate() const;
  /// Signed distance (positive outside) and outward normal at p.
  std::pair<double, Eigen::Vector3d> signed_distance(const Eigen::Vector3d& p) const;
};

/// Ground truth attached to each step for analysis; never shown to the
/// controller.
struct StepTruth {
  CartesianPointSet points;
  ActuationVector theta_commanded;
  ActuationVector theta_effective;
  bool contact = false;
};

/// Classical play operator per bending channel:
///   theta_eff <- clamp(theta_eff_prev, cmd - b/2, cmd + b/2);
/// the roll channel passes through unchanged.
CmState apply_backlash(const CmState& state, const ActuationVector& commanded,
                       double backlash_width);

/// Constant-curvature backbone points for the effective actuation. Base at
/// the origin, undeflected backbone along +z.
CartesianPointSet forward_kinematics(const CmModel& model, const CmState& state);

/// Per-point quasi-static contact response. Penetrating points move back
/// along the outward normal by penetration * k_obs/(k_obs + k_cm) (rigid
/// obstacles project fully); points in contact at the previous step have
/// their tangential motion since then scaled by (1 - tangential_drag).
std::pair<CartesianPointSet, bool> resolve_contact(const CartesianPointSet& points,
                                                   const ObstacleSpec& obstacle,
                                                   const CartesianPointSet& previous_points,
                                                   double k_cm);

/// Noise-free pin-hole projection of every point; throws if any depth <= 0.
FeaturePointSet project_points(const CameraModel& camera, const CartesianPointSet& points);

/// Deterministic quasi-static plant. Each command maps straight to a new
/// equilibrium: backlash, kinematics, contact, projection. Measurements draw
/// fresh pixel noise from the seeded stream; sigma = 0 gives exact features.
class SimWorld {
 public:
  SimWorld(CmModel model, CameraModel camera, std::vector<ObstacleSpec> obstacles,
           double structural_stiffness, std::uint64_t seed,
           const ActuationVector& initial_theta = ActuationVector::zero(3));

  /// Advances the plant by a commanded increment.
  void apply_delta(const ActuationDelta& delta);

  /// One noisy measurement of the current resolved feature points.
  FeaturePointSet measure();

  /// apply_delta followed by measure; also returns the step's ground truth.
  std::pair<FeaturePointSet, StepTruth> step(const ActuationDelta& delta);

  const StepTruth& truth() const { return truth_; }
  const CmModel& model() const { return model_; }
  const CameraModel& camera() const { return camera_; }
  int actuation_dim() const { return 3; }

 private:
  void settle();
  double gaussian();

  CmModel model_;
  CameraModel camera_;
  std::vector<ObstacleSpec> obstacles_;
  double k_cm_;
  CmState state_;
  CartesianPointSet resolved_points_;
  StepTruth truth_;
  std::mt19937_64 rng_;
};

}  // namespace cmservo::sim
