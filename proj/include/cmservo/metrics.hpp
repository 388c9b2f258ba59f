#pragma once

#include "cmservo/core.hpp"
#include "cmservo/estimator.hpp"

#include <string>
#include <vector>

namespace cmservo {

/// One control-loop step as logged by the controller. theta_effective and
/// contact are ground truth merged in by the scenario runner for analysis;
/// the controller itself never sees them.
struct StepRecord {
  int step = 0;
  Vec theta;            // cumulative commanded actuation
  Vec theta_effective;  // simulator truth (empty until merged)
  Vec features_flat;    // raw observed feature stack
  Vec gamma;            // filtered objective value the controller acted on
  Vec delta_theta;      // command issued at this step (zero for step 0)
  double ede = 0.0;     // task error in px (tip distance / radius error)
  double ymm = 0.0;     // manipulability of the current estimate
  bool contact = false;
  bool converged = false;
  bool solver_failed = false;
  bool update_applied = false;
  double secant_residual_post = 0.0;  // valid when update_applied
};

enum class Phase { kLearning, kConverging, kSingularity };

std::string phase_name(Phase p);

struct PhaseSegment {
  int start = 0;  // inclusive step index
  int end = 0;    // inclusive step index
  Phase label = Phase::kConverging;
};

/// Contiguous, non-overlapping segments covering [0, last step].
struct PhaseSegmentation {
  std::vector<PhaseSegment> segments;

  bool has_label(Phase p) const;
};

/// Euclidean distance between a controlled pixel and its target.
double ede(const Eigen::Vector2d& current, const Eigen::Vector2d& desired);

/// Yoshikawa manipulability sqrt(det(J J^T)), computed as the product of
/// singular values so near-singular estimates do not go negative in round-off.
double ymm(const JacobianEstimate& estimate);

/// Defaults reproduce the canned scenarios' phase boundaries; analysis aid only.
inline constexpr int kPhaseWindowDefault = 10;
inline constexpr double kPhaseEdeSlopeTolDefault = 0.5;    // px over the window
inline constexpr double kPhaseStallThetaMinDefault = 1e-3;  // actuation units

/// Sliding-window phase labels:
///  - singularity: EDE spread (max-min) over the trailing window below
///    ede_slope_tol while the mean commanded ||dtheta|| exceeds stall_theta_min
///    (actuation active, features frozen);
///  - learning: at or before the EDE peak of the run's first half with EDE
///    non-decreasing (within ede_slope_tol) over the window;
///  - converging otherwise.
/// Adjacent equal labels merge; step 0 inherits step 1's label.
PhaseSegmentation segment_phases(const std::vector<StepRecord>& log,
                                 int window = kPhaseWindowDefault,
                                 double ede_slope_tol = kPhaseEdeSlopeTolDefault,
                                 double stall_theta_min = kPhaseStallThetaMinDefault);

}  // namespace cmservo
