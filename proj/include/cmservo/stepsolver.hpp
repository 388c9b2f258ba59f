#pragma once

#include "cmservo/core.hpp"
#include "cmservo/estimator.hpp"

#include <stdexcept>
#include <vector>

namespace cmservo {

/// Feasibility tolerance on returned steps.
inline constexpr double kFeasibilityTol = 1e-9;

/// Tie-break regularizer: mu * ||dtheta||^2 added to the solve objective so a
/// rank-deficient map still yields the minimum-norm step deterministically.
/// Applied relative to the squared spectral norm of the estimate, keeping the
/// term invisible (1e-10 of the objective scale) for any magnitude of J.
inline constexpr double kTieBreakMu = 1e-10;

/// The effective regularizer weight used by solve_step and kkt_check.
double tie_break_weight(const Mat& estimate_matrix);

/// Per-step inequality constraints A * dtheta <= b plus box bounds.
/// The zero step must always be feasible (b >= 0, lower <= 0 <= upper), which
/// guarantees the solver a valid starting point.
class ConstraintSet {
 public:
  ConstraintSet(Mat A, Vec b, Vec lower, Vec upper);

  /// Box-only set at +/- half_width per channel (the default step bound).
  static ConstraintSet default_bounds(int n, double half_width = 0.5);

  int dim() const { return static_cast<int>(lower_.size()); }
  int inequality_count() const { return static_cast<int>(A_.rows()); }
  const Mat& A() const { return A_; }
  const Vec& b() const { return b_; }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }

  /// Largest violation of any constraint by x (0 when feasible).
  double violation(const Vec& x) const;

 private:
  Mat A_;  // h x n, h may be 0
  Vec b_;
  Vec lower_;
  Vec upper_;
};

/// Constraint identifiers in StepSolution::active_set and KKT recovery:
/// [0, h) rows of A, [h, h+n) upper bounds, [h+n, h+2n) lower bounds.
struct StepSolution {
  ActuationDelta delta_theta;
  double objective = 0.0;     // ||J*dtheta - d||^2 at the solution
  double kkt_residual = 0.0;  // max of the three KKT residuals
  std::vector<int> active_set;
};

struct KktResiduals {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;
  double max() const;
};

/// Raised when the active-set iteration exhausts its budget without a KKT
/// certificate; carries the best feasible iterate found.
struct SolverFailure : std::runtime_error {
  SolverFailure(const std::string& msg, StepSolution best_found)
      : std::runtime_error(msg), best(std::move(best_found)) {}
  StepSolution best;
};

/// Solves  min ||J*dtheta - desired_change||^2  s.t.  A*dtheta <= b and the
/// box, by a primal active-set method started at zero. Ties among minimizers
/// are broken toward the minimum-norm step (kTieBreakMu). max_iterations = 0
/// picks a budget from the problem size.
StepSolution solve_step(const JacobianEstimate& estimate,
                        const FeedbackFeatureVector& desired_change,
                        const ConstraintSet& constraints, int max_iterations = 0);

/// KKT residuals of a candidate step for the same problem; multipliers are
/// recovered by nonnegative least squares on the active constraint normals.
KktResiduals kkt_check(const JacobianEstimate& estimate,
                       const FeedbackFeatureVector& desired_change,
                       const ConstraintSet& constraints, const ActuationDelta& candidate);

/// min ||M*x - y|| subject to x >= 0 (Lawson-Hanson). Exposed for tests.
Vec nonnegative_least_squares(const Mat& M, const Vec& y);

}  // namespace cmservo
