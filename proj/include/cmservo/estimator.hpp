#pragma once

#include "cmservo/core.hpp"

#include <optional>

namespace cmservo {

/// Estimate of the N x n map from actuation increments to objective
/// increments, together with the rate-of-change parameter beta in [0, 1].
class JacobianEstimate {
 public:
  JacobianEstimate(Mat matrix, double beta);

  int rows() const { return static_cast<int>(matrix_.rows()); }
  int cols() const { return static_cast<int>(matrix_.cols()); }
  const Mat& matrix() const { return matrix_; }
  double beta() const { return beta_; }

 private:
  Mat matrix_;
  double beta_;
};

/// One observed input/output increment pair: s = delta_theta, y = delta_gamma.
struct SecantPair {
  ActuationDelta delta_theta;
  Vec delta_gamma;
};

enum class JacobianInitMode { kOnes, kIdentityLike, kScaled };

/// Steps with 2-norm at or below this are rejected by broyden_update rather
/// than dividing by a vanishing quadratic form.
inline constexpr double kMinUpdateStepNorm = 1e-9;

/// Builds the initial N x n estimate. kOnes: all entries 1; kIdentityLike:
/// 1 on the main diagonal; kScaled: scale times the all-ones matrix.
/// Requires n >= N >= 1 (the step solver needs a wide-or-square map).
JacobianEstimate init_jacobian(int n_inputs, int n_outputs, JacobianInitMode mode,
                               double scale = 1.0, double beta = 1.0);

/// Rank-1 update
///   J <- J + beta * (y - J s) s^T / (s^T s).
/// With beta = 1 the result maps s to y exactly; with beta < 1 the residual
/// along s shrinks by the factor (1 - beta). Among all matrices mapping s to
/// y, the beta = 1 result is the one closest to J in Frobenius norm.
/// Returns nullopt when ||s|| <= kMinUpdateStepNorm (stalled actuation step);
/// the caller keeps the previous estimate.
std::optional<JacobianEstimate> broyden_update(const JacobianEstimate& estimate,
                                               const SecantPair& pair);

/// ||J s - y||_2, the violation of the secant condition by this estimate.
double secant_residual(const JacobianEstimate& estimate, const SecantPair& pair);

}  // namespace cmservo
