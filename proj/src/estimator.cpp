#include "cmservo/estimator.hpp"

#include <cmath>

namespace cmservo {

JacobianEstimate::JacobianEstimate(Mat matrix, double beta)
    : matrix_(std::move(matrix)), beta_(beta) {
  if (matrix_.rows() < 1 || matrix_.cols() < 1) {
    throw std::invalid_argument("JacobianEstimate: empty matrix");
  }
  require_finite(matrix_, "JacobianEstimate");
  if (!(beta_ >= 0.0 && beta_ <= 1.0)) {
    throw std::invalid_argument("JacobianEstimate: beta must lie in [0, 1]");
  }
}

JacobianEstimate init_jacobian(int n_inputs, int n_outputs, JacobianInitMode mode,
                               double scale, double beta) {
  if (n_outputs < 1) {
    throw std::invalid_argument("init_jacobian: need at least one output");
  }
  if (n_inputs < n_outputs) {
    throw std::invalid_argument(
        "init_jacobian: inputs must be >= outputs (wide-or-square map required)");
  }
  Mat m;
  switch (mode) {
    case JacobianInitMode::kOnes:
      m = Mat::Ones(n_outputs, n_inputs);
      break;
    case JacobianInitMode::kIdentityLike:
      m = Mat::Identity(n_outputs, n_inputs);
      break;
    case JacobianInitMode::kScaled:
      if (!std::isfinite(scale) || scale == 0.0) {
        throw std::invalid_argument("init_jacobian: scale must be finite and nonzero");
      }
      m = scale * Mat::Ones(n_outputs, n_inputs);
      break;
  }
  return JacobianEstimate(std::move(m), beta);
}

std::optional<JacobianEstimate> broyden_update(const JacobianEstimate& estimate,
                                               const SecantPair& pair) {
  const Vec& s = pair.delta_theta.values();
  const Vec& y = pair.delta_gamma;
  if (s.size() != estimate.cols() || y.size() != estimate.rows()) {
    throw std::invalid_argument("broyden_update: secant pair dimension mismatch");
  }
  require_finite(y, "broyden_update delta_gamma");
  const double ss = s.squaredNorm();
  if (std::sqrt(ss) <= kMinUpdateStepNorm) {
    return std::nullopt;
  }
  Mat updated = estimate.matrix() +
                (estimate.beta() / ss) * (y - estimate.matrix() * s) * s.transpose();
  return JacobianEstimate(std::move(updated), estimate.beta());
}

double secant_residual(const JacobianEstimate& estimate, const SecantPair& pair) {
  const Vec& s = pair.delta_theta.values();
  const Vec& y = pair.delta_gamma;
  if (s.size() != estimate.cols() || y.size() != estimate.rows()) {
    throw std::invalid_argument("secant_residual: secant pair dimension mismatch");
  }
  return (estimate.matrix() * s - y).norm();
}

}  // namespace cmservo
