#pragma once

#include "cmservo/core.hpp"

#include <array>

namespace cmservo {

/// Minimum pairwise pixel distance below which the curvature objective is
/// considered degenerate (markers have collapsed in the image).
inline constexpr double kMinCurvatureSeparationPx = 1e-6;

/// Which function maps tracked image points to the control objective.
/// Overlay regulates the selected points' pixel positions (N = 2 * count);
/// Curvature regulates the circumcircle curvature through three points (N = 1).
/// Point indices are zero-based into the FeaturePointSet.
class FfvKind {
 public:
  enum class Kind { kOverlay, kCurvature };

  static FfvKind overlay(std::vector<int> indices);
  static FfvKind curvature(const std::array<int, 3>& indices);

  Kind kind() const { return kind_; }
  const std::vector<int>& indices() const { return indices_; }
  int objective_dim() const;

  /// Throws if any index is out of range for a set of M points.
  void check_point_count(int point_count) const;

 private:
  FfvKind(Kind kind, std::vector<int> indices)
      : kind_(kind), indices_(std::move(indices)) {}

  Kind kind_;
  std::vector<int> indices_;
};

/// Evaluates the objective on a feature set. Overlay stacks the selected
/// points in index order; curvature returns
///   kappa = 2 |cross(v1-v2, v2-v3)| / (|v1-v2| |v2-v3| |v3-v1|)
/// with cross the scalar z-component, i.e. the inverse circumcircle radius.
FeedbackFeatureVector eval_ffv(const FfvKind& kind, const FeaturePointSet& features);

/// Elementwise objective error gamma - gamma_d.
FeedbackFeatureVector ffv_error(const FeedbackFeatureVector& gamma,
                                const FeedbackFeatureVector& gamma_d);

/// Central-difference d(gamma)/d(features), N x 2M, step h per coordinate.
/// Test utility only; the controller never differentiates the objective.
Mat numerical_feature_jacobian(const FfvKind& kind, const FeaturePointSet& features,
                               double h);

}  // namespace cmservo
