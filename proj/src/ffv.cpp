#include "cmservo/ffv.hpp"

#include <algorithm>
#include <cmath>

namespace cmservo {

FfvKind FfvKind::overlay(std::vector<int> indices) {
  if (indices.empty()) {
    throw std::invalid_argument("FfvKind::overlay: need at least one point index");
  }
  for (size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0) throw std::invalid_argument("FfvKind::overlay: negative index");
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw std::invalid_argument("FfvKind::overlay: indices must be strictly increasing");
    }
  }
  return FfvKind(Kind::kOverlay, std::move(indices));
}

FfvKind FfvKind::curvature(const std::array<int, 3>& indices) {
  std::vector<int> idx(indices.begin(), indices.end());
  for (int i : idx) {
    if (i < 0) throw std::invalid_argument("FfvKind::curvature: negative index");
  }
  if (idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2]) {
    throw std::invalid_argument("FfvKind::curvature: indices must be distinct");
  }
  return FfvKind(Kind::kCurvature, std::move(idx));
}

int FfvKind::objective_dim() const {
  return kind_ == Kind::kOverlay ? 2 * static_cast<int>(indices_.size()) : 1;
}

void FfvKind::check_point_count(int point_count) const {
  for (int i : indices_) {
    if (i >= point_count) {
      throw std::invalid_argument("FfvKind: point index out of range for feature set");
    }
  }
}

namespace {

double scalar_cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

double circumcurvature(const Eigen::Vector2d& v1, const Eigen::Vector2d& v2,
                       const Eigen::Vector2d& v3) {
  const Eigen::Vector2d d12 = v1 - v2;
  const Eigen::Vector2d d23 = v2 - v3;
  const Eigen::Vector2d d31 = v3 - v1;
  const double a = d12.norm();
  const double b = d23.norm();
  const double c = d31.norm();
  if (a < kMinCurvatureSeparationPx || b < kMinCurvatureSeparationPx ||
      c < kMinCurvatureSeparationPx) {
    throw std::domain_error("curvature FFV: degenerate geometry, markers too close");
  }
  return 2.0 * std::abs(scalar_cross(d12, d23)) / (a * b * c);
}

}  // namespace

FeedbackFeatureVector eval_ffv(const FfvKind& kind, const FeaturePointSet& features) {
  kind.check_point_count(features.point_count());
  if (kind.kind() == FfvKind::Kind::kOverlay) {
    Vec out(kind.objective_dim());
    int k = 0;
    for (int i : kind.indices()) {
      const Eigen::Vector2d p = features.point(i);
      out(k++) = p.x();
      out(k++) = p.y();
    }
    return FeedbackFeatureVector(std::move(out));
  }
  const auto& idx = kind.indices();
  const double kappa = circumcurvature(features.point(idx[0]), features.point(idx[1]),
                                       features.point(idx[2]));
  Vec out(1);
  out(0) = kappa;
  return FeedbackFeatureVector(std::move(out));
}

FeedbackFeatureVector ffv_error(const FeedbackFeatureVector& gamma,
                                const FeedbackFeatureVector& gamma_d) {
  if (gamma.dim() != gamma_d.dim()) {
    throw std::invalid_argument("ffv_error: dimension mismatch");
  }
  return FeedbackFeatureVector(gamma.values() - gamma_d.values());
}

Mat numerical_feature_jacobian(const FfvKind& kind, const FeaturePointSet& features,
                               double h) {
  if (!(h > 0.0)) throw std::invalid_argument("numerical_feature_jacobian: h must be > 0");
  kind.check_point_count(features.point_count());
  const int cols = static_cast<int>(features.flat().size());
  const int rows = kind.objective_dim();
  Mat jac(rows, cols);
  for (int j = 0; j < cols; ++j) {
    Vec plus = features.flat();
    Vec minus = features.flat();
    plus(j) += h;
    minus(j) -= h;
    const Vec gp = eval_ffv(kind, FeaturePointSet(plus)).values();
    const Vec gm = eval_ffv(kind, FeaturePointSet(minus)).values();
    jac.col(j) = (gp - gm) / (2.0 * h);
  }
  return jac;
}

}  // namespace cmservo
