#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cmservo {

// Dense double-precision throughout; problem dimensions stay below a few
// dozen, and every type checks its entries at construction.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

/// Actuation input vector (units depend on the channel: tendon mm, roll rad).
class ActuationVector {
 public:
  explicit ActuationVector(Vec values) : values_(std::move(values)) {
    if (values_.size() < 1) {
      throw std::invalid_argument("ActuationVector: need at least one channel");
    }
    require_finite(values_, "ActuationVector");
  }

  static ActuationVector zero(int n) { return ActuationVector(Vec::Zero(n)); }

  int dim() const { return static_cast<int>(values_.size()); }
  const Vec& values() const { return values_; }

 private:
  Vec values_;
};

/// Per-step actuation increment, same layout and units as ActuationVector.
class ActuationDelta {
 public:
  explicit ActuationDelta(Vec values) : values_(std::move(values)) {
    if (values_.size() < 1) {
      throw std::invalid_argument("ActuationDelta: need at least one channel");
    }
    require_finite(values_, "ActuationDelta");
  }

  static ActuationDelta zero(int n) { return ActuationDelta(Vec::Zero(n)); }

  int dim() const { return static_cast<int>(values_.size()); }
  const Vec& values() const { return values_; }
  double norm() const { return values_.norm(); }

 private:
  Vec values_;
};

/// M tracked image points stored as the flat stack (p1, q1, p2, q2, ...).
class FeaturePointSet {
 public:
  explicit FeaturePointSet(Vec flat) : flat_(std::move(flat)) {
    if (flat_.size() < 2 || flat_.size() % 2 != 0) {
      throw std::invalid_argument("FeaturePointSet: flat size must be 2*M, M >= 1");
    }
    require_finite(flat_, "FeaturePointSet");
  }

  static FeaturePointSet from_points(const std::vector<Eigen::Vector2d>& pts);

  int point_count() const { return static_cast<int>(flat_.size() / 2); }
  Eigen::Vector2d point(int i) const;
  std::vector<Eigen::Vector2d> points() const;
  const Vec& flat() const { return flat_; }

 private:
  Vec flat_;
};

/// The N-dimensional control objective (pixels for overlay, px^-1 for curvature).
class FeedbackFeatureVector {
 public:
  explicit FeedbackFeatureVector(Vec values) : values_(std::move(values)) {
    if (values_.size() < 1) {
      throw std::invalid_argument("FeedbackFeatureVector: empty");
    }
    require_finite(values_, "FeedbackFeatureVector");
  }

  int dim() const { return static_cast<int>(values_.size()); }
  const Vec& values() const { return values_; }

 private:
  Vec values_;
};

/// M body points in world millimetres.
class CartesianPointSet {
 public:
  explicit CartesianPointSet(std::vector<Eigen::Vector3d> pts) : points_(std::move(pts)) {
    for (const auto& p : points_) require_finite(p, "CartesianPointSet");
  }

  int point_count() const { return static_cast<int>(points_.size()); }
  const Eigen::Vector3d& point(int i) const { return points_.at(static_cast<size_t>(i)); }
  const std::vector<Eigen::Vector3d>& points() const { return points_; }

 private:
  std::vector<Eigen::Vector3d> points_;
};

/// Stacks 2-D pixel points into the flat feature vector, preserving order.
FeaturePointSet stack_features(const std::vector<Eigen::Vector2d>& points);

}  // namespace cmservo
