#include "cmservo/core.hpp"

namespace cmservo {

FeaturePointSet FeaturePointSet::from_points(const std::vector<Eigen::Vector2d>& pts) {
  if (pts.empty()) {
    throw std::invalid_argument("FeaturePointSet: need at least one point");
  }
  Vec flat(2 * static_cast<int>(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) {
    flat(2 * static_cast<int>(i)) = pts[i].x();
    flat(2 * static_cast<int>(i) + 1) = pts[i].y();
  }
  return FeaturePointSet(std::move(flat));
}

Eigen::Vector2d FeaturePointSet::point(int i) const {
  if (i < 0 || i >= point_count()) {
    throw std::out_of_range("FeaturePointSet: point index out of range");
  }
  return {flat_(2 * i), flat_(2 * i + 1)};
}

std::vector<Eigen::Vector2d> FeaturePointSet::points() const {
  std::vector<Eigen::Vector2d> out(static_cast<size_t>(point_count()));
  for (int i = 0; i < point_count(); ++i) out[static_cast<size_t>(i)] = point(i);
  return out;
}

FeaturePointSet stack_features(const std::vector<Eigen::Vector2d>& points) {
  return FeaturePointSet::from_points(points);
}

}  // namespace cmservo
