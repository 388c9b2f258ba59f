#include "cmservo/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace cmservo {

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::kLearning: return "learning";
    case Phase::kConverging: return "converging";
    case Phase::kSingularity: return "singularity";
  }
  return "unknown";
}

bool PhaseSegmentation::has_label(Phase p) const {
  return std::any_of(segments.begin(), segments.end(),
                     [p](const PhaseSegment& s) { return s.label == p; });
}

double ede(const Eigen::Vector2d& current, const Eigen::Vector2d& desired) {
  require_finite(current, "ede current");
  require_finite(desired, "ede desired");
  return (current - desired).norm();
}

double ymm(const JacobianEstimate& estimate) {
  if (estimate.rows() > estimate.cols()) {
    throw std::invalid_argument("ymm: estimate must have rows <= cols");
  }
  const Eigen::JacobiSVD<Mat> svd(estimate.matrix());
  double phi = 1.0;
  for (int i = 0; i < svd.singularValues().size(); ++i) phi *= svd.singularValues()(i);
  return std::max(phi, 0.0);
}

PhaseSegmentation segment_phases(const std::vector<StepRecord>& log, int window,
                                 double ede_slope_tol, double stall_theta_min) {
  if (log.empty()) throw std::invalid_argument("segment_phases: empty log");
  if (window < 2) throw std::invalid_argument("segment_phases: window must be >= 2");

  const int k = static_cast<int>(log.size());

  // EDE peak over the first half of the run (first occurrence).
  const int half = std::max(1, k / 2);
  int peak = 0;
  for (int i = 1; i < half; ++i) {
    if (log[static_cast<size_t>(i)].ede > log[static_cast<size_t>(peak)].ede) peak = i;
  }

  std::vector<Phase> labels(static_cast<size_t>(k), Phase::kConverging);
  for (int i = 1; i < k; ++i) {
    const int ws = std::max(0, i - window + 1);
    double ede_min = log[static_cast<size_t>(ws)].ede;
    double ede_max = ede_min;
    double dtheta_sum = 0.0;
    int dtheta_count = 0;
    for (int j = ws; j <= i; ++j) {
      ede_min = std::min(ede_min, log[static_cast<size_t>(j)].ede);
      ede_max = std::max(ede_max, log[static_cast<size_t>(j)].ede);
      if (j > 0 && log[static_cast<size_t>(j)].delta_theta.size() > 0) {
        dtheta_sum += log[static_cast<size_t>(j)].delta_theta.norm();
        ++dtheta_count;
      }
    }
    const double ede_spread = ede_max - ede_min;
    const double dtheta_mean = dtheta_count > 0 ? dtheta_sum / dtheta_count : 0.0;

    if (ede_spread < ede_slope_tol && dtheta_mean > stall_theta_min) {
      labels[static_cast<size_t>(i)] = Phase::kSingularity;
    } else if (i <= peak &&
               log[static_cast<size_t>(i)].ede >=
                   log[static_cast<size_t>(ws)].ede - ede_slope_tol) {
      labels[static_cast<size_t>(i)] = Phase::kLearning;
    }
  }
  if (k > 1) labels[0] = labels[1];

  PhaseSegmentation seg;
  int start = 0;
  for (int i = 1; i <= k; ++i) {
    if (i == k || labels[static_cast<size_t>(i)] != labels[static_cast<size_t>(start)]) {
      seg.segments.push_back({start, i - 1, labels[static_cast<size_t>(start)]});
      start = i;
    }
  }
  return seg;
}

}  // namespace cmservo
