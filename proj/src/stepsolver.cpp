#include "cmservo/stepsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cmservo {

ConstraintSet::ConstraintSet(Mat A, Vec b, Vec lower, Vec upper)
    : A_(std::move(A)), b_(std::move(b)), lower_(std::move(lower)), upper_(std::move(upper)) {
  const int n = static_cast<int>(lower_.size());
  if (n < 1) throw std::invalid_argument("ConstraintSet: empty bounds");
  if (upper_.size() != n) throw std::invalid_argument("ConstraintSet: bound size mismatch");
  if (A_.size() == 0 && A_.cols() != n) A_.resize(0, n);
  if (A_.cols() != n) throw std::invalid_argument("ConstraintSet: A column count mismatch");
  if (b_.size() != A_.rows()) throw std::invalid_argument("ConstraintSet: b size mismatch");
  require_finite(lower_, "ConstraintSet lower");
  require_finite(upper_, "ConstraintSet upper");
  if (A_.rows() > 0) {
    require_finite(A_, "ConstraintSet A");
    require_finite(b_, "ConstraintSet b");
  }
  if ((lower_.array() > upper_.array()).any()) {
    throw std::invalid_argument("ConstraintSet: delta_min must be <= delta_max elementwise");
  }
  if ((lower_.array() > 0.0).any() || (upper_.array() < 0.0).any()) {
    throw std::invalid_argument("ConstraintSet: the zero step must satisfy the box");
  }
  if (b_.size() > 0 && (b_.array() < 0.0).any()) {
    throw std::invalid_argument("ConstraintSet: the zero step must satisfy A*0 <= b");
  }
}

ConstraintSet ConstraintSet::default_bounds(int n, double half_width) {
  return ConstraintSet(Mat(0, n), Vec(0), Vec::Constant(n, -half_width),
                       Vec::Constant(n, half_width));
}

double ConstraintSet::violation(const Vec& x) const {
  double v = 0.0;
  if (A_.rows() > 0) v = std::max(v, (A_ * x - b_).maxCoeff());
  v = std::max(v, (x - upper_).maxCoeff());
  v = std::max(v, (lower_ - x).maxCoeff());
  return std::max(v, 0.0);
}

double KktResiduals::max() const {
  return std::max({stationarity, feasibility, complementarity});
}

double tie_break_weight(const Mat& estimate_matrix) {
  const double sigma_max = estimate_matrix.jacobiSvd().singularValues()(0);
  return kTieBreakMu * std::max(1.0, sigma_max * sigma_max);
}

namespace {

// Stacked constraint view G x <= h over ids [0,h) A rows, [h,h+n) upper,
// [h+n, h+2n) lower bounds.
struct StackedConstraints {
  Mat G;
  Vec h;

  explicit StackedConstraints(const ConstraintSet& cons) {
    const int n = cons.dim();
    const int m = cons.inequality_count() + 2 * n;
    G.resize(m, n);
    h.resize(m);
    int r = 0;
    for (int i = 0; i < cons.inequality_count(); ++i, ++r) {
      G.row(r) = cons.A().row(i);
      h(r) = cons.b()(i);
    }
    for (int j = 0; j < n; ++j, ++r) {
      G.row(r).setZero();
      G(r, j) = 1.0;
      h(r) = cons.upper()(j);
    }
    for (int j = 0; j < n; ++j, ++r) {
      G.row(r).setZero();
      G(r, j) = -1.0;
      h(r) = -cons.lower()(j);
    }
  }
};

Mat active_rows(const StackedConstraints& sc, const std::vector<int>& working) {
  Mat C(static_cast<int>(working.size()), sc.G.cols());
  for (size_t i = 0; i < working.size(); ++i) C.row(static_cast<int>(i)) = sc.G.row(working[i]);
  return C;
}

}  // namespace

Vec nonnegative_least_squares(const Mat& M, const Vec& y) {
  // Lawson-Hanson active set over at most a handful of multipliers.
  const int k = static_cast<int>(M.cols());
  Vec x = Vec::Zero(k);
  if (k == 0) return x;
  std::vector<bool> passive(static_cast<size_t>(k), false);
  const int max_outer = 3 * k + 10;
  for (int outer = 0; outer < max_outer; ++outer) {
    const Vec w = M.transpose() * (y - M * x);
    int best = -1;
    double best_w = 1e-12 * (1.0 + y.norm());
    for (int i = 0; i < k; ++i) {
      if (!passive[static_cast<size_t>(i)] && w(i) > best_w) {
        best_w = w(i);
        best = i;
      }
    }
    if (best < 0) break;
    passive[static_cast<size_t>(best)] = true;

    for (int inner = 0; inner < max_outer; ++inner) {
      std::vector<int> idx;
      for (int i = 0; i < k; ++i) {
        if (passive[static_cast<size_t>(i)]) idx.push_back(i);
      }
      Mat Mp(M.rows(), static_cast<int>(idx.size()));
      for (size_t i = 0; i < idx.size(); ++i) Mp.col(static_cast<int>(i)) = M.col(idx[i]);
      const Vec z = Mp.colPivHouseholderQr().solve(y);
      bool all_positive = true;
      for (int i = 0; i < z.size(); ++i) {
        if (z(i) <= 0.0) {
          all_positive = false;
          break;
        }
      }
      if (all_positive) {
        x.setZero();
        for (size_t i = 0; i < idx.size(); ++i) x(idx[i]) = z(static_cast<int>(i));
        break;
      }
      // Step back toward the previous feasible point, drop a zeroed variable.
      double alpha = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < idx.size(); ++i) {
        const double zi = z(static_cast<int>(i));
        if (zi <= 0.0) {
          const double xi = x(idx[i]);
          alpha = std::min(alpha, xi / (xi - zi));
        }
      }
      for (size_t i = 0; i < idx.size(); ++i) {
        x(idx[i]) += alpha * (z(static_cast<int>(i)) - x(idx[i]));
        if (x(idx[i]) <= 1e-14) {
          x(idx[i]) = 0.0;
          passive[static_cast<size_t>(idx[i])] = false;
        }
      }
    }
  }
  return x;
}

KktResiduals kkt_check(const JacobianEstimate& estimate,
                       const FeedbackFeatureVector& desired_change,
                       const ConstraintSet& constraints, const ActuationDelta& candidate) {
  const Mat& J = estimate.matrix();
  const Vec& d = desired_change.values();
  const Vec& x = candidate.values();
  if (J.rows() != d.size() || J.cols() != constraints.dim() || x.size() != J.cols()) {
    throw std::invalid_argument("kkt_check: dimension mismatch");
  }

  const StackedConstraints sc(constraints);
  const double mu = tie_break_weight(J);
  const Vec grad = 2.0 * J.transpose() * (J * x - d) + 2.0 * mu * x;

  KktResiduals res;
  const Vec slack = sc.h - sc.G * x;
  res.feasibility = std::max(0.0, -slack.minCoeff());

  const double act_tol = 1e-7 * (1.0 + sc.h.cwiseAbs().maxCoeff() + x.norm());
  std::vector<int> active;
  for (int i = 0; i < slack.size(); ++i) {
    if (slack(i) <= act_tol) active.push_back(i);
  }

  if (active.empty()) {
    res.stationarity = grad.norm();
    res.complementarity = 0.0;
    return res;
  }
  const Mat Ca = active_rows(sc, active);  // k x n
  const Vec lambda = nonnegative_least_squares(Ca.transpose(), -grad);
  res.stationarity = (Ca.transpose() * lambda + grad).norm();
  double comp = 0.0;
  for (size_t i = 0; i < active.size(); ++i) {
    comp = std::max(comp, std::abs(lambda(static_cast<int>(i)) * slack(active[i])));
  }
  res.complementarity = comp;
  return res;
}

StepSolution solve_step(const JacobianEstimate& estimate,
                        const FeedbackFeatureVector& desired_change,
                        const ConstraintSet& constraints, int max_iterations) {
  const Mat& J = estimate.matrix();
  const Vec& d = desired_change.values();
  const int n = static_cast<int>(J.cols());
  const int rows = static_cast<int>(J.rows());
  if (rows != d.size()) {
    throw std::invalid_argument("solve_step: target dimension does not match estimate rows");
  }
  if (constraints.dim() != n) {
    throw std::invalid_argument("solve_step: constraint dimension does not match estimate cols");
  }
  if (n < rows) {
    throw std::invalid_argument("solve_step: estimate must be wide or square (n >= N)");
  }
  require_finite(d, "solve_step target");

  const StackedConstraints sc(constraints);
  const int m = static_cast<int>(sc.G.rows());
  if (max_iterations <= 0) max_iterations = 50 * (m + 1);

  // Stacked least-squares form of the regularized objective,
  //   || [J; sqrt(mu) I] z - [d; 0] ||^2,
  // solved by QR per subproblem: well conditioned for any scale of J, unlike
  // the normal-equations Hessian.
  const double mu = tie_break_weight(J);
  Mat aug(rows + n, n);
  aug.topRows(rows) = J;
  aug.bottomRows(n) = std::sqrt(mu) * Mat::Identity(n, n);
  Vec rhs = Vec::Zero(rows + n);
  rhs.head(rows) = d;

  auto gradient = [&](const Vec& x) -> Vec {
    return 2.0 * J.transpose() * (J * x - d) + 2.0 * mu * x;
  };

  Vec x = Vec::Zero(n);
  std::vector<int> working;

  bool certified = false;
  for (int iter = 0; iter < max_iterations; ++iter) {
    // Minimizer restricted to the working set's null space.
    Vec p = Vec::Zero(n);
    if (working.empty()) {
      p = aug.colPivHouseholderQr().solve(rhs) - x;
    } else {
      const Mat C = active_rows(sc, working);
      const Mat Z = Eigen::FullPivLU<Mat>(C).kernel();
      if (Z.cols() > 0 && Z.cwiseAbs().maxCoeff() > 0.0) {
        const Mat augZ = aug * Z;
        const Vec y = augZ.colPivHouseholderQr().solve(rhs - aug * x);
        p = Z * y;
      }
    }

    if (p.lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
      if (working.empty()) {
        certified = true;
        break;
      }
      const Mat C = active_rows(sc, working);
      const Vec grad = gradient(x);
      const Vec lambda = C.transpose().colPivHouseholderQr().solve(-grad);
      int most_negative = -1;
      double min_lambda = -1e-9 * (1.0 + grad.norm());
      for (int i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < min_lambda) {
          min_lambda = lambda(i);
          most_negative = i;
        }
      }
      if (most_negative < 0) {
        certified = true;
        break;
      }
      working.erase(working.begin() + most_negative);
      continue;
    }

    // Longest feasible step along p; add the blocking constraint if any.
    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < m; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      const double slope = sc.G.row(i).dot(p);
      if (slope <= 1e-14 * (1.0 + p.norm())) continue;
      const double ai = (sc.h(i) - sc.G.row(i).dot(x)) / slope;
      if (ai < alpha) {
        alpha = std::max(ai, 0.0);
        blocking = i;
      }
    }
    x += alpha * p;
    if (blocking >= 0) working.push_back(blocking);
  }

  StepSolution sol{ActuationDelta(x), (J * x - d).squaredNorm(), 0.0, working};
  const KktResiduals kkt = kkt_check(estimate, desired_change, constraints, sol.delta_theta);
  sol.kkt_residual = kkt.max();
  if (!certified || sol.kkt_residual > 1e-6) {
    throw SolverFailure("solve_step: no KKT certificate within the iteration budget",
                        std::move(sol));
  }
  return sol;
}

}  // namespace cmservo
