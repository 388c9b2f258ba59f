#pragma once

// Independent oracles used by the tests. Everything here re-derives results
// from first principles (closed forms, enumeration, brute force) rather than
// calling the code paths under test.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Direct evaluation of the rank-1 update formula.
inline MatrixXd broyden_formula(const MatrixXd& J, double beta, const VectorXd& s,
                                const VectorXd& y) {
  MatrixXd out = J;
  double ss = 0.0;
  for (int i = 0; i < s.size(); ++i) ss += s(i) * s(i);
  for (int i = 0; i < J.rows(); ++i) {
    double ri = y(i);
    for (int j = 0; j < J.cols(); ++j) ri -= J(i, j) * s(j);
    for (int j = 0; j < J.cols(); ++j) out(i, j) += beta * ri * s(j) / ss;
  }
  return out;
}

// Circumcircle through three points; returns radius (infinite for collinear).
inline double circumradius(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                           const Eigen::Vector2d& c) {
  const double area2 = std::abs((b.x() - a.x()) * (c.y() - a.y()) -
                                (b.y() - a.y()) * (c.x() - a.x()));
  if (area2 == 0.0) return std::numeric_limits<double>::infinity();
  return ((a - b).norm() * (b - c).norm() * (c - a).norm()) / (2.0 * area2);
}

// Analytic gradient of the three-point curvature objective w.r.t. the six
// stacked pixel coordinates (independent differentiation of the formula).
inline Eigen::Matrix<double, 1, 6> curvature_gradient(const Eigen::Vector2d& v1,
                                                      const Eigen::Vector2d& v2,
                                                      const Eigen::Vector2d& v3) {
  const Eigen::Vector2d d12 = v1 - v2;
  const Eigen::Vector2d d23 = v2 - v3;
  const Eigen::Vector2d d31 = v3 - v1;
  const double a = d12.norm(), b = d23.norm(), c = d31.norm();
  const double cross = d12.x() * d23.y() - d12.y() * d23.x();
  const double sign = cross >= 0.0 ? 1.0 : -1.0;

  // kappa = 2 |cross| / (a b c), with
  // cross = (x1-x2)(y2-y3) - (y1-y2)(x2-x3); differentiate term by term.
  Eigen::Matrix<double, 1, 6> dcross;
  dcross << (v2.y() - v3.y()), -(v2.x() - v3.x()),
      -(v2.y() - v3.y()) - (v1.y() - v2.y()), (v1.x() - v2.x()) + (v2.x() - v3.x()),
      (v1.y() - v2.y()), -(v1.x() - v2.x());

  Eigen::Matrix<double, 1, 6> da = Eigen::Matrix<double, 1, 6>::Zero();
  da.segment<2>(0) = (d12 / a).transpose();
  da.segment<2>(2) = (-d12 / a).transpose();
  Eigen::Matrix<double, 1, 6> db = Eigen::Matrix<double, 1, 6>::Zero();
  db.segment<2>(2) = (d23 / b).transpose();
  db.segment<2>(4) = (-d23 / b).transpose();
  Eigen::Matrix<double, 1, 6> dc = Eigen::Matrix<double, 1, 6>::Zero();
  dc.segment<2>(4) = (d31 / c).transpose();
  dc.segment<2>(0) = (-d31 / c).transpose();

  const double abc = a * b * c;
  const double kappa = 2.0 * std::abs(cross) / abc;
  return (2.0 * sign / abc) * dcross - kappa * (da / a + db / b + dc / c);
}

// Analytic d r / d theta of the constant-curvature backbone point at arc
// length fraction s (theta away from the straight configuration).
inline Eigen::Matrix3d cc_point_jacobian(double length, double gain,
                                         const Eigen::Vector3d& theta, double s) {
  const double a = theta(0), b = theta(1), roll = theta(2);
  const double m = std::hypot(a, b);
  const double kappa = gain * m;
  const double phi = std::atan2(b, a) + roll;
  const double arc = s * length;
  const double u = (1.0 - std::cos(kappa * arc)) / kappa;
  const double du_dk = (arc * std::sin(kappa * arc) * kappa - (1.0 - std::cos(kappa * arc))) /
                       (kappa * kappa);
  const double dw_dk = (arc * std::cos(kappa * arc) * kappa - std::sin(kappa * arc)) /
                       (kappa * kappa);
  const Eigen::Vector3d dk(gain * a / m, gain * b / m, 0.0);
  const Eigen::Vector3d dphi(-b / (m * m), a / (m * m), 1.0);

  Eigen::Matrix3d jac;
  for (int j = 0; j < 3; ++j) {
    jac(0, j) = du_dk * dk(j) * std::cos(phi) - u * std::sin(phi) * dphi(j);
    jac(1, j) = du_dk * dk(j) * std::sin(phi) + u * std::cos(phi) * dphi(j);
    jac(2, j) = dw_dk * dk(j);
  }
  return jac;
}

// Analytic d v / d r of the pin-hole projection at world point r.
inline Eigen::Matrix<double, 2, 3> pinhole_jacobian(const Eigen::Matrix<double, 3, 4>& P,
                                                    const Eigen::Vector3d& r) {
  Eigen::Vector4d rh;
  rh << r, 1.0;
  const Eigen::Vector3d g = P * rh;
  Eigen::Matrix<double, 2, 3> jac;
  for (int k = 0; k < 3; ++k) {
    jac(0, k) = (P(0, k) * g(2) - g(0) * P(2, k)) / (g(2) * g(2));
    jac(1, k) = (P(1, k) * g(2) - g(1) * P(2, k)) / (g(2) * g(2));
  }
  return jac;
}

// Full analytic feature Jacobian (2M x 3) of the free-space pipeline:
// constant-curvature backbone composed with the pin-hole projection.
inline MatrixXd analytic_feature_jacobian(double length, double gain,
                                          const std::vector<double>& fractions,
                                          const Eigen::Matrix<double, 3, 4>& P,
                                          const Eigen::Vector3d& theta) {
  MatrixXd jac(2 * static_cast<int>(fractions.size()), 3);
  for (size_t i = 0; i < fractions.size(); ++i) {
    const double a = theta(0), b = theta(1), roll = theta(2);
    const double m = std::hypot(a, b);
    const double kappa = gain * m;
    const double phi = std::atan2(b, a) + roll;
    const double arc = fractions[i] * length;
    const double u = (1.0 - std::cos(kappa * arc)) / kappa;
    const Eigen::Vector3d r(u * std::cos(phi), u * std::sin(phi), std::sin(kappa * arc) / kappa);
    jac.middleRows<2>(2 * static_cast<int>(i)) =
        pinhole_jacobian(P, r) * cc_point_jacobian(length, gain, theta, fractions[i]);
  }
  return jac;
}

// Exhaustive active-set enumeration for the convex QP
//   min ||J x - d||^2 + mu ||x||^2  s.t.  G x <= h,
// exact up to linear-solve round-off. Returns the best objective (without the
// mu term, matching the solver's reported objective).
inline double qp_enumeration(const MatrixXd& J, const VectorXd& d, const MatrixXd& G,
                             const VectorXd& h, double mu, VectorXd* argmin = nullptr) {
  const int n = static_cast<int>(J.cols());
  const int m = static_cast<int>(G.rows());
  const MatrixXd H = 2.0 * (J.transpose() * J + mu * MatrixXd::Identity(n, n));
  const VectorXd g0 = -2.0 * J.transpose() * d;

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> subset;
  auto try_subset = [&](const std::vector<int>& active) {
    const int k = static_cast<int>(active.size());
    MatrixXd kkt(n + k, n + k);
    kkt.setZero();
    kkt.topLeftCorner(n, n) = H;
    VectorXd rhs(n + k);
    rhs.head(n) = -g0;
    for (int i = 0; i < k; ++i) {
      kkt.block(n + i, 0, 1, n) = G.row(active[static_cast<size_t>(i)]);
      kkt.block(0, n + i, n, 1) = G.row(active[static_cast<size_t>(i)]).transpose();
      rhs(n + i) = h(active[static_cast<size_t>(i)]);
    }
    const Eigen::FullPivLU<MatrixXd> lu(kkt);
    if (!lu.isInvertible()) return;
    const VectorXd sol = lu.solve(rhs);
    const VectorXd x = sol.head(n);
    const VectorXd lambda = sol.tail(k);
    if (lambda.size() > 0 && lambda.minCoeff() < -1e-9) return;
    if (m > 0 && ((G * x - h).array() > 1e-9).any()) return;
    const double obj = (J * x - d).squaredNorm();
    if (obj < best) {
      best = obj;
      if (argmin) *argmin = x;
    }
  };

  const int subsets = 1 << m;
  for (int mask = 0; mask < subsets; ++mask) {
    subset.clear();
    for (int i = 0; i < m; ++i) {
      if (mask & (1 << i)) subset.push_back(i);
    }
    if (static_cast<int>(subset.size()) > n) continue;
    try_subset(subset);
  }
  return best;
}

}  // namespace oracle
