#include "grom/interp1d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "grom/errors.hpp"

namespace grom {

void InterpNodes::validate() const {
  if (xs.size() != ys.size()) {
    throw ValidationError("InterpNodes: " + std::to_string(xs.size()) + " abscissae vs " +
                          std::to_string(ys.size()) + " ordinates");
  }
  if (xs.size() < 2) {
    throw ValidationError("InterpNodes: need at least 2 nodes, got " + std::to_string(xs.size()));
  }
  for (Eigen::Index i = 1; i < xs.size(); ++i) {
    if (!(xs(i) > xs(i - 1))) {
      throw ValidationError("InterpNodes: abscissae not strictly increasing at index " +
                            std::to_string(i));
    }
  }
}

std::vector<Eigen::Index> k_nearest(const Eigen::VectorXd& xs, double x, int k) {
  if (k < 1 || static_cast<Eigen::Index>(k) > xs.size()) {
    throw ValidationError("k_nearest: k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(xs.size()) + "]");
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(xs.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double da = std::abs(xs(a) - x);
    const double db = std::abs(xs(b) - x);
    if (da != db) return da < db;
    return xs(a) < xs(b);  // tie: prefer the smaller abscissa
  });
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return xs(a) < xs(b); });
  return idx;
}

namespace {

Eigen::VectorXd lagrange_weights(const Eigen::VectorXd& xs, double x) {
  const Eigen::Index n = xs.size();
  Eigen::VectorXd w(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double p = 1.0;
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m != j) p *= (x - xs(m)) / (xs(j) - xs(m));
    }
    w(j) = p;
  }
  return w;
}

Eigen::VectorXd idw_weights(const Eigen::VectorXd& xs, double x, double power) {
  const Eigen::Index n = xs.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (xs(j) == x) {  // coincidence: indicator weights, exact node value
      w(j) = 1.0;
      return w;
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    w(j) = std::pow(std::abs(x - xs(j)), -power);
  }
  return w / w.sum();
}

// Second derivatives M of the natural cubic spline via the standard
// tridiagonal system; M(0) = M(n-1) = 0. Two nodes give the all-zero vector
// (the spline is the connecting line).
Eigen::VectorXd natural_spline_second_derivs(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) {
  const Eigen::Index n = xs.size();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  const Eigen::Index k = n - 2;  // interior unknowns
  if (k <= 0) return m;

  Eigen::VectorXd diag(k), rhs(k), sub(k), sup(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double h0 = xs(i + 1) - xs(i);
    const double h1 = xs(i + 2) - xs(i + 1);
    sub(i) = h0;
    diag(i) = 2.0 * (h0 + h1);
    sup(i) = h1;
    rhs(i) = 6.0 * ((ys(i + 2) - ys(i + 1)) / h1 - (ys(i + 1) - ys(i)) / h0);
  }
  // Thomas elimination; the system is strictly diagonally dominant.
  for (Eigen::Index i = 1; i < k; ++i) {
    const double f = sub(i) / diag(i - 1);
    diag(i) -= f * sup(i - 1);
    rhs(i) -= f * rhs(i - 1);
  }
  m(k) = rhs(k - 1) / diag(k - 1);
  for (Eigen::Index i = k - 2; i >= 0; --i) {
    m(i + 1) = (rhs(i) - sup(i) * m(i + 2)) / diag(i);
  }
  return m;
}

double spline_value(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                    const Eigen::VectorXd& m, double x) {
  const Eigen::Index n = xs.size();
  if (x <= xs(0)) {  // linear extrapolation with the end slope
    const double h = xs(1) - xs(0);
    const double slope = (ys(1) - ys(0)) / h - h * (2.0 * m(0) + m(1)) / 6.0;
    return ys(0) + slope * (x - xs(0));
  }
  if (x >= xs(n - 1)) {
    const double h = xs(n - 1) - xs(n - 2);
    const double slope = (ys(n - 1) - ys(n - 2)) / h + h * (2.0 * m(n - 1) + m(n - 2)) / 6.0;
    return ys(n - 1) + slope * (x - xs(n - 1));
  }
  // Interval containing x: xs(i) < x <= xs(i+1).
  const double* begin = xs.data();
  Eigen::Index i = std::upper_bound(begin, begin + n, x) - begin - 1;
  i = std::min(i, n - 2);
  const double h = xs(i + 1) - xs(i);
  const double a = (xs(i + 1) - x) / h;
  const double b = (x - xs(i)) / h;
  return a * ys(i) + b * ys(i + 1) +
         ((a * a * a - a) * m(i) + (b * b * b - b) * m(i + 1)) * h * h / 6.0;
}

}  // namespace

double lagrange_eval(const InterpNodes& nodes, double x) {
  nodes.validate();
  return lagrange_weights(nodes.xs, x).dot(nodes.ys);
}

double idw_eval(const InterpNodes& nodes, double x, double power) {
  nodes.validate();
  if (!(power > 0.0)) {
    throw ValidationError("idw_eval: power must be positive, got " + std::to_string(power));
  }
  return idw_weights(nodes.xs, x, power).dot(nodes.ys);
}

NaturalCubicSpline::NaturalCubicSpline(InterpNodes nodes) : nodes_(std::move(nodes)) {
  nodes_.validate();
  if (nodes_.xs.size() < 3) {
    throw ValidationError("NaturalCubicSpline: need at least 3 nodes, got " +
                          std::to_string(nodes_.xs.size()));
  }
  second_derivs_ = natural_spline_second_derivs(nodes_.xs, nodes_.ys);
}

double NaturalCubicSpline::operator()(double x) const {
  return spline_value(nodes_.xs, nodes_.ys, second_derivs_, x);
}

double cubic_spline_eval(const InterpNodes& nodes, double x) {
  return NaturalCubicSpline(nodes)(x);
}

Eigen::VectorXd interp_weights(InterpKind kind, const Eigen::VectorXd& xs, double x,
                               double idw_power) {
  if (xs.size() < 2) {
    throw ValidationError("interp_weights: need at least 2 nodes");
  }
  switch (kind) {
    case InterpKind::Lagrange:
      return lagrange_weights(xs, x);
    case InterpKind::InverseDistance:
      return idw_weights(xs, x, idw_power);
    case InterpKind::CubicSpline: {
      if (xs.size() < 3) {
        throw ValidationError("interp_weights: cubic spline needs at least 3 nodes");
      }
      // The spline is linear in the ordinates; its weights are the spline
      // evaluations through the unit data vectors.
      const Eigen::Index n = xs.size();
      Eigen::VectorXd w(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
        w(j) = spline_value(xs, e, natural_spline_second_derivs(xs, e), x);
      }
      return w;
    }
  }
  throw ValidationError("interp_weights: unknown interpolator kind");
}

}  // namespace grom
