#pragma once

#include <Eigen/Dense>
#include <vector>

namespace grom {

enum class InterpKind { Lagrange, InverseDistance, CubicSpline };

// One-dimensional interpolation nodes with strictly increasing abscissae.
struct InterpNodes {
  Eigen::VectorXd xs;
  Eigen::VectorXd ys;

  // Throws ValidationError unless xs is strictly increasing, |xs| == |ys|,
  // and there are at least two nodes.
  void validate() const;
};

// Indices of the k nodes closest to x, ties resolved toward the smaller
// abscissa; the result is sorted by abscissa. Throws ValidationError when
// k < 1 or k exceeds the node count.
std::vector<Eigen::Index> k_nearest(const Eigen::VectorXd& xs, double x, int k);

// Global polynomial interpolation through all nodes (direct product formula,
// exactly node-reproducing in floating point).
double lagrange_eval(const InterpNodes& nodes, double x);

// Inverse-distance weighting with weights |x - xs(j)|^(-power), normalized to
// sum to one. Exact at nodes (coincidence short-circuits to the node value).
double idw_eval(const InterpNodes& nodes, double x, double power);

// Natural cubic spline (zero second derivative at both ends), linear
// extrapolation outside [xs(0), xs(n-1)] with the spline's end slope.
// Requires at least three nodes; fewer is a ValidationError.
class NaturalCubicSpline {
public:
  explicit NaturalCubicSpline(InterpNodes nodes);
  double operator()(double x) const;

private:
  InterpNodes nodes_;
  Eigen::VectorXd second_derivs_;
};

double cubic_spline_eval(const InterpNodes& nodes, double x);

// All three interpolants are linear in the data, so each reduces to a weight
// vector w with sum(w) == 1 and value == w.dot(ys). Matrix-valued
// interpolation (tangent matrices) reuses these weights entrywise.
Eigen::VectorXd interp_weights(InterpKind kind, const Eigen::VectorXd& xs, double x,
                               double idw_power = 3.0);

}  // namespace grom
