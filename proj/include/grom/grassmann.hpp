#pragma once

#include <Eigen/Dense>

namespace grom {

// Orthonormal n x q representative of a q-dimensional subspace of R^n.
// Construction enforces the representation invariant, so every algorithm
// below may assume orthonormal columns.
class StiefelPoint {
public:
  // Throws ValidationError when q > n, q < 1, or ||y'y - I||_F > 1e-10.
  explicit StiefelPoint(Eigen::MatrixXd y);

  const Eigen::MatrixXd& matrix() const { return y_; }
  Eigen::Index n() const { return y_.rows(); }
  Eigen::Index q() const { return y_.cols(); }

private:
  Eigen::MatrixXd y_;
};

// Initial geodesic velocity attached at a reference subspace; horizontal,
// i.e. reference' * gamma = 0.
struct TangentVector {
  Eigen::MatrixXd gamma;
  StiefelPoint reference;
};

// Principal angles in [0, pi/2], sorted nondecreasing. Cosines come from the
// SVD of y0'y1 and sines from the SVD of y1 - y0(y0'y1); each angle is taken
// from whichever function is better conditioned at that angle (arccos alone
// cannot resolve angles below ~1e-8).
Eigen::VectorXd principal_angles(const StiefelPoint& y0, const StiefelPoint& y1);

// Geodesic log map: Gamma = U atan(S) V' where (I - y0 y0') y1 (y0'y1)^-1
// has thin SVD U S V'. Throws NumericalError (cut locus) when
// sigma_min(y0'y1) < 1e-10.
TangentVector grassmann_log(const StiefelPoint& y0, const StiefelPoint& y1);

// Geodesic exp map: with gamma = U S V', Y = y0 V cos(S) V' + U sin(S) V',
// re-orthonormalized by thin QR with the diagonal of R forced positive.
// Throws ValidationError when gamma is not horizontal at y0 (violation
// above 1e-6).
StiefelPoint grassmann_exp(const StiefelPoint& y0, const TangentVector& gamma);

// sqrt(sum of squared principal angles); symmetric, zero iff equal spans.
double geodesic_distance(const StiefelPoint& y0, const StiefelPoint& y1);

// Orthogonal Procrustes: Q = argmax_Q trace(Q' source' target) over
// orthogonal q x q matrices, solved by the SVD of source' target = U S V',
// Q = U V'. source * Q is the representative of span(source) closest to
// target column-by-column. Throws NumericalError on a zero cross-Gramian.
Eigen::MatrixXd procrustes_align(const Eigen::MatrixXd& target, const StiefelPoint& source);

}  // namespace grom
