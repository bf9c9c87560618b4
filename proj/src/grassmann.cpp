#include "grom/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grom/errors.hpp"

namespace grom {

namespace {
constexpr double kOrthonormalTol = 1e-10;
constexpr double kCutLocusTol = 1e-10;
constexpr double kHorizontalTol = 1e-6;

void require_same_shape(const StiefelPoint& y0, const StiefelPoint& y1, const char* op) {
  if (y0.n() != y1.n() || y0.q() != y1.q()) {
    throw ValidationError(std::string(op) + ": shape mismatch, " + std::to_string(y0.n()) + "x" +
                          std::to_string(y0.q()) + " vs " + std::to_string(y1.n()) + "x" +
                          std::to_string(y1.q()));
  }
}
}  // namespace

StiefelPoint::StiefelPoint(Eigen::MatrixXd y) : y_(std::move(y)) {
  if (y_.cols() < 1 || y_.cols() > y_.rows()) {
    throw ValidationError("StiefelPoint: need 1 <= q <= n, got " + std::to_string(y_.rows()) +
                          "x" + std::to_string(y_.cols()));
  }
  const Eigen::MatrixXd gram = y_.transpose() * y_;
  const double defect =
      (gram - Eigen::MatrixXd::Identity(y_.cols(), y_.cols())).norm();
  if (!(defect <= kOrthonormalTol)) {
    throw ValidationError("StiefelPoint: columns not orthonormal, ||y'y - I||_F = " +
                          std::to_string(defect));
  }
}

Eigen::VectorXd principal_angles(const StiefelPoint& y0, const StiefelPoint& y1) {
  require_same_shape(y0, y1, "principal_angles");
  const Eigen::Index q = y0.q();

  const Eigen::MatrixXd a = y0.matrix().transpose() * y1.matrix();
  Eigen::VectorXd cosines =
      Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();  // nonincreasing
  // Sines of the same angles, from the orthogonal complement part.
  const Eigen::MatrixXd b = y1.matrix() - y0.matrix() * a;
  Eigen::VectorXd sines = Eigen::JacobiSVD<Eigen::MatrixXd>(b).singularValues();

  Eigen::VectorXd theta(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double c = std::clamp(cosines(i), -1.0, 1.0);
    const double s = std::clamp(sines(q - 1 - i), 0.0, 1.0);  // pair ascending sine
    // Small angles: arccos loses half the digits (arccos(1-e) ~ sqrt(2e)),
    // so take the sine branch there; large angles symmetrically need arccos.
    theta(i) = (c * c > 0.5) ? std::asin(s) : std::acos(c);
  }
  std::sort(theta.data(), theta.data() + q);
  return theta;
}

TangentVector grassmann_log(const StiefelPoint& y0, const StiefelPoint& y1) {
  require_same_shape(y0, y1, "grassmann_log");
  const Eigen::MatrixXd a = y0.matrix().transpose() * y1.matrix();
  Eigen::JacobiSVD<Eigen::MatrixXd> asvd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = asvd.singularValues().minCoeff();
  if (smin < kCutLocusTol) {
    throw NumericalError("grassmann_log: subspaces at the cut locus, sigma_min(y0'y1) = " +
                         std::to_string(smin));
  }
  const Eigen::MatrixXd a_inv = asvd.matrixV() *
                                asvd.singularValues().cwiseInverse().asDiagonal() *
                                asvd.matrixU().transpose();
  const Eigen::MatrixXd m = (y1.matrix() - y0.matrix() * a) * a_inv;

  Eigen::BDCSVD<Eigen::MatrixXd> msvd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd angles = msvd.singularValues().array().atan();
  Eigen::MatrixXd gamma = msvd.matrixU() * angles.asDiagonal() * msvd.matrixV().transpose();
  return TangentVector{std::move(gamma), y0};
}

StiefelPoint grassmann_exp(const StiefelPoint& y0, const TangentVector& tangent) {
  const Eigen::MatrixXd& gamma = tangent.gamma;
  if (gamma.rows() != y0.n() || gamma.cols() != y0.q()) {
    throw ValidationError("grassmann_exp: tangent is " + std::to_string(gamma.rows()) + "x" +
                          std::to_string(gamma.cols()) + ", base is " + std::to_string(y0.n()) +
                          "x" + std::to_string(y0.q()));
  }
  const double horizontal_defect = (y0.matrix().transpose() * gamma).norm();
  if (horizontal_defect > kHorizontalTol * std::max(1.0, gamma.norm())) {
    throw ValidationError("grassmann_exp: tangent not horizontal at base, ||y0'gamma|| = " +
                          std::to_string(horizontal_defect));
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(gamma, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const Eigen::MatrixXd& u = svd.matrixU();
  const Eigen::MatrixXd& v = svd.matrixV();
  Eigen::MatrixXd y = y0.matrix() * v * s.array().cos().matrix().asDiagonal() * v.transpose() +
                      u * s.array().sin().matrix().asDiagonal() * v.transpose();

  // Exact arithmetic already gives orthonormal columns; thin QR only absorbs
  // rounding drift. Forcing diag(R) > 0 keeps the map deterministic.
  const Eigen::Index n = y.rows(), q = y.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  Eigen::MatrixXd qthin = qr.householderQ() * Eigen::MatrixXd::Identity(n, q);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(q, q);
  for (Eigen::Index j = 0; j < q; ++j) {
    if (r(j, j) < 0.0) qthin.col(j) = -qthin.col(j);
  }
  return StiefelPoint(std::move(qthin));
}

double geodesic_distance(const StiefelPoint& y0, const StiefelPoint& y1) {
  return principal_angles(y0, y1).norm();
}

Eigen::MatrixXd procrustes_align(const Eigen::MatrixXd& target, const StiefelPoint& source) {
  if (target.rows() != source.n() || target.cols() != source.q()) {
    throw ValidationError("procrustes_align: target is " + std::to_string(target.rows()) + "x" +
                          std::to_string(target.cols()) + ", source is " +
                          std::to_string(source.n()) + "x" + std::to_string(source.q()));
  }
  const Eigen::MatrixXd m = source.matrix().transpose() * target;
  if (m.norm() == 0.0) {
    throw NumericalError("procrustes_align: zero cross-Gramian, alignment undefined");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace grom
