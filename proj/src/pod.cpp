#include "grom/pod.hpp"

#include <cmath>
#include <string>

#include "grom/errors.hpp"

namespace grom {

PodTriplet pod_decompose(const SnapshotSet& fluct, int q) {
  fluct.validate();
  const Eigen::Index max_rank = std::min(fluct.data.rows(), fluct.data.cols());
  if (q < 1 || q > max_rank) {
    throw ValidationError("pod_decompose: rank " + std::to_string(q) + " outside [1, " +
                          std::to_string(max_rank) + "]");
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(fluct.data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double floor = 1e-12 * s(0);
  Eigen::Index numerical_rank = 0;
  while (numerical_rank < max_rank && s(numerical_rank) > floor) ++numerical_rank;
  if (q > numerical_rank) {
    throw NumericalError("pod_decompose: requested rank " + std::to_string(q) +
                         " exceeds numerical rank; largest admissible q is " +
                         std::to_string(numerical_rank));
  }

  PodTriplet t;
  t.parameter = fluct.parameter;
  t.phi = svd.matrixU().leftCols(q);
  t.sigma = s.head(q);
  t.psi = svd.matrixV().leftCols(q);
  t.eigenvalues = s.array().square();

  // Fix the SVD sign ambiguity: largest-|entry| of each spatial mode positive.
  for (Eigen::Index j = 0; j < t.phi.cols(); ++j) {
    Eigen::Index imax = 0;
    t.phi.col(j).cwiseAbs().maxCoeff(&imax);
    if (t.phi(imax, j) < 0.0) {
      t.phi.col(j) = -t.phi.col(j);
      t.psi.col(j) = -t.psi.col(j);
    }
  }
  return t;
}

namespace {
double spectrum_total(const Eigen::VectorXd& eigenvalues) {
  if (eigenvalues.size() == 0) {
    throw ValidationError("ric: empty spectrum");
  }
  if ((eigenvalues.array() < 0.0).any()) {
    throw ValidationError("ric: negative eigenvalue in spectrum");
  }
  const double total = eigenvalues.sum();
  if (total == 0.0) {
    throw NumericalError("ric: all-zero spectrum, RIC undefined");
  }
  return total;
}
}  // namespace

double ric(const Eigen::VectorXd& eigenvalues, int k) {
  const double total = spectrum_total(eigenvalues);
  if (k < 1 || k > eigenvalues.size()) {
    throw ValidationError("ric: k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(eigenvalues.size()) + "]");
  }
  return eigenvalues.head(k).sum() / total;
}

int rank_for_ric(const Eigen::VectorXd& eigenvalues, double threshold) {
  if (!(threshold > 0.0) || !(threshold <= 1.0)) {
    throw ValidationError("rank_for_ric: threshold must lie in (0, 1], got " +
                          std::to_string(threshold));
  }
  const double total = spectrum_total(eigenvalues);
  double partial = 0.0;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    partial += eigenvalues(k);
    if (partial / total >= threshold) return static_cast<int>(k + 1);
  }
  return static_cast<int>(eigenvalues.size());  // threshold <= 1 always reached
}

}  // namespace grom
