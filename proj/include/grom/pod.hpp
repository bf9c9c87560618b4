#pragma once

#include <Eigen/Dense>

#include "grom/snapshot.hpp"

namespace grom {

// Truncated POD of one fluctuation matrix: data ~ phi * diag(sigma) * psi'.
struct PodTriplet {
  double parameter = 0.0;
  Eigen::MatrixXd phi;          // N_x x q spatial modes, orthonormal columns
  Eigen::VectorXd sigma;        // q singular values, nonincreasing, positive
  Eigen::MatrixXd psi;          // N_s x q temporal modes, orthonormal columns
  Eigen::VectorXd eigenvalues;  // full spectrum lambda_i = sigma_i^2, min(N_x, N_s) entries
};

// Thin SVD of the fluctuation matrix truncated to rank q. Sign convention:
// the largest-magnitude entry of each spatial mode is forced positive (the
// temporal mode flips with it), which makes the result bit-deterministic.
// Throws NumericalError when q exceeds the numerical rank (singular values
// at or below 1e-12 * sigma_1 do not count), naming the largest admissible q.
PodTriplet pod_decompose(const SnapshotSet& fluct, int q);

// Relative information content RIC^k = sum_{i<=k} lambda_i / sum_i lambda_i
// (k is 1-based). Throws NumericalError on an all-zero spectrum.
double ric(const Eigen::VectorXd& eigenvalues, int k);

// Smallest k with RIC^k >= threshold, 0 < threshold <= 1.
int rank_for_ric(const Eigen::VectorXd& eigenvalues, double threshold);

}  // namespace grom
