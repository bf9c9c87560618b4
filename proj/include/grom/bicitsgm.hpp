#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "grom/database.hpp"
#include "grom/grassmann.hpp"
#include "grom/itsgm.hpp"
#include "grom/snapshot.hpp"

namespace grom {

struct BiCitsgmConfig {
  ItsgmConfig spatial;
  ItsgmConfig temporal;
  double calib_power_spatial = 3.0;   // m
  double calib_power_temporal = 3.0;  // l
  int calib_neighbor_count = 0;       // 0 = all training points
};

struct PredictedSolution {
  double parameter = 0.0;
  Eigen::MatrixXd phi_cal;        // N_x x q, calibrated spatial modes
  Eigen::VectorXd sigma;          // q interpolated singular values
  Eigen::MatrixXd psi_cal;        // N_s x q, calibrated temporal modes
  Eigen::MatrixXd reconstruction; // mean + phi_cal * diag(sigma) * psi_cal'
  double wall_time_s = 0.0;       // online stages only
};

// Per-index natural cubic spline of the training singular values over all
// training parameters, clamped below at 1e-14 * (interpolated sigma_1) to
// preserve positivity. With only two training points the spline degenerates
// to linear interpolation and a warning is logged.
Eigen::VectorXd interpolate_singular_values(const TrainingDatabase& db, double query);

// Weighted orthogonal Procrustes calibration: Q maximizes
// trace(Q' interp' T) with T = sum_k d_k^(-power) y_k, so interp * Q is the
// in-span representative best aligned with the weighted training family.
// A zero distance (query on a training point) short-circuits to plain
// Procrustes against that single basis, avoiding the singular weight.
Eigen::MatrixXd calibrate_basis(const StiefelPoint& interp,
                                const std::vector<std::pair<double, StiefelPoint>>& training,
                                double power);

// The full pipeline: (1) ITSGM of the spatial bases, (2) ITSGM of the
// temporal bases, (3) singular-value spline, (4) bi-calibration of both
// interpolated bases, (5) reconstruction with the mean added back.
// wall_time_s covers exactly these five stages (steady clock). Queries
// outside the training range trigger a logged warning, not an error.
PredictedSolution predict(const TrainingDatabase& db, double query,
                          const BiCitsgmConfig& config);

// Mean relative error in percent:
//   100 * sqrt( int ||f - f~||^2 dt ) / sqrt( int ||f||^2 dt ),
// time integrals by the trapezoidal rule on the uniform grid, spatial norm
// optionally weighted (quadrature_weights = nullptr means unweighted).
// Throws NumericalError when the truth has zero norm.
double mean_relative_error(const SnapshotSet& truth, const SnapshotSet& approx,
                           const Eigen::VectorXd* quadrature_weights = nullptr);
double mean_relative_error(const SnapshotSet& truth, const Eigen::MatrixXd& approx_data,
                           const Eigen::VectorXd* quadrature_weights = nullptr);

}  // namespace grom
