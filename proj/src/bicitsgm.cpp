#include "grom/bicitsgm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <string>

#include "grom/errors.hpp"
#include "grom/interp1d.hpp"

namespace grom {

namespace {

// Rethrows component failures with the pipeline stage named, preserving the
// error type so exit-code mapping still sees the original class.
template <class F>
auto at_stage(const char* stage, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(stage) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(stage) + ": " + e.what());
  }
}

}  // namespace

Eigen::VectorXd interpolate_singular_values(const TrainingDatabase& db, double query) {
  db.validate();
  const Eigen::VectorXd params = db.parameters();
  const Eigen::Index q = db.rank;
  const Eigen::Index np = params.size();

  const bool linear_fallback = np < 3;
  if (linear_fallback) {
    std::cerr << "warning: " << np
              << " training points; interpolating singular values linearly instead of by cubic spline\n";
  }

  Eigen::VectorXd result(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    Eigen::VectorXd ys(np);
    for (Eigen::Index k = 0; k < np; ++k) ys(k) = db.triplets[static_cast<std::size_t>(k)].sigma(i);
    const InterpNodes nodes{params, ys};
    result(i) = linear_fallback
                    ? lagrange_eval(nodes, query)  // two nodes: the chord
                    : cubic_spline_eval(nodes, query);
  }
  const double floor = 1e-14 * std::abs(result(0));
  result = result.cwiseMax(floor);
  return result;
}

Eigen::MatrixXd calibrate_basis(const StiefelPoint& interp,
                                const std::vector<std::pair<double, StiefelPoint>>& training,
                                double power) {
  if (training.empty()) {
    throw ValidationError("calibrate_basis: empty training list");
  }
  if (!(power > 0.0)) {
    throw ValidationError("calibrate_basis: power must be positive, got " + std::to_string(power));
  }
  for (const auto& [d, y] : training) {
    if (d < 0.0) {
      throw ValidationError("calibrate_basis: negative distance " + std::to_string(d));
    }
    if (y.n() != interp.n() || y.q() != interp.q()) {
      throw ValidationError("calibrate_basis: training basis shape mismatch");
    }
  }

  // Query sits on a training point: the inverse weight is singular and that
  // basis alone defines the alignment.
  for (const auto& [d, y] : training) {
    if (d == 0.0) {
      return procrustes_align(y.matrix(), interp);
    }
  }

  // Normalizing by the largest weight leaves Q unchanged (positive scaling
  // of the target does not move the Procrustes optimum) but keeps d^-power
  // away from overflow for queries close to a node.
  Eigen::VectorXd w(static_cast<Eigen::Index>(training.size()));
  for (std::size_t k = 0; k < training.size(); ++k) {
    w(static_cast<Eigen::Index>(k)) = std::pow(training[k].first, -power);
  }
  w /= w.maxCoeff();

  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(interp.n(), interp.q());
  for (std::size_t k = 0; k < training.size(); ++k) {
    target += w(static_cast<Eigen::Index>(k)) * training[k].second.matrix();
  }
  return procrustes_align(target, interp);
}

namespace {

std::vector<std::pair<double, StiefelPoint>> basis_points(const TrainingDatabase& db,
                                                          bool spatial) {
  std::vector<std::pair<double, StiefelPoint>> pts;
  pts.reserve(db.triplets.size());
  for (const auto& t : db.triplets) {
    pts.emplace_back(t.parameter, StiefelPoint(spatial ? t.phi : t.psi));
  }
  return pts;
}

// Calibration training list: (parameter distance, basis) for the chosen
// neighbor subset (0 = all training points).
std::vector<std::pair<double, StiefelPoint>> calibration_list(
    const std::vector<std::pair<double, StiefelPoint>>& pts, double query, int neighbor_count) {
  Eigen::VectorXd params(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) params(static_cast<Eigen::Index>(i)) = pts[i].first;

  std::vector<Eigen::Index> chosen;
  if (neighbor_count <= 0 || static_cast<std::size_t>(neighbor_count) >= pts.size()) {
    chosen.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) chosen[i] = static_cast<Eigen::Index>(i);
  } else {
    chosen = k_nearest(params, query, neighbor_count);
  }

  std::vector<std::pair<double, StiefelPoint>> out;
  out.reserve(chosen.size());
  for (const Eigen::Index i : chosen) {
    const auto& [param, y] = pts[static_cast<std::size_t>(i)];
    out.emplace_back(std::abs(query - param), y);
  }
  return out;
}

}  // namespace

PredictedSolution predict(const TrainingDatabase& db, double query,
                          const BiCitsgmConfig& config) {
  db.validate();
  const Eigen::VectorXd params = db.parameters();
  if (query < params(0) || query > params(params.size() - 1)) {
    std::cerr << "warning: query " << query << " outside training range [" << params(0) << ", "
              << params(params.size() - 1) << "]; extrapolating\n";
  }

  const auto t0 = std::chrono::steady_clock::now();

  const auto spatial_pts = basis_points(db, /*spatial=*/true);
  const auto temporal_pts = basis_points(db, /*spatial=*/false);

  const StiefelPoint phi_interp = at_stage(
      "predict[spatial itsgm]", [&] { return itsgm_interpolate(spatial_pts, query, config.spatial); });
  const StiefelPoint psi_interp = at_stage(
      "predict[temporal itsgm]", [&] { return itsgm_interpolate(temporal_pts, query, config.temporal); });
  const Eigen::VectorXd sigma = at_stage(
      "predict[singular values]", [&] { return interpolate_singular_values(db, query); });

  const Eigen::MatrixXd q_phi = at_stage("predict[spatial calibration]", [&] {
    return calibrate_basis(phi_interp, calibration_list(spatial_pts, query, config.calib_neighbor_count),
                           config.calib_power_spatial);
  });
  const Eigen::MatrixXd q_psi = at_stage("predict[temporal calibration]", [&] {
    return calibrate_basis(psi_interp, calibration_list(temporal_pts, query, config.calib_neighbor_count),
                           config.calib_power_temporal);
  });

  PredictedSolution out;
  out.parameter = query;
  out.phi_cal = phi_interp.matrix() * q_phi;
  out.psi_cal = psi_interp.matrix() * q_psi;
  out.sigma = sigma;
  out.reconstruction =
      (out.phi_cal * sigma.asDiagonal() * out.psi_cal.transpose()).colwise() + db.mean.values;

  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

double mean_relative_error(const SnapshotSet& truth, const SnapshotSet& approx,
                           const Eigen::VectorXd* quadrature_weights) {
  if (approx.times.size() != truth.times.size() ||
      (approx.times - truth.times).cwiseAbs().maxCoeff() > 1e-9) {
    throw ValidationError("mean_relative_error: time grids disagree");
  }
  return mean_relative_error(truth, approx.data, quadrature_weights);
}

double mean_relative_error(const SnapshotSet& truth, const Eigen::MatrixXd& approx_data,
                           const Eigen::VectorXd* quadrature_weights) {
  truth.validate();
  if (approx_data.rows() != truth.data.rows() || approx_data.cols() != truth.data.cols()) {
    throw ValidationError("mean_relative_error: shape mismatch");
  }
  const Eigen::Index ns = truth.data.cols();
  Eigen::VectorXd spatial_w = Eigen::VectorXd::Ones(truth.data.rows());
  if (quadrature_weights != nullptr) {
    if (quadrature_weights->size() != truth.data.rows() ||
        (quadrature_weights->array() <= 0.0).any()) {
      throw ValidationError("mean_relative_error: quadrature weights must be positive, one per row");
    }
    spatial_w = *quadrature_weights;
  }

  // Trapezoid weights on the uniform grid; the dt factor cancels in the ratio.
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < ns; ++j) {
    const double tw = (j == 0 || j == ns - 1) ? 0.5 : 1.0;
    num += tw * (truth.data.col(j) - approx_data.col(j)).cwiseAbs2().dot(spatial_w);
    den += tw * truth.data.col(j).cwiseAbs2().dot(spatial_w);
  }
  if (den == 0.0) {
    throw NumericalError("mean_relative_error: truth has zero norm, relative error undefined");
  }
  return 100.0 * std::sqrt(num / den);
}

}  // namespace grom
