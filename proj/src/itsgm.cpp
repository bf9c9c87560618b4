#include "grom/itsgm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grom/errors.hpp"

namespace grom {

namespace {

void validate_config(const ItsgmConfig& cfg, std::size_t point_count) {
  const int min_neighbors = cfg.interpolator == InterpKind::CubicSpline ? 3 : 2;
  if (cfg.neighbor_count < min_neighbors) {
    throw ValidationError("itsgm: neighbor_count " + std::to_string(cfg.neighbor_count) +
                          " below minimum " + std::to_string(min_neighbors) +
                          " for the chosen interpolator");
  }
  if (static_cast<std::size_t>(cfg.neighbor_count) > point_count) {
    throw ValidationError("itsgm: neighbor_count " + std::to_string(cfg.neighbor_count) +
                          " exceeds training point count " + std::to_string(point_count));
  }
  if (cfg.reference_rule == ReferenceRule::FixedIndex &&
      (cfg.fixed_reference_index < 0 ||
       static_cast<std::size_t>(cfg.fixed_reference_index) >= point_count)) {
    throw ValidationError("itsgm: fixed reference index " +
                          std::to_string(cfg.fixed_reference_index) + " out of range");
  }
}

}  // namespace

StiefelPoint itsgm_interpolate(const std::vector<std::pair<double, StiefelPoint>>& points,
                               double query, const ItsgmConfig& config) {
  validate_config(config, points.size());

  Eigen::VectorXd params(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    params(static_cast<Eigen::Index>(i)) = points[i].first;
  }
  {
    Eigen::VectorXd sorted = params;
    std::sort(sorted.data(), sorted.data() + sorted.size());
    for (Eigen::Index i = 1; i < sorted.size(); ++i) {
      if (sorted(i) == sorted(i - 1)) {
        throw ValidationError("itsgm: duplicate training parameter " + std::to_string(sorted(i)));
      }
    }
  }

  std::size_t ref;
  if (config.reference_rule == ReferenceRule::FixedIndex) {
    ref = static_cast<std::size_t>(config.fixed_reference_index);
  } else {
    ref = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
      const double di = std::abs(params(static_cast<Eigen::Index>(i)) - query);
      const double dr = std::abs(params(static_cast<Eigen::Index>(ref)) - query);
      if (di < dr || (di == dr && points[i].first < points[ref].first)) ref = i;
    }
  }
  const StiefelPoint& y_ref = points[ref].second;

  std::vector<Eigen::Index> neighbors = k_nearest(params, query, config.neighbor_count);
  if (std::find(neighbors.begin(), neighbors.end(), static_cast<Eigen::Index>(ref)) ==
      neighbors.end()) {
    neighbors.push_back(static_cast<Eigen::Index>(ref));
    std::sort(neighbors.begin(), neighbors.end(),
              [&](Eigen::Index a, Eigen::Index b) { return params(a) < params(b); });
  }

  const Eigen::Index k = static_cast<Eigen::Index>(neighbors.size());
  Eigen::VectorXd xs(k);
  std::vector<Eigen::MatrixXd> tangents;
  tangents.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& [param, y] = points[static_cast<std::size_t>(neighbors[static_cast<std::size_t>(j)])];
    xs(j) = param;
    if (neighbors[static_cast<std::size_t>(j)] == static_cast<Eigen::Index>(ref)) {
      // The reference's own velocity is exactly zero; skipping the log keeps
      // node recovery at the reference exact.
      tangents.emplace_back(Eigen::MatrixXd::Zero(y_ref.n(), y_ref.q()));
      continue;
    }
    try {
      tangents.push_back(grassmann_log(y_ref, y).gamma);
    } catch (const NumericalError& e) {
      throw NumericalError("itsgm: log map failed for training parameter " +
                           std::to_string(param) + ": " + e.what());
    }
  }

  const Eigen::VectorXd w = interp_weights(config.interpolator, xs, query, config.idw_power);
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(y_ref.n(), y_ref.q());
  for (Eigen::Index j = 0; j < k; ++j) {
    gamma += w(j) * tangents[static_cast<std::size_t>(j)];
  }
  return grassmann_exp(y_ref, TangentVector{std::move(gamma), y_ref});
}

}  // namespace grom
