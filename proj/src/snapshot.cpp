#include "grom/snapshot.hpp"

#include <cmath>

#include "grom/errors.hpp"

namespace grom {

void SnapshotSet::validate() const {
  if (data.rows() < 1 || data.cols() < 2) {
    throw ValidationError("SnapshotSet '" + field_name + "': need at least 1 row and 2 snapshots, got " +
                          std::to_string(data.rows()) + "x" + std::to_string(data.cols()));
  }
  if (times.size() != data.cols()) {
    throw ValidationError("SnapshotSet '" + field_name + "': " + std::to_string(times.size()) +
                          " time stamps for " + std::to_string(data.cols()) + " snapshot columns");
  }
  const double dt0 = times(1) - times(0);
  if (!(dt0 > 0.0)) {
    throw ValidationError("SnapshotSet '" + field_name + "': time grid is not strictly increasing");
  }
  for (Eigen::Index j = 1; j < times.size(); ++j) {
    const double dt = times(j) - times(j - 1);
    if (!(dt > 0.0) || std::abs(dt - dt0) > 1e-9 * std::abs(dt0)) {
      throw ValidationError("SnapshotSet '" + field_name + "': non-uniform time grid at index " +
                            std::to_string(j));
    }
  }
  if (!data.allFinite() || !times.allFinite()) {
    throw ValidationError("SnapshotSet '" + field_name + "': non-finite entries");
  }
}

MeanField compute_global_mean(const std::vector<SnapshotSet>& sets) {
  if (sets.empty()) {
    throw ValidationError("compute_global_mean: empty snapshot list");
  }
  const auto& first = sets.front();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(first.data.rows());
  Eigen::Index total = 0;
  for (const auto& s : sets) {
    s.validate();
    if (s.field_name != first.field_name) {
      throw ValidationError("compute_global_mean: mixed fields '" + first.field_name + "' and '" +
                            s.field_name + "'");
    }
    if (s.data.rows() != first.data.rows() || s.times.size() != first.times.size() ||
        (s.times - first.times).cwiseAbs().maxCoeff() > 1e-12) {
      throw ValidationError("compute_global_mean: snapshot sets disagree on grid shape");
    }
    acc += s.data.rowwise().sum();
    total += s.data.cols();
  }
  return MeanField{first.field_name, acc / static_cast<double>(total)};
}

SnapshotSet subtract_mean(const SnapshotSet& set, const MeanField& mean) {
  set.validate();
  if (mean.values.size() != set.data.rows()) {
    throw ValidationError("subtract_mean: mean has " + std::to_string(mean.values.size()) +
                          " entries, snapshots have " + std::to_string(set.data.rows()) + " rows");
  }
  SnapshotSet out = set;
  out.data.colwise() -= mean.values;
  return out;
}

}  // namespace grom
