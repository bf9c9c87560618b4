#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace grom {

// A matrix of solution snapshots for one parameter value: column j holds the
// spatial field at times(j).
struct SnapshotSet {
  std::string field_name;
  double parameter = 0.0;
  Eigen::VectorXd times;  // strictly increasing, uniform spacing
  Eigen::MatrixXd data;   // n_x rows, times.size() columns

  // Throws ValidationError on shape mismatch, non-uniform or non-increasing
  // time grid, or non-finite entries.
  void validate() const;
};

// Temporal mean field shared by every parameter in a training set.
struct MeanField {
  std::string field_name;
  Eigen::VectorXd values;
};

// Mean over all columns of all sets (one global mean, not per-parameter).
// All sets must share field_name, row count and time grid.
MeanField compute_global_mean(const std::vector<SnapshotSet>& sets);

// Subtracts the mean from every column.
SnapshotSet subtract_mean(const SnapshotSet& set, const MeanField& mean);

}  // namespace grom
