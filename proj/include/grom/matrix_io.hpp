#pragma once

#include <Eigen/Dense>
#include <filesystem>

namespace grom {

// Binary matrix container used for every on-disk array.
//
// Layout (little-endian throughout):
//   bytes 0..3   magic "GROM"
//   bytes 4..7   uint32 format version (currently 1)
//   bytes 8..15  uint64 rows
//   bytes 16..23 uint64 cols
//   payload      rows*cols float64, column-major
//
// Vectors are stored as n x 1 matrices. Writes go through a temp file plus
// atomic rename so readers never observe a half-written artifact.
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

// Throws StorageError when the file cannot be opened, FormatError on bad
// magic, unsupported version, or a payload shorter than the header promises.
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

Eigen::VectorXd read_vector(const std::filesystem::path& path);

}  // namespace grom
