#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "grom/pod.hpp"
#include "grom/snapshot.hpp"

namespace grom {

// Trained reduced basis set for one field: global mean plus one POD triplet
// per training parameter, all truncated to the same rank.
struct TrainingDatabase {
  std::string field_name;
  int rank = 0;
  Eigen::VectorXd times;  // shared snapshot time grid
  MeanField mean;
  std::vector<PodTriplet> triplets;  // sorted by strictly increasing parameter

  Eigen::VectorXd parameters() const;
  void validate() const;
};

// Mean/fluctuation split plus per-parameter POD. Exactly one of rank > 0 or
// ric_threshold > 0 selects the truncation: a fixed q, or the smallest q
// whose relative information content reaches the threshold for every
// training parameter (the maximum over parameters).
TrainingDatabase train_database(const std::vector<SnapshotSet>& sets, int rank,
                                double ric_threshold = 0.0);

// On-disk description of a database directory. The eigenvalue spectra are
// kept in the manifest (full length, not just the truncated head) so RIC
// denominators survive a save/load roundtrip.
struct ManifestField {
  std::string name;
  int rank = 0;
  std::string mean_path;
  std::vector<std::string> triplet_dirs;
  std::vector<Eigen::VectorXd> eigenvalues;  // one full spectrum per parameter
};

struct DatabaseManifest {
  std::vector<double> parameters;  // strictly increasing, >= 2 entries
  double t_start = 0.0;
  double t_end = 0.0;
  Eigen::Index snapshot_count = 0;
  std::vector<ManifestField> fields;

  void validate() const;
};

// Writes dir/manifest.json. Validates the manifest first.
void save_manifest(const DatabaseManifest& manifest, const std::filesystem::path& dir);

// Reads and validates dir/manifest.json, then checks that every referenced
// file exists, parses, and has dimensions consistent with the declared rank.
DatabaseManifest load_manifest(const std::filesystem::path& dir);

// Directory layout: manifest.json, mean_<field>.grom,
// triplet_<field>_<index>/{phi.grom, sigma.grom, psi.grom}.
void save_training_database(const TrainingDatabase& db, const std::filesystem::path& dir);

TrainingDatabase load_training_database(const std::filesystem::path& dir,
                                        const std::string& field);

}  // namespace grom
