#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "grom/bicitsgm.hpp"
#include "grom/galerkin.hpp"
#include "grom/metrics.hpp"
#include "grom/oracle.hpp"

namespace grom {

// One JSON config drives every command; flags override individual fields via
// dotted paths (e.g. --set bicitsgm.calib_power_spatial=4).
struct RunConfig {
  std::string oracle;  // "analytic" or "burgers"
  std::string field = "u";
  AnalyticFamilyConfig analytic;
  BurgersConfig burgers;
  std::vector<double> training_parameters;  // sorted, >= 3 entries
  int rank = 0;                             // fixed q, exclusive with ric_threshold
  double ric_threshold = 0.0;
  BiCitsgmConfig bicitsgm;
  std::vector<double> queries;
  std::string output_dir = "out";
  int jobs = 1;

  void validate() const;
};

// Loads the JSON file, applies --set overrides (key=value, dotted keys),
// rejects unknown keys, then validates.
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides);

// Output directory layout:
//   snapshots/meta.json, snapshots/<field>_<i>.grom   (generate)
//   db/manifest.json, db/mean_*.grom, db/triplet_*/   (train)
//   predictions/<method>_<field>_<i>.grom,
//   predictions/<method>_rows.json                    (interp, galerkin)
//   report.csv, report.json, spectrum.csv             (evaluate, spectrum)

// Runs the oracle at every training parameter; skips files that already
// exist unless force is set.
void cmd_generate(const RunConfig& cfg, bool force);

// Builds and persists the training database; prints the lambda/RIC table.
void cmd_train(const RunConfig& cfg);

// Bi-CITSGM prediction at every query, with truth generated on demand for
// the error column.
std::vector<PredictedSolution> cmd_interp(const RunConfig& cfg);

// Intrusive ITSGM/Galerkin baseline at every query (Burgers oracle only).
std::vector<BaselineSolution> cmd_galerkin(const RunConfig& cfg);

// Aggregates persisted predictions into report.csv / report.json.
EvaluationReport cmd_evaluate(const RunConfig& cfg);

// Exports the per-parameter eigenvalue/RIC table to spectrum.csv.
void cmd_spectrum(const RunConfig& cfg);

}  // namespace grom
