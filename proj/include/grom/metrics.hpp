#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "grom/bicitsgm.hpp"
#include "grom/database.hpp"
#include "grom/galerkin.hpp"
#include "grom/snapshot.hpp"

namespace grom {

struct ReportRow {
  double query_param = 0.0;
  std::string field;
  double eps_percent = 0.0;
  std::string method;  // "bicitsgm" or "galerkin"
  double wall_time_s = 0.0;
};

struct SpectrumRow {
  double parameter = 0.0;
  Eigen::VectorXd eigenvalues;  // lambda_i, full spectrum
  Eigen::VectorXd ric;          // RIC^k for k = 1..length
};

struct EvaluationReport {
  int schema_version = 1;
  std::string field;
  std::vector<ReportRow> rows;
  std::vector<SpectrumRow> spectra;
  double bicitsgm_median_wall_time_s = 0.0;
  double galerkin_median_wall_time_s = 0.0;
  double speedup = 0.0;  // galerkin / bicitsgm median wall time
};

// One row per (query, method). A query without matching truth produces a
// warning and a skipped row, never a failure. Spectra come from the
// database when one is supplied.
EvaluationReport build_report(const std::vector<SnapshotSet>& truths,
                              const std::vector<PredictedSolution>& predictions,
                              const std::vector<BaselineSolution>* baselines = nullptr,
                              const TrainingDatabase* db = nullptr);

// CSV columns: query_param, field, eps_percent, method, wall_time_s.
void write_report_csv(const EvaluationReport& report, const std::filesystem::path& path);

// JSON mirror of the CSV plus spectra and timing summary; roundtrips exactly.
void write_report_json(const EvaluationReport& report, const std::filesystem::path& path);
EvaluationReport read_report_json(const std::filesystem::path& path);

// CSV columns: parameter, index, lambda, ric.
void write_spectrum_csv(const std::vector<SpectrumRow>& spectra,
                        const std::filesystem::path& path);

}  // namespace grom
