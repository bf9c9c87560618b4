#include "grom/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "grom/errors.hpp"
#include "grom/pod.hpp"

namespace grom {

using nlohmann::json;

namespace {

const SnapshotSet* find_truth(const std::vector<SnapshotSet>& truths, double parameter) {
  for (const auto& t : truths) {
    if (t.parameter == parameter) return &t;
  }
  return nullptr;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// Shortest-roundtrip formatting (what the JSON writer uses), so the CSV and
// JSON mirrors of one run are textually consistent.
std::string fmt(double x) { return json(x).dump(); }

}  // namespace

EvaluationReport build_report(const std::vector<SnapshotSet>& truths,
                              const std::vector<PredictedSolution>& predictions,
                              const std::vector<BaselineSolution>* baselines,
                              const TrainingDatabase* db) {
  EvaluationReport report;
  std::vector<double> bici_times, gal_times;

  const std::string field = !truths.empty()   ? truths.front().field_name
                            : db != nullptr   ? db->field_name
                                              : "u";
  report.field = field;

  for (const auto& p : predictions) {
    bici_times.push_back(p.wall_time_s);
    const SnapshotSet* truth = find_truth(truths, p.parameter);
    if (truth == nullptr) {
      std::cerr << "warning: no truth for query " << p.parameter
                << "; omitting its bicitsgm error row (partial report)\n";
      continue;
    }
    report.rows.push_back(ReportRow{p.parameter, field,
                                    mean_relative_error(*truth, p.reconstruction), "bicitsgm",
                                    p.wall_time_s});
  }
  if (baselines != nullptr) {
    for (const auto& b : *baselines) {
      gal_times.push_back(b.wall_time_s);
      const SnapshotSet* truth = find_truth(truths, b.parameter);
      if (truth == nullptr) {
        std::cerr << "warning: no truth for query " << b.parameter
                  << "; omitting its galerkin error row (partial report)\n";
        continue;
      }
      report.rows.push_back(ReportRow{b.parameter, field,
                                      mean_relative_error(*truth, b.reconstruction), "galerkin",
                                      b.wall_time_s});
    }
  }

  report.bicitsgm_median_wall_time_s = median(bici_times);
  report.galerkin_median_wall_time_s = median(gal_times);
  if (!bici_times.empty() && !gal_times.empty() && report.bicitsgm_median_wall_time_s > 0.0) {
    report.speedup = report.galerkin_median_wall_time_s / report.bicitsgm_median_wall_time_s;
  }

  if (db != nullptr) {
    for (const auto& t : db->triplets) {
      SpectrumRow row;
      row.parameter = t.parameter;
      row.eigenvalues = t.eigenvalues;
      row.ric.resize(t.eigenvalues.size());
      for (Eigen::Index k = 0; k < t.eigenvalues.size(); ++k) {
        row.ric(k) = ric(t.eigenvalues, static_cast<int>(k + 1));
      }
      report.spectra.push_back(std::move(row));
    }
  }
  return report;
}

void write_report_csv(const EvaluationReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw StorageError("cannot open '" + path.string() + "' for writing");
  }
  out << "query_param,field,eps_percent,method,wall_time_s\n";
  for (const auto& r : report.rows) {
    out << fmt(r.query_param) << ',' << r.field << ',' << fmt(r.eps_percent) << ',' << r.method
        << ',' << fmt(r.wall_time_s) << '\n';
  }
  if (!out) {
    throw StorageError("short write to '" + path.string() + "'");
  }
}

namespace {
json vec_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}
Eigen::VectorXd vec_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}
}  // namespace

void write_report_json(const EvaluationReport& report, const std::filesystem::path& path) {
  json j;
  j["schema_version"] = report.schema_version;
  j["field"] = report.field;
  j["rows"] = json::array();
  for (const auto& r : report.rows) {
    j["rows"].push_back({{"query_param", r.query_param},
                         {"field", r.field},
                         {"eps_percent", r.eps_percent},
                         {"method", r.method},
                         {"wall_time_s", r.wall_time_s}});
  }
  j["spectra"] = json::array();
  for (const auto& s : report.spectra) {
    j["spectra"].push_back({{"parameter", s.parameter},
                            {"eigenvalues", vec_to_json(s.eigenvalues)},
                            {"ric", vec_to_json(s.ric)}});
  }
  j["timing"] = {{"bicitsgm_median_wall_time_s", report.bicitsgm_median_wall_time_s},
                 {"galerkin_median_wall_time_s", report.galerkin_median_wall_time_s},
                 {"speedup", report.speedup}};

  std::ofstream out(path);
  if (!out) {
    throw StorageError("cannot open '" + path.string() + "' for writing");
  }
  out << j.dump(2) << "\n";
  if (!out) {
    throw StorageError("short write to '" + path.string() + "'");
  }
}

EvaluationReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw StorageError("cannot open '" + path.string() + "' for reading");
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }

  EvaluationReport report;
  try {
    report.schema_version = j.at("schema_version").get<int>();
    if (report.schema_version != 1) {
      throw FormatError("'" + path.string() + "': unsupported schema_version");
    }
    report.field = j.at("field").get<std::string>();
    for (const auto& jr : j.at("rows")) {
      report.rows.push_back(ReportRow{jr.at("query_param").get<double>(),
                                      jr.at("field").get<std::string>(),
                                      jr.at("eps_percent").get<double>(),
                                      jr.at("method").get<std::string>(),
                                      jr.at("wall_time_s").get<double>()});
    }
    for (const auto& js : j.at("spectra")) {
      report.spectra.push_back(SpectrumRow{js.at("parameter").get<double>(),
                                           vec_from_json(js.at("eigenvalues")),
                                           vec_from_json(js.at("ric"))});
    }
    const auto& jt = j.at("timing");
    report.bicitsgm_median_wall_time_s = jt.at("bicitsgm_median_wall_time_s").get<double>();
    report.galerkin_median_wall_time_s = jt.at("galerkin_median_wall_time_s").get<double>();
    report.speedup = jt.at("speedup").get<double>();
  } catch (const json::exception& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
  return report;
}

void write_spectrum_csv(const std::vector<SpectrumRow>& spectra,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw StorageError("cannot open '" + path.string() + "' for writing");
  }
  out << "parameter,index,lambda,ric\n";
  for (const auto& s : spectra) {
    for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
      out << fmt(s.parameter) << ',' << (k + 1) << ',' << fmt(s.eigenvalues(k)) << ','
          << fmt(s.ric(k)) << '\n';
    }
  }
  if (!out) {
    throw StorageError("short write to '" + path.string() + "'");
  }
}

}  // namespace grom
