#include "grom/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include "grom/errors.hpp"
#include "grom/matrix_io.hpp"

namespace grom {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path snapshots_dir(const RunConfig& cfg) { return fs::path(cfg.output_dir) / "snapshots"; }
fs::path db_dir(const RunConfig& cfg) { return fs::path(cfg.output_dir) / "db"; }
fs::path predictions_dir(const RunConfig& cfg) { return fs::path(cfg.output_dir) / "predictions"; }

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      throw ValidationError("config: unknown key '" + key + "' in " + context);
    }
  }
}

InterpKind parse_interp_kind(const std::string& name) {
  if (name == "lagrange") return InterpKind::Lagrange;
  if (name == "idw") return InterpKind::InverseDistance;
  if (name == "cubic_spline") return InterpKind::CubicSpline;
  throw ValidationError("config: unknown interpolator '" + name +
                        "' (expected lagrange, idw, or cubic_spline)");
}

ItsgmConfig parse_itsgm(const json& j, const std::string& context) {
  check_keys(j, {"interpolator", "idw_power", "neighbor_count", "reference_rule",
                 "fixed_reference_index"},
             context);
  ItsgmConfig cfg;
  cfg.interpolator = parse_interp_kind(j.value("interpolator", std::string("lagrange")));
  cfg.idw_power = j.value("idw_power", cfg.idw_power);
  cfg.neighbor_count = j.value("neighbor_count", cfg.neighbor_count);
  const std::string rule = j.value("reference_rule", std::string("closest"));
  if (rule == "closest") {
    cfg.reference_rule = ReferenceRule::ClosestTrainingPoint;
  } else if (rule == "fixed") {
    cfg.reference_rule = ReferenceRule::FixedIndex;
  } else {
    throw ValidationError("config: unknown reference_rule '" + rule +
                          "' (expected closest or fixed)");
  }
  cfg.fixed_reference_index = j.value("fixed_reference_index", cfg.fixed_reference_index);
  return cfg;
}

RunConfig parse_run_config(const json& j) {
  check_keys(j,
             {"oracle", "field", "analytic", "burgers", "training_parameters", "rank",
              "ric_threshold", "bicitsgm", "queries", "output_dir", "jobs"},
             "top level");
  RunConfig cfg;
  cfg.oracle = j.value("oracle", std::string());
  cfg.field = j.value("field", cfg.field);

  if (j.contains("analytic")) {
    const json& ja = j.at("analytic");
    check_keys(ja, {"n_x", "n_s", "t_final", "mode_count", "mu_min", "mu_max"}, "analytic");
    cfg.analytic.n_x = ja.value("n_x", cfg.analytic.n_x);
    cfg.analytic.n_s = ja.value("n_s", cfg.analytic.n_s);
    cfg.analytic.t_final = ja.value("t_final", cfg.analytic.t_final);
    cfg.analytic.mode_count = ja.value("mode_count", cfg.analytic.mode_count);
    cfg.analytic.mu_min = ja.value("mu_min", cfg.analytic.mu_min);
    cfg.analytic.mu_max = ja.value("mu_max", cfg.analytic.mu_max);
  }
  if (j.contains("burgers")) {
    const json& jb = j.at("burgers");
    check_keys(jb, {"n_x", "dt", "t_final", "snapshot_stride", "nu_min", "nu_max"}, "burgers");
    cfg.burgers.n_x = jb.value("n_x", cfg.burgers.n_x);
    cfg.burgers.dt = jb.value("dt", cfg.burgers.dt);
    cfg.burgers.t_final = jb.value("t_final", cfg.burgers.t_final);
    cfg.burgers.snapshot_stride = jb.value("snapshot_stride", cfg.burgers.snapshot_stride);
    cfg.burgers.nu_min = jb.value("nu_min", cfg.burgers.nu_min);
    cfg.burgers.nu_max = jb.value("nu_max", cfg.burgers.nu_max);
  }
  cfg.training_parameters = j.value("training_parameters", cfg.training_parameters);
  cfg.rank = j.value("rank", cfg.rank);
  cfg.ric_threshold = j.value("ric_threshold", cfg.ric_threshold);
  if (j.contains("bicitsgm")) {
    const json& jb = j.at("bicitsgm");
    check_keys(jb,
               {"spatial", "temporal", "calib_power_spatial", "calib_power_temporal",
                "calib_neighbor_count"},
               "bicitsgm");
    if (jb.contains("spatial")) cfg.bicitsgm.spatial = parse_itsgm(jb.at("spatial"), "bicitsgm.spatial");
    if (jb.contains("temporal")) cfg.bicitsgm.temporal = parse_itsgm(jb.at("temporal"), "bicitsgm.temporal");
    cfg.bicitsgm.calib_power_spatial = jb.value("calib_power_spatial", cfg.bicitsgm.calib_power_spatial);
    cfg.bicitsgm.calib_power_temporal = jb.value("calib_power_temporal", cfg.bicitsgm.calib_power_temporal);
    cfg.bicitsgm.calib_neighbor_count = jb.value("calib_neighbor_count", cfg.bicitsgm.calib_neighbor_count);
  }
  cfg.queries = j.value("queries", cfg.queries);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.jobs = j.value("jobs", cfg.jobs);
  cfg.validate();
  return cfg;
}

SnapshotSet generate_truth(const RunConfig& cfg, double parameter) {
  SnapshotSet set = cfg.oracle == "analytic" ? analytic_field(cfg.analytic, parameter)
                                             : solve_burgers(cfg.burgers, parameter);
  set.field_name = cfg.field;
  return set;
}

// Index-parallel loop with first-error propagation; jobs <= 1 stays serial
// so single-threaded runs never pay for thread startup.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::size_t next = 0;
  std::mutex next_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(next_mutex);
        if (next >= count) return;
        i = next++;
      }
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw StorageError("cannot open '" + path.string() + "' for reading");
  }
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
}

void write_json_file(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw StorageError("cannot open '" + path.string() + "' for writing");
  }
  out << j.dump(2) << "\n";
  if (!out) {
    throw StorageError("short write to '" + path.string() + "'");
  }
}

// Rows persisted by interp/galerkin so evaluate can aggregate without
// recomputing predictions.
struct PersistedRows {
  std::vector<double> parameters;
  std::vector<double> eps_percent;
  std::vector<double> wall_time_s;
};

void save_rows(const RunConfig& cfg, const std::string& method, const PersistedRows& rows) {
  json j;
  j["schema_version"] = 1;
  j["method"] = method;
  j["field"] = cfg.field;
  j["rows"] = json::array();
  for (std::size_t i = 0; i < rows.parameters.size(); ++i) {
    j["rows"].push_back({{"query_param", rows.parameters[i]},
                         {"eps_percent", rows.eps_percent[i]},
                         {"wall_time_s", rows.wall_time_s[i]}});
  }
  write_json_file(j, predictions_dir(cfg) / (method + "_rows.json"));
}

PersistedRows load_rows(const RunConfig& cfg, const std::string& method) {
  const json j = load_json_file(predictions_dir(cfg) / (method + "_rows.json"));
  PersistedRows rows;
  try {
    for (const auto& jr : j.at("rows")) {
      rows.parameters.push_back(jr.at("query_param").get<double>());
      rows.eps_percent.push_back(jr.at("eps_percent").get<double>());
      rows.wall_time_s.push_back(jr.at("wall_time_s").get<double>());
    }
  } catch (const json::exception& e) {
    throw FormatError(method + "_rows.json: " + e.what());
  }
  return rows;
}

fs::path prediction_path(const RunConfig& cfg, const std::string& method, std::size_t index) {
  return predictions_dir(cfg) /
         (method + "_" + cfg.field + "_" + std::to_string(index) + ".grom");
}

}  // namespace

void RunConfig::validate() const {
  if (oracle != "analytic" && oracle != "burgers") {
    throw ValidationError("config: oracle must be 'analytic' or 'burgers', got '" + oracle + "'");
  }
  if (field.empty()) {
    throw ValidationError("config: field name must not be empty");
  }
  if (training_parameters.size() < 3) {
    throw ValidationError("config: need >= 3 training parameters, got " +
                          std::to_string(training_parameters.size()));
  }
  for (std::size_t i = 1; i < training_parameters.size(); ++i) {
    if (!(training_parameters[i] > training_parameters[i - 1])) {
      throw ValidationError("config: training parameters must be strictly increasing");
    }
  }
  if ((rank > 0) == (ric_threshold > 0.0)) {
    throw ValidationError("config: set exactly one of rank (> 0) or ric_threshold (> 0)");
  }
  if (rank < 0 || ric_threshold < 0.0 || ric_threshold > 1.0) {
    throw ValidationError("config: rank must be >= 0 and ric_threshold within (0, 1]");
  }
  if (jobs < 1) {
    throw ValidationError("config: jobs must be >= 1, got " + std::to_string(jobs));
  }
  if (oracle == "analytic") {
    analytic.validate();
  } else {
    burgers.validate();
  }
}

RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides) {
  json j = load_json_file(path);
  for (const std::string& setting : overrides) {
    const auto eq = setting.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ValidationError("--set expects key=value, got '" + setting + "'");
    }
    std::string pointer = "/" + setting.substr(0, eq);
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    const std::string raw = setting.substr(eq + 1);
    json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
    if (value.is_discarded()) value = raw;  // unquoted strings pass through
    try {
      j[json::json_pointer(pointer)] = value;
    } catch (const json::exception& e) {
      throw ValidationError("--set '" + setting + "': " + e.what());
    }
  }
  return parse_run_config(j);
}

void cmd_generate(const RunConfig& cfg, bool force) {
  std::error_code ec;
  fs::create_directories(snapshots_dir(cfg), ec);
  if (ec) {
    throw StorageError("cannot create '" + snapshots_dir(cfg).string() + "': " + ec.message());
  }

  json meta;
  meta["schema_version"] = 1;
  meta["oracle"] = cfg.oracle;
  meta["field"] = cfg.field;
  meta["parameters"] = cfg.training_parameters;
  meta["files"] = json::array();

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < cfg.training_parameters.size(); ++i) {
    const auto path = snapshots_dir(cfg) / (cfg.field + "_" + std::to_string(i) + ".grom");
    meta["files"].push_back(path.filename().string());
    if (force || !fs::exists(path)) {
      todo.push_back(i);
    } else {
      std::cout << "generate: keeping existing " << path.string() << "\n";
    }
  }

  // All parameters share one grid; record it once (from the first set).
  Eigen::VectorXd times;
  std::mutex meta_mutex;
  parallel_for(todo.size(), cfg.jobs, [&](std::size_t k) {
    const std::size_t i = todo[k];
    const double param = cfg.training_parameters[i];
    const SnapshotSet set = generate_truth(cfg, param);
    const auto path = snapshots_dir(cfg) / (cfg.field + "_" + std::to_string(i) + ".grom");
    write_matrix(path, set.data);
    {
      std::lock_guard lock(meta_mutex);
      if (times.size() == 0) times = set.times;
    }
    std::cout << "generate: wrote " << path.string() << " (parameter " << param << ")\n";
  });

  if (times.size() == 0) {
    // Nothing regenerated; recover the grid from the oracle config.
    times = generate_truth(cfg, cfg.training_parameters.front()).times;
  }
  meta["time_grid"] = {{"t_start", times(0)},
                       {"t_end", times(times.size() - 1)},
                       {"count", times.size()}};
  write_json_file(meta, snapshots_dir(cfg) / "meta.json");
}

namespace {

std::vector<SnapshotSet> load_training_snapshots(const RunConfig& cfg) {
  const json meta = load_json_file(snapshots_dir(cfg) / "meta.json");
  std::vector<SnapshotSet> sets;
  try {
    const auto params = meta.at("parameters").get<std::vector<double>>();
    const auto files = meta.at("files").get<std::vector<std::string>>();
    const Eigen::Index count = meta.at("time_grid").at("count").get<Eigen::Index>();
    const double t_start = meta.at("time_grid").at("t_start").get<double>();
    const double t_end = meta.at("time_grid").at("t_end").get<double>();
    if (params.size() != files.size()) {
      throw FormatError("snapshots/meta.json: parameters and files disagree");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      SnapshotSet set;
      set.field_name = meta.at("field").get<std::string>();
      set.parameter = params[i];
      set.times = Eigen::VectorXd::LinSpaced(count, t_start, t_end);
      set.data = read_matrix(snapshots_dir(cfg) / files[i]);
      set.validate();
      sets.push_back(std::move(set));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("snapshots/meta.json: ") + e.what());
  }
  return sets;
}

}  // namespace

void cmd_train(const RunConfig& cfg) {
  const std::vector<SnapshotSet> sets = load_training_snapshots(cfg);
  const TrainingDatabase db = train_database(sets, cfg.rank, cfg.ric_threshold);
  save_training_database(db, db_dir(cfg));

  std::cout << "train: rank q = " << db.rank << ", " << db.triplets.size()
            << " training parameters\n";
  std::cout << "parameter      k    lambda          RIC\n";
  for (const auto& t : db.triplets) {
    for (int k = 1; k <= db.rank; ++k) {
      std::cout << t.parameter << "\t" << k << "\t" << t.eigenvalues(k - 1) << "\t"
                << ric(t.eigenvalues, k) << "\n";
    }
  }
}

std::vector<PredictedSolution> cmd_interp(const RunConfig& cfg) {
  if (cfg.queries.empty()) {
    throw ValidationError("interp: config lists no queries");
  }
  const TrainingDatabase db = load_training_database(db_dir(cfg), cfg.field);
  std::error_code ec;
  fs::create_directories(predictions_dir(cfg), ec);

  std::vector<PredictedSolution> predictions(cfg.queries.size());
  std::vector<double> eps(cfg.queries.size());
  parallel_for(cfg.queries.size(), cfg.jobs, [&](std::size_t i) {
    const double query = cfg.queries[i];
    predictions[i] = predict(db, query, cfg.bicitsgm);
    const SnapshotSet truth = generate_truth(cfg, query);
    eps[i] = mean_relative_error(truth, predictions[i].reconstruction);
  });

  PersistedRows rows;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    write_matrix(prediction_path(cfg, "bicitsgm", i), predictions[i].reconstruction);
    rows.parameters.push_back(predictions[i].parameter);
    rows.eps_percent.push_back(eps[i]);
    rows.wall_time_s.push_back(predictions[i].wall_time_s);
    std::cout << "interp: query " << predictions[i].parameter << " -> eps = " << eps[i]
              << " %, wall time " << predictions[i].wall_time_s << " s\n";
  }
  save_rows(cfg, "bicitsgm", rows);
  return predictions;
}

std::vector<BaselineSolution> cmd_galerkin(const RunConfig& cfg) {
  if (cfg.oracle != "burgers") {
    throw ValidationError("galerkin: the intrusive baseline projects the Burgers operator; "
                          "set oracle to 'burgers'");
  }
  if (cfg.queries.empty()) {
    throw ValidationError("galerkin: config lists no queries");
  }
  const TrainingDatabase db = load_training_database(db_dir(cfg), cfg.field);
  std::error_code ec;
  fs::create_directories(predictions_dir(cfg), ec);

  std::vector<BaselineSolution> baselines(cfg.queries.size());
  std::vector<double> eps(cfg.queries.size());
  parallel_for(cfg.queries.size(), cfg.jobs, [&](std::size_t i) {
    const double query = cfg.queries[i];
    baselines[i] = baseline_predict(db, query, cfg.burgers, cfg.bicitsgm.spatial);
    const SnapshotSet truth = generate_truth(cfg, query);
    eps[i] = mean_relative_error(truth, baselines[i].reconstruction);
  });

  PersistedRows rows;
  for (std::size_t i = 0; i < baselines.size(); ++i) {
    write_matrix(prediction_path(cfg, "galerkin", i), baselines[i].reconstruction);
    rows.parameters.push_back(baselines[i].parameter);
    rows.eps_percent.push_back(eps[i]);
    rows.wall_time_s.push_back(baselines[i].wall_time_s);
    std::cout << "galerkin: query " << baselines[i].parameter << " -> eps = " << eps[i]
              << " %, wall time " << baselines[i].wall_time_s << " s\n";
  }
  save_rows(cfg, "galerkin", rows);
  return baselines;
}

EvaluationReport cmd_evaluate(const RunConfig& cfg) {
  const TrainingDatabase db = load_training_database(db_dir(cfg), cfg.field);

  if (!fs::exists(predictions_dir(cfg) / "bicitsgm_rows.json")) {
    throw ValidationError("evaluate: no persisted predictions; run interp first");
  }
  const PersistedRows bici_rows = load_rows(cfg, "bicitsgm");
  std::vector<PredictedSolution> predictions(bici_rows.parameters.size());
  for (std::size_t i = 0; i < bici_rows.parameters.size(); ++i) {
    predictions[i].parameter = bici_rows.parameters[i];
    predictions[i].wall_time_s = bici_rows.wall_time_s[i];
    predictions[i].reconstruction = read_matrix(prediction_path(cfg, "bicitsgm", i));
  }

  std::vector<BaselineSolution> baselines;
  const bool have_baseline = fs::exists(predictions_dir(cfg) / "galerkin_rows.json");
  if (have_baseline) {
    const PersistedRows gal_rows = load_rows(cfg, "galerkin");
    baselines.resize(gal_rows.parameters.size());
    for (std::size_t i = 0; i < gal_rows.parameters.size(); ++i) {
      baselines[i].parameter = gal_rows.parameters[i];
      baselines[i].wall_time_s = gal_rows.wall_time_s[i];
      baselines[i].reconstruction = read_matrix(prediction_path(cfg, "galerkin", i));
    }
  }

  std::vector<SnapshotSet> truths(cfg.queries.size());
  parallel_for(cfg.queries.size(), cfg.jobs,
               [&](std::size_t i) { truths[i] = generate_truth(cfg, cfg.queries[i]); });

  const EvaluationReport report = build_report(truths, predictions,
                                               have_baseline ? &baselines : nullptr, &db);
  write_report_csv(report, fs::path(cfg.output_dir) / "report.csv");
  write_report_json(report, fs::path(cfg.output_dir) / "report.json");

  for (const auto& r : report.rows) {
    std::cout << "evaluate: " << r.method << " @ " << r.query_param << " -> eps = "
              << r.eps_percent << " %\n";
  }
  if (report.speedup > 0.0) {
    std::cout << "evaluate: median wall times bicitsgm = " << report.bicitsgm_median_wall_time_s
              << " s, galerkin = " << report.galerkin_median_wall_time_s << " s, speedup = "
              << report.speedup << "x\n";
  }
  return report;
}

void cmd_spectrum(const RunConfig& cfg) {
  const TrainingDatabase db = load_training_database(db_dir(cfg), cfg.field);
  const EvaluationReport report = build_report({}, {}, nullptr, &db);
  write_spectrum_csv(report.spectra, fs::path(cfg.output_dir) / "spectrum.csv");
  std::cout << "spectrum: wrote " << (fs::path(cfg.output_dir) / "spectrum.csv").string()
            << " (" << report.spectra.size() << " parameters)\n";
}

}  // namespace grom
