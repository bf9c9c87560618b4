#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "grom/errors.hpp"
#include "grom/matrix_io.hpp"
#include "grom/pipeline.hpp"

using namespace grom;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("grom_pipeline_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  return path;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Small analytic run: two modes, rank picked by information content.
RunConfig mini_config(const fs::path& out_dir) {
  RunConfig cfg;
  cfg.oracle = "analytic";
  cfg.analytic.n_x = 48;
  cfg.analytic.n_s = 24;
  cfg.analytic.mode_count = 2;
  cfg.analytic.t_final = 2.0;
  cfg.training_parameters = {0.5, 1.0, 1.5, 2.0, 2.5};
  cfg.ric_threshold = 0.9999;
  cfg.queries = {1.0, 1.3};
  cfg.output_dir = out_dir.string();
  cfg.validate();
  return cfg;
}

std::string minimal_config_json() {
  return R"({
    "oracle": "analytic",
    "analytic": {"n_x": 48, "n_s": 24, "mode_count": 2, "t_final": 2.0},
    "training_parameters": [0.5, 1.0, 1.5],
    "rank": 2,
    "queries": [1.25]
  })";
}

int run_cli(const std::string& args) {
  const std::string command = std::string(GROM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config loading applies defaults for omitted fields") {
  const fs::path dir = temp_dir("cfg_defaults");
  const fs::path path = write_text(dir / "run.json", minimal_config_json());
  const RunConfig cfg = load_run_config(path, {});
  CHECK(cfg.oracle == "analytic");
  CHECK(cfg.field == "u");
  CHECK(cfg.output_dir == "out");
  CHECK(cfg.jobs == 1);
  CHECK(cfg.rank == 2);
  CHECK(cfg.ric_threshold == 0.0);
  REQUIRE(cfg.queries.size() == 1);
  CHECK(cfg.queries[0] == 1.25);
  CHECK(cfg.analytic.n_x == 48);
  CHECK(cfg.analytic.t_final == 2.0);
  CHECK(cfg.analytic.mu_min == 0.5);  // untouched default
  CHECK(cfg.bicitsgm.spatial.interpolator == InterpKind::Lagrange);
  CHECK(cfg.bicitsgm.spatial.neighbor_count == 3);
  CHECK(cfg.bicitsgm.calib_power_spatial == 3.0);
}

TEST_CASE("--set overrides reach nested fields by dotted path") {
  const fs::path dir = temp_dir("cfg_overrides");
  const fs::path path = write_text(dir / "run.json", minimal_config_json());

  CHECK(load_run_config(path, {"rank=3"}).rank == 3);
  CHECK(load_run_config(path, {"field=v"}).field == "v");
  CHECK(load_run_config(path, {"analytic.n_x=64"}).analytic.n_x == 64);
  CHECK(load_run_config(path, {"bicitsgm.calib_power_spatial=4.5"}).bicitsgm.calib_power_spatial ==
        4.5);
  CHECK(load_run_config(path, {"bicitsgm.spatial.interpolator=idw"}).bicitsgm.spatial.interpolator ==
        InterpKind::InverseDistance);
  CHECK(load_run_config(path, {"bicitsgm.spatial.reference_rule=fixed",
                               "bicitsgm.spatial.fixed_reference_index=1"})
            .bicitsgm.spatial.fixed_reference_index == 1);
}

TEST_CASE("config mistakes are rejected with the right error class") {
  const fs::path dir = temp_dir("cfg_errors");
  int counter = 0;
  auto config_with = [&](const std::string& body) {
    return write_text(dir / ("bad_" + std::to_string(counter++) + ".json"), body);
  };

  // Unknown keys, in the file or injected by --set.
  CHECK_THROWS_AS(load_run_config(config_with(R"({"oracle": "analytic", "bogus": 1,
      "training_parameters": [1.0, 2.0, 3.0], "rank": 1})"), {}),
                  ValidationError);
  const fs::path good = config_with(minimal_config_json());
  CHECK_THROWS_AS(load_run_config(good, {"bogus=1"}), ValidationError);
  CHECK_THROWS_AS(load_run_config(good, {"analytic.bogus=1"}), ValidationError);

  // Malformed --set arguments.
  CHECK_THROWS_AS(load_run_config(good, {"rank"}), ValidationError);
  CHECK_THROWS_AS(load_run_config(good, {"=3"}), ValidationError);

  // Semantic validation.
  CHECK_THROWS_AS(load_run_config(good, {"oracle=airfoil"}), ValidationError);
  CHECK_THROWS_AS(load_run_config(good, {"training_parameters=[1.0,2.0]"}), ValidationError);
  CHECK_THROWS_AS(load_run_config(good, {"training_parameters=[1.0,1.0,2.0]"}), ValidationError);
  CHECK_THROWS_AS(load_run_config(good, {"ric_threshold=0.9"}), ValidationError);  // rank also set
  CHECK_THROWS_AS(load_run_config(good, {"rank=0"}), ValidationError);             // neither set
  CHECK_THROWS_AS(load_run_config(good, {"jobs=0"}), ValidationError);
  CHECK_THROWS_AS(load_run_config(good, {"bicitsgm.spatial.interpolator=quintic"}),
                  ValidationError);
  CHECK_THROWS_AS(load_run_config(good, {"bicitsgm.spatial.reference_rule=farthest"}),
                  ValidationError);

  // Broken files.
  CHECK_THROWS_AS(load_run_config(dir / "absent.json", {}), StorageError);
  CHECK_THROWS_AS(load_run_config(config_with("{ not json"), {}), FormatError);
}

TEST_CASE("generate writes one snapshot file per parameter plus a faithful meta.json") {
  const fs::path out = temp_dir("generate");
  const RunConfig cfg = mini_config(out);
  cmd_generate(cfg, false);

  for (int i = 0; i < 5; ++i) {
    CHECK(fs::exists(out / "snapshots" / ("u_" + std::to_string(i) + ".grom")));
  }

  std::ifstream in(out / "snapshots" / "meta.json");
  REQUIRE(in.good());
  json meta;
  in >> meta;
  CHECK(meta.at("schema_version").get<int>() == 1);
  CHECK(meta.at("oracle").get<std::string>() == "analytic");
  CHECK(meta.at("field").get<std::string>() == "u");
  CHECK(meta.at("parameters").get<std::vector<double>>() == cfg.training_parameters);
  CHECK(meta.at("files").size() == 5);
  CHECK(meta.at("time_grid").at("t_start").get<double>() == 0.0);
  CHECK(meta.at("time_grid").at("t_end").get<double>() == 2.0);
  CHECK(meta.at("time_grid").at("count").get<int>() == 24);

  // The stored snapshot is the oracle output, bit for bit.
  const Eigen::MatrixXd stored = read_matrix(out / "snapshots" / "u_1.grom");
  const Eigen::MatrixXd truth = analytic_field(cfg.analytic, 1.0).data;
  CHECK((stored.array() == truth.array()).all());
}

TEST_CASE("generate keeps existing snapshots unless forced") {
  const fs::path out = temp_dir("regen");
  const RunConfig cfg = mini_config(out);
  cmd_generate(cfg, false);

  const fs::path first = out / "snapshots" / "u_0.grom";
  const auto stamp = fs::last_write_time(first);
  cmd_generate(cfg, false);  // all files exist; nothing may be rewritten
  CHECK(fs::last_write_time(first) == stamp);

  // meta.json is refreshed either way and still records the full grid.
  std::ifstream in(out / "snapshots" / "meta.json");
  json meta;
  in >> meta;
  CHECK(meta.at("time_grid").at("count").get<int>() == 24);

  CHECK_NOTHROW(cmd_generate(cfg, true));
  CHECK((read_matrix(first).array() == analytic_field(cfg.analytic, 0.5).data.array()).all());
}

TEST_CASE("the full analytic pipeline is exact at a training parameter") {
  const fs::path out = temp_dir("e2e");
  const RunConfig cfg = mini_config(out);
  cmd_generate(cfg, false);
  cmd_train(cfg);

  // The information threshold must have picked rank 2: the two-mode family
  // needs both modes, and a third is numerically absent.
  {
    std::ifstream in(out / "db" / "manifest.json");
    REQUIRE(in.good());
    json manifest;
    in >> manifest;
    CHECK(manifest.at("fields").at(0).at("rank").get<int>() == 2);
  }

  const std::vector<PredictedSolution> predictions = cmd_interp(cfg);
  REQUIRE(predictions.size() == 2);
  CHECK(predictions[0].parameter == 1.0);
  CHECK(predictions[1].parameter == 1.3);

  // Query 1.0 sits on a training point: the prediction must reproduce the
  // oracle to numerical accuracy. The off-node query stays a sane percentage.
  const double eps_node = mean_relative_error(analytic_field(cfg.analytic, 1.0),
                                              predictions[0].reconstruction);
  const double eps_off = mean_relative_error(analytic_field(cfg.analytic, 1.3),
                                             predictions[1].reconstruction);
  CHECK(eps_node <= 1e-4);
  CHECK(eps_off < 5.0);

  // Persisted reconstructions match the returned ones bit for bit.
  const Eigen::MatrixXd stored = read_matrix(out / "predictions" / "bicitsgm_u_0.grom");
  CHECK((stored.array() == predictions[0].reconstruction.array()).all());

  const EvaluationReport report = cmd_evaluate(cfg);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].method == "bicitsgm");
  CHECK(report.rows[0].query_param == 1.0);
  CHECK(report.rows[0].eps_percent == eps_node);
  CHECK(report.rows[1].eps_percent == eps_off);
  CHECK(report.speedup == 0.0);  // no baseline rows in this run
  CHECK(fs::exists(out / "report.csv"));
  const EvaluationReport reread = read_report_json(out / "report.json");
  REQUIRE(reread.rows.size() == 2);
  CHECK(reread.rows[0].eps_percent == eps_node);

  cmd_spectrum(cfg);
  std::ifstream spec(out / "spectrum.csv");
  REQUIRE(spec.good());
  std::string header;
  std::getline(spec, header);
  CHECK(header == "parameter,index,lambda,ric");
}

TEST_CASE("serial and parallel runs produce identical artifacts") {
  const fs::path out_a = temp_dir("det_serial");
  const fs::path out_b = temp_dir("det_parallel");
  RunConfig cfg_a = mini_config(out_a);
  RunConfig cfg_b = mini_config(out_b);
  cfg_a.jobs = 1;
  cfg_b.jobs = 2;

  for (const RunConfig* cfg : {&cfg_a, &cfg_b}) {
    cmd_generate(*cfg, false);
    cmd_train(*cfg);
    cmd_interp(*cfg);
  }

  std::vector<fs::path> artifacts = {
      fs::path("db") / "manifest.json",
      fs::path("db") / "mean_u.grom",
      fs::path("predictions") / "bicitsgm_u_0.grom",
      fs::path("predictions") / "bicitsgm_u_1.grom",
  };
  for (int i = 0; i < 5; ++i) {
    artifacts.push_back(fs::path("snapshots") / ("u_" + std::to_string(i) + ".grom"));
    artifacts.push_back(fs::path("db") / ("triplet_u_" + std::to_string(i)) / "phi.grom");
    artifacts.push_back(fs::path("db") / ("triplet_u_" + std::to_string(i)) / "sigma.grom");
    artifacts.push_back(fs::path("db") / ("triplet_u_" + std::to_string(i)) / "psi.grom");
  }
  for (const fs::path& rel : artifacts) {
    CAPTURE(rel.string());
    CHECK(read_bytes(out_a / rel) == read_bytes(out_b / rel));
  }
}

TEST_CASE("evaluate demands that interp ran first") {
  const fs::path out = temp_dir("sequencing");
  const RunConfig cfg = mini_config(out);
  cmd_generate(cfg, false);
  cmd_train(cfg);
  try {
    cmd_evaluate(cfg);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("run interp first") != std::string::npos);
  }
}

TEST_CASE("stage preconditions are validated") {
  const fs::path out = temp_dir("preconditions");
  RunConfig cfg = mini_config(out);

  // The intrusive baseline only exists for the Burgers operator.
  CHECK_THROWS_AS(cmd_galerkin(cfg), ValidationError);

  RunConfig no_queries = cfg;
  no_queries.queries.clear();
  CHECK_THROWS_AS(cmd_interp(no_queries), ValidationError);

  RunConfig burgers_no_queries = cfg;
  burgers_no_queries.oracle = "burgers";
  burgers_no_queries.queries.clear();
  CHECK_THROWS_AS(cmd_galerkin(burgers_no_queries), ValidationError);
}

TEST_CASE("tampered snapshot metadata surfaces as a format error") {
  const fs::path out = temp_dir("tamper");
  const RunConfig cfg = mini_config(out);
  cmd_generate(cfg, false);

  const fs::path meta = out / "snapshots" / "meta.json";
  write_text(meta, "{ nope");
  CHECK_THROWS_AS(cmd_train(cfg), FormatError);

  write_text(meta, "{}");  // valid JSON, required keys missing
  CHECK_THROWS_AS(cmd_train(cfg), FormatError);

  CHECK_THROWS_AS(cmd_train(mini_config(temp_dir("no_generate"))), StorageError);
}

TEST_CASE("the command-line front end maps error classes to exit codes") {
  const fs::path dir = temp_dir("cli");
  const fs::path out = dir / "run_out";
  json cfg_json = json::parse(minimal_config_json());
  cfg_json["output_dir"] = out.string();
  const fs::path cfg_path = write_text(dir / "run.json", cfg_json.dump(2));
  const std::string base = "--config " + cfg_path.string() + " ";

  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("generate") == 2);  // missing required --config

  CHECK(run_cli("generate " + base) == 0);
  CHECK(run_cli("train " + base) == 0);
  CHECK(run_cli("spectrum " + base) == 0);
  CHECK(run_cli("interp " + base) == 0);
  CHECK(run_cli("evaluate " + base) == 0);
  CHECK(fs::exists(out / "report.csv"));

  // Rank above the family's numerical rank: a numerical failure, exit 3.
  CHECK(run_cli("train " + base + "--set rank=10") == 3);

  // Training without snapshots: a storage failure, exit 4.
  CHECK(run_cli("train " + base + "--out " + (dir / "empty_out").string()) == 4);

  // Unknown config key: validation, exit 2.
  const fs::path bad_key = write_text(dir / "bad_key.json",
                                      R"({"oracle": "analytic", "bogus": 1,
      "training_parameters": [1.0, 2.0, 3.0], "rank": 1})");
  CHECK(run_cli("generate --config " + bad_key.string()) == 2);

  // Unparseable config file: format, exit 4.
  const fs::path bad_json = write_text(dir / "bad_json.json", "{ nope");
  CHECK(run_cli("generate --config " + bad_json.string()) == 4);
}
