// grom: non-intrusive parametric model-order reduction on desk-scale 1D
// problems. Pipeline: generate -> train -> interp/galerkin -> evaluate.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "grom/errors.hpp"
#include "grom/pipeline.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitStorage = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grassmann-interpolation reduced-order modeling toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  bool force = false;
  int jobs = 0;
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_override, "override the configured output directory");
  app.add_flag("--force", force, "regenerate artifacts that already exist");
  app.add_option("--jobs", jobs, "parallel workers for per-query stages")
      ->check(CLI::PositiveNumber);
  app.add_option("--set", overrides,
                 "override a config field by dotted path, e.g. --set bicitsgm.calib_power_spatial=4");

  auto* generate = app.add_subcommand("generate", "run the oracle at every training parameter");
  auto* train = app.add_subcommand("train", "build the POD training database");
  auto* interp = app.add_subcommand("interp", "Bi-CITSGM prediction at every query");
  auto* galerkin = app.add_subcommand("galerkin", "intrusive ITSGM/Galerkin baseline");
  auto* evaluate = app.add_subcommand("evaluate", "aggregate errors, timings, and spectra");
  auto* spectrum = app.add_subcommand("spectrum", "export per-parameter eigenvalue/RIC table");
  // The flags are global: accept them before or after the command word.
  for (CLI::App* sub : {generate, train, interp, galerkin, evaluate, spectrum}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    grom::RunConfig cfg = grom::load_run_config(config_path, overrides);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (jobs > 0) cfg.jobs = jobs;

    if (generate->parsed()) {
      grom::cmd_generate(cfg, force);
    } else if (train->parsed()) {
      grom::cmd_train(cfg);
    } else if (interp->parsed()) {
      grom::cmd_interp(cfg);
    } else if (galerkin->parsed()) {
      grom::cmd_galerkin(cfg);
    } else if (evaluate->parsed()) {
      grom::cmd_evaluate(cfg);
    } else if (spectrum->parsed()) {
      grom::cmd_spectrum(cfg);
    }
    return 0;
  } catch (const grom::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const grom::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const grom::StorageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStorage;
  } catch (const grom::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStorage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
