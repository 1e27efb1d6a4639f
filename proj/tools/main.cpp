#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "fracconn/commands.hpp"
#include "fracconn/errors.hpp"

namespace {

// Exit codes: 0 success, 1 usage/validation error, 2 estimation failure.
constexpr int kOk = 0;
constexpr int kUsageError = 1;
constexpr int kEstimationError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracconn: wavelet-based fractal and nonfractal connectivity analysis"};
  app.require_subcommand(1);

  std::string config_path, input_path, out_dir = ".", out_file;
  std::string memory = "ml", gamma = "cov", filter = "la8", orientation = "columns";
  std::string delimiter = ",";
  int levels = 0;
  int k = 20;
  bool no_header = false;
  std::optional<std::uint64_t> seed;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "override the config seed");
  };

  auto* simulate = app.add_subcommand("simulate", "generate ARFIMA sample paths");
  simulate->add_option("--config", config_path, "JSON simulation spec")->required();
  simulate->add_option("--out-dir", out_dir, "output directory");
  add_seed(simulate);

  auto* estimate = app.add_subcommand("estimate", "connectivity from a CSV time series");
  estimate->add_option("input", input_path, "CSV matrix of time series")->required();
  estimate->add_option("--memory", memory, "memory estimator: lms or ml");
  estimate->add_option("--gamma", gamma, "covariance estimator: lin, cov, or sdf");
  estimate->add_option("--filter", filter, "wavelet filter: haar or la8");
  estimate->add_option("--levels", levels, "decomposition depth (0 = automatic)");
  estimate->add_option("--orientation", orientation,
                       "columns (default) or rows as series");
  estimate->add_option("--delimiter", delimiter, "cell delimiter (default ,)");
  estimate->add_flag("--no-header", no_header, "input has no header row");
  estimate->add_option("--out-dir", out_dir, "output directory");

  auto* experiment = app.add_subcommand("experiment", "Monte Carlo bias study");
  experiment->add_option("--config", config_path, "JSON experiment config")->required();
  experiment->add_option("--out-dir", out_dir, "output directory");
  add_seed(experiment);

  auto* grid = app.add_subcommand("grid", "attenuation-ratio surface over (H1, H2)");
  grid->add_option("--out", out_file, "output CSV path")->required();

  auto* graph = app.add_subcommand("graph", "top-k edge list from a connectivity matrix");
  graph->add_option("input", input_path, "symmetric connectivity matrix CSV")
      ->required();
  graph->add_option("--k", k, "number of edges to keep");
  graph->add_option("--out", out_file, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsageError;
  }

  try {
    if (simulate->parsed()) {
      fracconn::commands::cmd_simulate(config_path, out_dir, seed);
    } else if (estimate->parsed()) {
      fracconn::io::IngestOptions ingest;
      ingest.series_in_columns = orientation != "rows";
      ingest.header_row = !no_header;
      if (delimiter.size() != 1) {
        throw fracconn::invalid_input("delimiter must be a single character");
      }
      ingest.delimiter = delimiter[0];
      const fracconn::io::Dataset ds = fracconn::io::ingest_csv(input_path, ingest);
      if (ds.discarded_samples > 0) {
        std::cerr << "warning: truncated " << ds.discarded_samples
                  << " trailing samples to reach a power-of-two length of "
                  << ds.length() << "\n";
      }
      fracconn::commands::EstimateOptions opts;
      opts.memory_method = memory;
      opts.gamma_method = gamma;
      opts.filter = filter;
      opts.levels = levels;
      fracconn::commands::cmd_estimate(ds, opts, out_dir);
    } else if (experiment->parsed()) {
      fracconn::commands::cmd_experiment(config_path, out_dir, seed);
    } else if (grid->parsed()) {
      fracconn::commands::cmd_grid(out_file);
    } else if (graph->parsed()) {
      fracconn::commands::cmd_graph(input_path, k, out_file);
    }
  } catch (const fracconn::estimation_failure& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return kEstimationError;
  } catch (const fracconn::degenerate_input& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return kEstimationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kOk;
}
