#ifndef FRACCONN_COMMANDS_HPP
#define FRACCONN_COMMANDS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fracconn/dataset.hpp"
#include "fracconn/estimators.hpp"
#include "fracconn/montecarlo.hpp"

namespace fracconn::commands {

struct EstimateOptions {
  std::string memory_method = "ml";
  std::string gamma_method = "cov";
  std::string filter = "la8";
  int levels = 0;
};

/// Runs the full pipeline and writes pearson.csv, d_hat.csv, gamma_hat.csv,
/// nonfractal.csv, fractal.csv, and diagnostics.json into out_dir.
/// All-or-nothing: nothing is written when any estimator fails.
void cmd_estimate(const io::Dataset& dataset, const EstimateOptions& options,
                  const std::filesystem::path& out_dir);

/// Simulates from a JSON spec and writes series.csv plus truth.json.
void cmd_simulate(const std::filesystem::path& config_path,
                  const std::filesystem::path& out_dir,
                  std::optional<std::uint64_t> seed_override = std::nullopt);

/// Runs a Monte Carlo experiment (or sweep) from a JSON config; writes
/// bias_report*.json and bias_samples*.csv.
void cmd_experiment(const std::filesystem::path& config_path,
                    const std::filesystem::path& out_dir,
                    std::optional<std::uint64_t> seed_override = std::nullopt);

/// Attenuation-ratio surface over Hurst exponents in [0.05, 0.95]^2.
void cmd_grid(const std::filesystem::path& out_path);

/// Top-k edge list from a symmetric connectivity matrix file.
void cmd_graph(const std::filesystem::path& matrix_path, int k,
               const std::filesystem::path& out_path);

/// Parsed experiment config plus optional sweep request.
struct ExperimentRequest {
  montecarlo::ExperimentConfig config;
  std::optional<montecarlo::SweepAxis> sweep_axis;
  std::vector<double> sweep_values;
};

ExperimentRequest parse_experiment_config(const std::filesystem::path& path);

std::string bias_report_json(const montecarlo::BiasReport& report);
std::string bias_samples_csv(const montecarlo::BiasReport& report);

}  // namespace fracconn::commands

#endif  // FRACCONN_COMMANDS_HPP
