#include "fracconn/commands.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "fracconn/errors.hpp"
#include "fracconn/simulator.hpp"

namespace fracconn::commands {

using nlohmann::json;

namespace {

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot read config '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw invalid_input("config '" + path.string() + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, const std::string& key) {
  if (!j.contains(key)) throw invalid_input("config missing required key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw invalid_input("config key '" + key + "': " + e.what());
  }
}

template <typename T>
T optional_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw invalid_input("config key '" + key + "': " + e.what());
  }
}

json summary_to_json(const montecarlo::BoxSummary& s) {
  return json{{"median", s.median},
              {"q1", s.q1},
              {"q3", s.q3},
              {"whiskerLow", s.whisker_low},
              {"whiskerHigh", s.whisker_high},
              {"mean", s.mean},
              {"stdev", s.stdev},
              {"count", s.count},
              {"outliers", s.outliers}};
}

json config_to_json(const montecarlo::ExperimentConfig& c) {
  std::vector<std::string> pairs;
  for (const auto& p : c.pairs()) pairs.push_back(montecarlo::pair_name(p));
  const Eigen::VectorXd dvec = c.memory_parameters();
  std::vector<double> d(dvec.data(), dvec.data() + dvec.size());
  return json{{"condition", simulator::condition_label(c.condition)},
              {"q", c.q},
              {"N", c.n},
              {"reps", c.reps},
              {"rho", c.rho},
              {"dSet", d},
              {"estimatorPairs", pairs},
              {"baseSeed", c.base_seed},
              {"filter", c.filter},
              {"levels", c.levels},
              {"burnin", c.burnin}};
}

std::vector<std::string> default_labels(int q) {
  std::vector<std::string> labels;
  for (int k = 0; k < q; ++k) labels.push_back("S" + std::to_string(k + 1));
  return labels;
}

}  // namespace

void cmd_estimate(const io::Dataset& dataset, const EstimateOptions& options,
                  const std::filesystem::path& out_dir) {
  estimators::PipelineOptions pipeline;
  pipeline.memory_method = estimators::memory_method_from_name(options.memory_method);
  pipeline.gamma_method = estimators::gamma_method_from_name(options.gamma_method);
  pipeline.filter = options.filter;
  pipeline.levels = options.levels;

  // Everything is computed before any file is written.
  const estimators::ConnectivityResult result =
      estimators::estimate_connectivity(dataset.series, pipeline);

  json diag{{"memoryMethod", estimators::memory_method_name(result.memory_method)},
            {"gammaMethod", estimators::gamma_method_name(result.gamma_method)},
            {"filter", options.filter},
            {"levels", pipeline.levels > 0
                           ? pipeline.levels
                           : wavelet::default_levels(dataset.length())},
            {"scaleIntervalLow", result.j_low},
            {"scaleIntervalHigh", result.j_high},
            {"length", dataset.length()},
            {"discardedSamples", dataset.discarded_samples},
            {"source", dataset.source}};
  std::vector<int> flagged;
  for (int m = 0; m < result.nonfractal.rows(); ++m) {
    for (int n = m + 1; n < result.nonfractal.cols(); ++n) {
      if (!std::isfinite(result.nonfractal(m, n))) {
        flagged.push_back(m);
        flagged.push_back(n);
      }
    }
  }
  diag["flaggedPairs"] = flagged;

  std::filesystem::create_directories(out_dir);
  io::write_matrix_csv(out_dir / "pearson.csv", {dataset.labels, result.pearson});
  io::write_vector_csv(out_dir / "d_hat.csv", dataset.labels, result.d_hat, "d_hat");
  io::write_matrix_csv(out_dir / "gamma_hat.csv", {dataset.labels, result.gamma_hat});
  io::write_matrix_csv(out_dir / "nonfractal.csv", {dataset.labels, result.nonfractal});
  io::write_matrix_csv(out_dir / "fractal.csv", {dataset.labels, result.fractal});
  io::atomic_write(out_dir / "diagnostics.json", diag.dump(2) + "\n");
}

void cmd_simulate(const std::filesystem::path& config_path,
                  const std::filesystem::path& out_dir,
                  std::optional<std::uint64_t> seed_override) {
  const json j = load_json(config_path);
  const int q = require<int>(j, "q");
  const int n = require<int>(j, "N");
  const std::uint64_t seed =
      seed_override.value_or(optional_or<std::uint64_t>(j, "seed", 0));
  const int burnin = optional_or<int>(j, "burnin", simulator::kDefaultBurnin);

  std::vector<double> d_list =
      optional_or<std::vector<double>>(j, "d", {-0.3, -0.1, 0.1, 0.3});
  if (d_list.empty()) throw invalid_input("config key 'd': must be non-empty");
  Eigen::VectorXd d(q);
  for (int k = 0; k < q; ++k) d[k] = d_list[static_cast<size_t>(k) % d_list.size()];

  simulator::ConditionFragment frag;
  if (j.contains("condition")) {
    frag = simulator::short_memory_condition(
        simulator::condition_from_label(require<std::string>(j, "condition")), q,
        optional_or<double>(j, "rho", 0.0));
  } else {
    frag.mixing = Eigen::MatrixXd::Identity(q, q);
    if (j.contains("ar")) {
      frag.ar = Eigen::VectorXd::Constant(q, require<double>(j, "ar"));
    }
  }

  simulator::ArfimaSpec spec(longmem::MemoryParams(d), frag.ar, frag.mixing, seed);
  const simulator::SimulationOutput out = simulator::simulate_arfima(spec, n, burnin);

  std::filesystem::create_directories(out_dir);
  const auto labels = default_labels(q);
  io::write_series_csv(out_dir / "series.csv", labels, out.series);

  const Eigen::MatrixXd& gamma = out.truth.gamma.matrix();
  json truth{{"seed", seed},
             {"burnin", burnin},
             {"N", n},
             {"d", d_list},
             {"gamma", json::array()},
             {"nonfractal", json::array()}};
  for (int r = 0; r < q; ++r) {
    json grow = json::array(), drow = json::array();
    for (int c = 0; c < q; ++c) {
      grow.push_back(gamma(r, c));
      drow.push_back(out.nonfractal_truth(r, c));
    }
    truth["gamma"].push_back(grow);
    truth["nonfractal"].push_back(drow);
  }
  io::atomic_write(out_dir / "truth.json", truth.dump(2) + "\n");
}

ExperimentRequest parse_experiment_config(const std::filesystem::path& path) {
  const json j = load_json(path);
  ExperimentRequest req;
  montecarlo::ExperimentConfig& c = req.config;
  c.condition =
      simulator::condition_from_label(optional_or<std::string>(j, "condition", "1A"));
  c.q = optional_or<int>(j, "q", 4);
  c.n = require<int>(j, "N");
  c.reps = require<int>(j, "reps");
  c.rho = optional_or<double>(j, "rho", 0.0);
  const auto d_list = optional_or<std::vector<double>>(j, "dSet", {});
  if (!d_list.empty()) {
    c.d_set = Eigen::Map<const Eigen::VectorXd>(d_list.data(),
                                                static_cast<Eigen::Index>(d_list.size()));
  }
  for (const auto& name :
       optional_or<std::vector<std::string>>(j, "estimatorPairs", {})) {
    c.estimator_pairs.push_back(montecarlo::pair_from_name(name));
  }
  c.base_seed = optional_or<std::uint64_t>(j, "baseSeed", 1);
  c.filter = optional_or<std::string>(j, "filter", "la8");
  c.levels = optional_or<int>(j, "levels", 0);
  c.burnin = optional_or<int>(j, "burnin", simulator::kDefaultBurnin);
  c.validate();

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    req.sweep_axis = montecarlo::sweep_axis_from_name(require<std::string>(s, "axis"));
    req.sweep_values = require<std::vector<double>>(s, "values");
    if (req.sweep_values.empty()) {
      throw invalid_input("config key 'sweep.values': must be non-empty");
    }
  }
  return req;
}

std::string bias_report_json(const montecarlo::BiasReport& report) {
  json out{{"config", config_to_json(report.config)},
           {"failedReplicates", report.failed_replicates},
           {"pairs", json::array()}};
  for (const auto& pr : report.pairs) {
    out["pairs"].push_back(json{{"pair", montecarlo::pair_name(pr.estimator)},
                                {"failedEntries", pr.failed_entries},
                                {"summary", summary_to_json(pr.summary)}});
  }
  return out.dump(2) + "\n";
}

std::string bias_samples_csv(const montecarlo::BiasReport& report) {
  std::string out = "pair,replicate,row,col,bias\n";
  for (const auto& pr : report.pairs) {
    const std::string name = montecarlo::pair_name(pr.estimator);
    for (const auto& s : pr.samples) {
      out += name + "," + std::to_string(s.replicate) + "," + std::to_string(s.row + 1) +
             "," + std::to_string(s.col + 1) + "," + io::format_value(s.bias) + "\n";
    }
  }
  return out;
}

void cmd_experiment(const std::filesystem::path& config_path,
                    const std::filesystem::path& out_dir,
                    std::optional<std::uint64_t> seed_override) {
  ExperimentRequest req = parse_experiment_config(config_path);
  if (seed_override) req.config.base_seed = *seed_override;
  std::filesystem::create_directories(out_dir);

  auto emit = [&](const montecarlo::BiasReport& report, const std::string& suffix) {
    io::atomic_write(out_dir / ("bias_report" + suffix + ".json"),
                     bias_report_json(report));
    io::atomic_write(out_dir / ("bias_samples" + suffix + ".csv"),
                     bias_samples_csv(report));
  };

  if (req.sweep_axis) {
    const auto reports =
        montecarlo::sweep(*req.sweep_axis, req.sweep_values, req.config);
    for (size_t i = 0; i < reports.size(); ++i) {
      std::string v = std::to_string(req.sweep_values[i]);
      v.erase(v.find_last_not_of('0') + 1);
      if (!v.empty() && v.back() == '.') v.pop_back();
      emit(reports[i], "_" + v);
    }
  } else {
    emit(montecarlo::run_experiment(req.config), "");
  }
}

void cmd_grid(const std::filesystem::path& out_path) {
  constexpr double kLow = 0.05;
  constexpr double kStep = 0.0225;
  constexpr int kCount = 41;  // 0.05 .. 0.95
  Eigen::VectorXd d(kCount);
  std::vector<std::string> labels;
  for (int i = 0; i < kCount; ++i) {
    const double hurst = kLow + kStep * i;
    d[i] = hurst - 0.5;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "H=%.4f", hurst);
    labels.emplace_back(buf);
  }
  const Eigen::MatrixXd grid = longmem::attenuation_grid(d);
  io::write_matrix_csv(out_path, {labels, grid});
}

void cmd_graph(const std::filesystem::path& matrix_path, int k,
               const std::filesystem::path& out_path) {
  const io::LabeledMatrix matrix = io::read_matrix_csv(matrix_path);
  io::write_edges_csv(out_path, io::top_edges(matrix, k));
}

}  // namespace fracconn::commands
