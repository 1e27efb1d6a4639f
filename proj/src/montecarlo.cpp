#include "fracconn/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "fracconn/errors.hpp"

namespace fracconn::montecarlo {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double quantile_type7(const std::vector<double>& sorted, double p) {
  const size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = p * static_cast<double>(n - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

bool condition_restricts_rows(simulator::ShortMemoryCondition c) {
  return c == simulator::ShortMemoryCondition::C2A ||
         c == simulator::ShortMemoryCondition::C2B;
}

}  // namespace

std::string pair_name(const EstimatorPair& pair) {
  return estimators::memory_method_name(pair.first) + "-" +
         estimators::gamma_method_name(pair.second);
}

EstimatorPair pair_from_name(const std::string& name) {
  const auto dash = name.find('-');
  if (dash == std::string::npos) {
    throw invalid_input("estimator pair '" + name + "' must look like ML-COV");
  }
  return {estimators::memory_method_from_name(name.substr(0, dash)),
          estimators::gamma_method_from_name(name.substr(dash + 1))};
}

std::vector<EstimatorPair> all_estimator_pairs() {
  std::vector<EstimatorPair> pairs;
  for (auto mem : {estimators::MemoryMethod::Lms, estimators::MemoryMethod::Ml}) {
    for (auto gam : {estimators::GammaMethod::Lin, estimators::GammaMethod::Cov,
                     estimators::GammaMethod::Sdf}) {
      pairs.emplace_back(mem, gam);
    }
  }
  return pairs;
}

Eigen::VectorXd ExperimentConfig::memory_parameters() const {
  Eigen::VectorXd d(q);
  if (d_set.size() == 0) {
    // Equally distributed over (-1/2, 1/2): d_k = -1/2 + k/(q+1).
    // At q = 4 this yields {-0.3, -0.1, 0.1, 0.3}.
    for (int k = 0; k < q; ++k) d[k] = -0.5 + static_cast<double>(k + 1) / (q + 1);
  } else {
    for (int k = 0; k < q; ++k) d[k] = d_set[k % d_set.size()];
  }
  return d;
}

std::vector<EstimatorPair> ExperimentConfig::pairs() const {
  return estimator_pairs.empty() ? all_estimator_pairs() : estimator_pairs;
}

void ExperimentConfig::validate() const {
  if (reps < 1) throw invalid_input("replicate count must be >= 1");
  if (q < 2) throw invalid_input("dimension must be >= 2");
  if (!is_power_of_two(n)) throw invalid_input("series length must be a power of two");
  if (burnin < 0) throw invalid_input("burn-in must be non-negative");
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw invalid_input("innovation correlation must lie in [0, 1)");
  }
  for (int k = 0; k < d_set.size(); ++k) {
    if (!(std::abs(d_set[k]) < 0.5)) {
      throw invalid_input("memory parameters must lie in (-0.5, 0.5)");
    }
  }
}

BoxSummary summarize(const std::vector<double>& samples) {
  if (samples.empty()) throw insufficient_data("cannot summarize an empty sample set");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());

  BoxSummary s;
  s.count = static_cast<int>(sorted.size());
  s.median = quantile_type7(sorted, 0.5);
  s.q1 = quantile_type7(sorted, 0.25);
  s.q3 = quantile_type7(sorted, 0.75);
  const double reach = 1.5 * (s.q3 - s.q1);
  s.whisker_low = sorted.front();
  s.whisker_high = sorted.back();
  for (double x : sorted) {
    if (x >= s.q1 - reach) {
      s.whisker_low = x;
      break;
    }
  }
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
    if (*it <= s.q3 + reach) {
      s.whisker_high = *it;
      break;
    }
  }
  for (double x : sorted) {
    if (x < s.whisker_low || x > s.whisker_high) s.outliers.push_back(x);
  }
  double mean = 0.0;
  for (double x : sorted) mean += x;
  mean /= static_cast<double>(sorted.size());
  double var = 0.0;
  for (double x : sorted) var += (x - mean) * (x - mean);
  s.mean = mean;
  s.stdev = sorted.size() > 1 ? std::sqrt(var / (static_cast<double>(sorted.size()) - 1.0))
                              : 0.0;
  return s;
}

int worker_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("FRACCONN_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

BiasReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const Eigen::VectorXd d = config.memory_parameters();
  const simulator::ConditionFragment frag =
      simulator::short_memory_condition(config.condition, config.q, config.rho);
  const longmem::ShortMemoryCovariance gamma_truth =
      simulator::analytic_short_memory_covariance(frag.mixing, frag.ar);
  const Eigen::MatrixXd& g = gamma_truth.matrix();
  Eigen::VectorXd scale = g.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd d_truth = scale.asDiagonal() * g * scale.asDiagonal();

  // Scored entries: the innovation pattern forces rho only on series 2..q,
  // so pairs involving series 1 are excluded under those conditions.
  std::vector<std::pair<int, int>> entries;
  const int first = condition_restricts_rows(config.condition) ? 1 : 0;
  for (int m = first; m < config.q; ++m) {
    for (int k = m + 1; k < config.q; ++k) entries.emplace_back(m, k);
  }

  const std::vector<EstimatorPair> pairs = config.pairs();
  const wavelet::WaveletFilter filter = wavelet::WaveletFilter::by_name(config.filter);
  const int levels =
      config.levels > 0 ? config.levels : wavelet::default_levels(config.n);

  struct ReplicateResult {
    bool failed = false;
    // Per pair, per scored entry: bias sample (NaN = flagged entry).
    std::vector<std::vector<double>> biases;
  };
  std::vector<ReplicateResult> results(static_cast<size_t>(config.reps));

  auto run_one = [&](int r) {
    ReplicateResult& res = results[static_cast<size_t>(r)];
    try {
      simulator::ArfimaSpec spec(longmem::MemoryParams(d), frag.ar, frag.mixing,
                                 config.base_seed + static_cast<std::uint64_t>(r));
      const simulator::SimulationOutput sim =
          simulator::simulate_arfima(spec, config.n, config.burnin);

      std::vector<wavelet::WaveletDecomposition> decomps;
      decomps.reserve(static_cast<size_t>(config.q));
      for (int m = 0; m < config.q; ++m) {
        decomps.push_back(
            wavelet::dwt(sim.series.row(m).transpose(), filter, levels));
      }

      Eigen::VectorXd d_lms, d_ml;
      for (const auto& pair : pairs) {
        if (pair.first == estimators::MemoryMethod::Lms && d_lms.size() == 0) {
          d_lms = estimators::estimate_memory_lms(decomps).d_hat;
        }
        if (pair.first == estimators::MemoryMethod::Ml && d_ml.size() == 0) {
          d_ml = estimators::estimate_memory_ml(decomps).d_hat;
        }
      }

      res.biases.resize(pairs.size());
      for (size_t p = 0; p < pairs.size(); ++p) {
        const Eigen::VectorXd& d_hat =
            pairs[p].first == estimators::MemoryMethod::Lms ? d_lms : d_ml;
        std::vector<double>& out = res.biases[p];
        out.resize(entries.size(), std::numeric_limits<double>::quiet_NaN());
        try {
          const Eigen::MatrixXd gamma_hat =
              estimators::estimate_gamma(decomps, d_hat, pairs[p].second);
          const estimators::ConnectivityPair conn =
              estimators::connectivity(gamma_hat, d_hat);
          for (size_t e = 0; e < entries.size(); ++e) {
            const auto [m, k] = entries[e];
            out[e] = conn.nonfractal(m, k) - d_truth(m, k);
          }
        } catch (const std::runtime_error&) {
          // Leave this pair's entries flagged; other pairs still count.
        }
      }
    } catch (const std::runtime_error&) {
      res.failed = true;
    }
  };

  const int threads = std::min(worker_threads(), config.reps);
  if (threads <= 1) {
    for (int r = 0; r < config.reps; ++r) run_one(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < config.reps; r = next.fetch_add(1)) {
          run_one(r);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  BiasReport report;
  report.config = config;
  for (size_t p = 0; p < pairs.size(); ++p) {
    PairReport pr;
    pr.estimator = pairs[p];
    std::vector<double> clean;
    for (int r = 0; r < config.reps; ++r) {
      const ReplicateResult& res = results[static_cast<size_t>(r)];
      if (res.failed) continue;
      for (size_t e = 0; e < entries.size(); ++e) {
        const double b = res.biases[p][e];
        if (std::isfinite(b)) {
          pr.samples.push_back({r, entries[e].first, entries[e].second, b});
          clean.push_back(b);
        } else {
          ++pr.failed_entries;
        }
      }
    }
    if (clean.empty()) {
      throw estimation_failure("estimator pair " + pair_name(pairs[p]) +
                               " produced no usable samples");
    }
    pr.summary = summarize(clean);
    report.pairs.push_back(std::move(pr));
  }
  for (const auto& res : results) {
    if (res.failed) ++report.failed_replicates;
  }
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

SweepAxis sweep_axis_from_name(const std::string& name) {
  if (name == "dimension") return SweepAxis::Dimension;
  if (name == "length") return SweepAxis::Length;
  if (name == "correlation") return SweepAxis::Correlation;
  throw invalid_input("unknown sweep axis '" + name +
                      "' (expected dimension, length, or correlation)");
}

std::vector<BiasReport> sweep(SweepAxis axis, const std::vector<double>& values,
                              const ExperimentConfig& base_config) {
  if (values.empty()) throw invalid_input("sweep needs at least one value");
  std::vector<BiasReport> reports;
  reports.reserve(values.size());
  for (double v : values) {
    ExperimentConfig config = base_config;
    switch (axis) {
      case SweepAxis::Dimension: config.q = static_cast<int>(v); break;
      case SweepAxis::Length: config.n = static_cast<int>(v); break;
      case SweepAxis::Correlation: config.rho = v; break;
    }
    reports.push_back(run_experiment(config));
  }
  return reports;
}

}  // namespace fracconn::montecarlo
