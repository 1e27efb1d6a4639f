#ifndef FRACCONN_MONTECARLO_HPP
#define FRACCONN_MONTECARLO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fracconn/estimators.hpp"
#include "fracconn/simulator.hpp"

namespace fracconn::montecarlo {

using EstimatorPair = std::pair<estimators::MemoryMethod, estimators::GammaMethod>;

std::string pair_name(const EstimatorPair& pair);
EstimatorPair pair_from_name(const std::string& name);  // e.g. "ML-COV"

/// All six memory-method x covariance-method combinations.
std::vector<EstimatorPair> all_estimator_pairs();

struct ExperimentConfig {
  simulator::ShortMemoryCondition condition = simulator::ShortMemoryCondition::C1A;
  int q = 4;
  int n = 1 << 11;
  int reps = 100;
  double rho = 0.0;
  Eigen::VectorXd d_set;  // cycled to length q; empty = equally spaced over (-1/2, 1/2)
  std::vector<EstimatorPair> estimator_pairs;  // empty = all six
  std::uint64_t base_seed = 1;
  std::string filter = "la8";
  int levels = 0;  // 0 = default_levels(n)
  int burnin = simulator::kDefaultBurnin;

  /// d_set cycled/truncated to exactly q entries; when d_set is empty, the
  /// parameters are equally distributed over (-1/2, 1/2): d_k = -1/2 + k/(q+1).
  Eigen::VectorXd memory_parameters() const;
  std::vector<EstimatorPair> pairs() const;
  void validate() const;
};

/// Box-plot statistics: interpolated (type-7) quartiles, whiskers at the
/// last sample within 1.5 IQR, and moment summaries.
struct BoxSummary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  double mean = 0.0;
  double stdev = 0.0;
  std::vector<double> outliers;
  int count = 0;

  double iqr() const { return q3 - q1; }
};

BoxSummary summarize(const std::vector<double>& samples);

struct BiasSample {
  int replicate;
  int row;
  int col;
  double bias;  // D_hat - D_true
};

struct PairReport {
  EstimatorPair estimator;
  std::vector<BiasSample> samples;
  BoxSummary summary;
  int failed_entries = 0;  // flagged or failed estimates, excluded from summary
};

struct BiasReport {
  ExperimentConfig config;
  std::vector<PairReport> pairs;
  int failed_replicates = 0;  // replicates where simulation/decomposition failed
  double elapsed_seconds = 0.0;
};

/// Seeded replicate batch: simulate, decompose once, run every requested
/// estimator pair on the shared data, score bias of the nonfractal
/// connectivity against the analytic truth. Deterministic per config.
BiasReport run_experiment(const ExperimentConfig& config);

enum class SweepAxis { Dimension, Length, Correlation };

SweepAxis sweep_axis_from_name(const std::string& name);

/// One report per axis value, sharing base_seed so that runs are paired by
/// common random numbers.
std::vector<BiasReport> sweep(SweepAxis axis, const std::vector<double>& values,
                              const ExperimentConfig& base_config);

/// Worker threads used for replicates: min(hardware, FRACCONN_THREADS).
int worker_threads();

}  // namespace fracconn::montecarlo

#endif  // FRACCONN_MONTECARLO_HPP
