#ifndef FRACCONN_SIMULATOR_HPP
#define FRACCONN_SIMULATOR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracconn/longmem.hpp"

namespace fracconn::simulator {

/// Four short-memory regimes: independent / AR(1)-autocorrelated innovations,
/// each with or without forced cross-correlation.
enum class ShortMemoryCondition { C1A, C1B, C2A, C2B };

ShortMemoryCondition condition_from_label(const std::string& label);
std::string condition_label(ShortMemoryCondition c);

/// Generative spec for a multivariate ARFIMA(p, d, 0) path, p in {0, 1}.
struct ArfimaSpec {
  longmem::MemoryParams params;
  Eigen::VectorXd ar;       // per-series phi_{k,1}; empty means p = 0
  Eigen::MatrixXd mixing;   // innovation mixing matrix A
  std::uint64_t seed = 0;
  // Innovation stream labels; travel with their series under reordering so
  // that permuting the spec permutes the output rows exactly.
  std::vector<int> stream_ids;

  ArfimaSpec(longmem::MemoryParams p, Eigen::VectorXd ar_coeffs, Eigen::MatrixXd a,
             std::uint64_t seed);
  int size() const { return params.size(); }
};

struct SimulationOutput {
  Eigen::MatrixXd series;  // q x N
  longmem::FinSpec truth;
  Eigen::MatrixXd nonfractal_truth;  // D implied by truth.gamma
  std::optional<Eigen::MatrixXd> short_memory;  // q x N, diagnostics only
  int burnin = 0;
  int filter_length = 0;
  std::uint64_t seed = 0;
};

/// Innovation mixing matrix forcing the short-memory correlation of series
/// 2..q to rho while leaving series 1 uncorrelated. Smaller-magnitude root
/// of the defining quadratic; degenerate linear case handled at b = 0.
Eigen::MatrixXd build_innovation_matrix(int q, double rho);

struct ConditionFragment {
  Eigen::MatrixXd mixing;
  Eigen::VectorXd ar;  // empty for p = 0
};

ConditionFragment short_memory_condition(ShortMemoryCondition condition, int q,
                                         double rho = 0.0);

/// Exact covariance of the short-memory process implied by (A, phi):
/// AA^T for p = 0; (AA^T)_{m,n} / (1 - phi_m phi_n) for diagonal AR(1).
longmem::ShortMemoryCovariance analytic_short_memory_covariance(
    const Eigen::MatrixXd& mixing, const Eigen::VectorXd& ar);

constexpr int kDefaultBurnin = 1 << 12;

/// Seeded multivariate ARFIMA path: iid Gaussian innovations, mixed by A,
/// AR(1)-filtered, then convolved with the truncated fractional integration
/// filter; the first `burnin` samples are discarded. Deterministic per seed.
SimulationOutput simulate_arfima(const ArfimaSpec& spec, int n,
                                 int burnin = kDefaultBurnin,
                                 bool keep_short_memory = false);

}  // namespace fracconn::simulator

#endif  // FRACCONN_SIMULATOR_HPP
