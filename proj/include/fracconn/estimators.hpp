#ifndef FRACCONN_ESTIMATORS_HPP
#define FRACCONN_ESTIMATORS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fracconn/longmem.hpp"
#include "fracconn/wavelet.hpp"

namespace fracconn::estimators {

enum class MemoryMethod { Lms, Ml };
enum class GammaMethod { Lin, Cov, Sdf };

MemoryMethod memory_method_from_name(const std::string& name);
GammaMethod gamma_method_from_name(const std::string& name);
std::string memory_method_name(MemoryMethod m);
std::string gamma_method_name(GammaMethod g);

struct MemoryEstimate {
  Eigen::VectorXd d_hat;
  MemoryMethod method = MemoryMethod::Lms;
  int j_low = 0;   // scale interval used (LMS) or [1, J] (ML)
  int j_high = 0;
  double fit_diagnostic = 0.0;  // residual variance (LMS) or likelihood value (ML)
  // LMS slopes outside the stationary range are reported, not clamped.
  std::vector<int> out_of_range_series;
};

struct ConnectivityResult {
  Eigen::MatrixXd pearson;
  Eigen::VectorXd d_hat;
  Eigen::MatrixXd gamma_hat;
  Eigen::MatrixXd nonfractal;  // D-hat
  Eigen::MatrixXd fractal;     // rho-hat-infinity
  MemoryMethod memory_method = MemoryMethod::Ml;
  GammaMethod gamma_method = GammaMethod::Cov;
  int j_low = 0;
  int j_high = 0;
};

/// Memory parameters by least squares on log2 wavelet variance vs scale,
/// searching all intervals of width >= 3 for the minimum pooled residual
/// variance. Ties go to the widest interval, then the lowest starting scale.
MemoryEstimate estimate_memory_lms(
    const std::vector<wavelet::WaveletDecomposition>& decomps);

/// LMS core on precomputed per-scale wavelet variances: nu(m, j-1) for
/// scales j = 1..J. Non-positive entries mark the scale unusable.
MemoryEstimate estimate_memory_lms_from_variances(const Eigen::MatrixXd& nu);

/// Single-series wavelet maximum likelihood; golden-section search of the
/// reduced log likelihood over d in [-0.499, 0.499] to |delta d| <= 1e-6.
MemoryEstimate estimate_memory_ml(const wavelet::WaveletDecomposition& decomp);

/// ML applied per series; fit_diagnostic is the summed likelihood optimum.
MemoryEstimate estimate_memory_ml(
    const std::vector<wavelet::WaveletDecomposition>& decomps);

MemoryEstimate estimate_memory(const std::vector<wavelet::WaveletDecomposition>& decomps,
                               MemoryMethod method);

Eigen::MatrixXd estimate_gamma(const std::vector<wavelet::WaveletDecomposition>& decomps,
                               const Eigen::VectorXd& d_hat, GammaMethod method);

Eigen::MatrixXd estimate_gamma_sdf(
    const std::vector<wavelet::WaveletDecomposition>& decomps,
    const Eigen::VectorXd& d_hat);
Eigen::MatrixXd estimate_gamma_cov(
    const std::vector<wavelet::WaveletDecomposition>& decomps,
    const Eigen::VectorXd& d_hat);
Eigen::MatrixXd estimate_gamma_lin(
    const std::vector<wavelet::WaveletDecomposition>& decomps,
    const Eigen::VectorXd& d_hat);

/// Algebraic inversion of the coarse-scale covariance law from per-scale
/// wavelet covariances nu[j-1], j = 1..J. Returns NaN when no scale carries
/// usable signal (the flagged-entry contract of the LIN estimator).
double invert_scale_law(const Eigen::VectorXd& nu, double dm, double dn);

struct ConnectivityPair {
  Eigen::MatrixXd nonfractal;
  Eigen::MatrixXd fractal;
};

/// Nonfractal connectivity (correlation implied by gamma_hat, clamped to
/// [-1, 1]) and its attenuated fractal counterpart; unit diagonals enforced.
ConnectivityPair connectivity(const Eigen::MatrixXd& gamma_hat,
                              const Eigen::VectorXd& d_hat);

/// Sample Pearson correlation of the rows of a q x N matrix.
Eigen::MatrixXd pearson_correlation(const Eigen::MatrixXd& series);

struct PipelineOptions {
  MemoryMethod memory_method = MemoryMethod::Ml;
  GammaMethod gamma_method = GammaMethod::Cov;
  std::string filter = "la8";
  int levels = 0;  // 0 = default_levels(N)
};

/// Full estimation pipeline on raw series: decompose, estimate d, estimate
/// gamma, form connectivity matrices plus the Pearson baseline.
ConnectivityResult estimate_connectivity(const Eigen::MatrixXd& series,
                                         const PipelineOptions& options);

}  // namespace fracconn::estimators

#endif  // FRACCONN_ESTIMATORS_HPP
