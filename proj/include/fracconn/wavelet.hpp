#ifndef FRACCONN_WAVELET_HPP
#define FRACCONN_WAVELET_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fracconn::wavelet {

/// Orthonormal wavelet filter pair. h is the quadrature mirror of g:
/// h[l] = (-1)^l * g[L-1-l].
struct WaveletFilter {
  std::string name;
  std::vector<double> g;  // low-pass (scaling) coefficients
  std::vector<double> h;  // high-pass (wavelet) coefficients

  int width() const { return static_cast<int>(g.size()); }

  static WaveletFilter haar();
  static WaveletFilter la8();  // Daubechies least-asymmetric, width 8
  static WaveletFilter by_name(const std::string& name);

  /// Throws invalid_input when the filter violates orthonormality,
  /// unit-energy, or quadrature-mirror constraints.
  void validate() const;
};

/// Result of the orthonormal pyramid decomposition of one series.
/// details[j-1] holds the scale-j wavelet coefficients (length N/2^j),
/// smooth the level-J scaling coefficients. boundary[j-1] counts the
/// trailing coefficients at scale j affected by circular wraparound.
struct WaveletDecomposition {
  int levels = 0;
  int length = 0;
  std::string filter_name;
  std::vector<Eigen::VectorXd> details;
  Eigen::VectorXd smooth;
  std::vector<int> boundary;

  const Eigen::VectorXd& detail(int j) const;  // 1-based scale index
  int boundary_count(int j) const;

  bool compatible_with(const WaveletDecomposition& other) const {
    return levels == other.levels && length == other.length &&
           filter_name == other.filter_name;
  }
};

/// Orthonormal DWT with periodic boundary handling.
/// Requires N divisible by 2^levels.
WaveletDecomposition dwt(const Eigen::VectorXd& series, const WaveletFilter& filter,
                         int levels);

/// Inverse pyramid; exact up to roundoff for matching filter.
Eigen::VectorXd idwt(const WaveletDecomposition& decomp, const WaveletFilter& filter);

/// Default decomposition depth: log2(N) - 3, so the coarsest scale keeps
/// at least 8 coefficients. Clamped to >= 1.
int default_levels(int n);

/// nu_hat(j) = (1/n'_j) sum_t W_a(j,t) W_b(j,t) over non-excluded coefficients.
double wavelet_covariance(const WaveletDecomposition& a, const WaveletDecomposition& b,
                          int j, bool exclude_boundary = true);

double wavelet_variance(const WaveletDecomposition& a, int j,
                        bool exclude_boundary = true);

/// Wavelet correlation at scale j, clamped to [-1, 1].
double wavelet_correlation(const WaveletDecomposition& a, const WaveletDecomposition& b,
                           int j, bool exclude_boundary = true);

}  // namespace fracconn::wavelet

#endif  // FRACCONN_WAVELET_HPP
