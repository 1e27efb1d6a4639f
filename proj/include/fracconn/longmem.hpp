#ifndef FRACCONN_LONGMEM_HPP
#define FRACCONN_LONGMEM_HPP

#include <Eigen/Dense>
#include <complex>

namespace fracconn::longmem {

/// Per-series memory parameters; stationary range (-0.5, 0.5) enforced.
class MemoryParams {
 public:
  explicit MemoryParams(Eigen::VectorXd d);
  const Eigen::VectorXd& values() const { return d_; }
  double operator[](int k) const { return d_[k]; }
  int size() const { return static_cast<int>(d_.size()); }

 private:
  Eigen::VectorXd d_;
};

/// Covariance of the short-memory (fractal-free) processes. Symmetric,
/// positive diagonal, PSD up to 1e-9 eigenvalue tolerance.
class ShortMemoryCovariance {
 public:
  explicit ShortMemoryCovariance(Eigen::MatrixXd gamma);
  const Eigen::MatrixXd& matrix() const { return gamma_; }
  double operator()(int m, int n) const { return gamma_(m, n); }
  int size() const { return static_cast<int>(gamma_.rows()); }

 private:
  Eigen::MatrixXd gamma_;
};

/// Fully specified fractionally integrated noise model.
struct FinSpec {
  MemoryParams params;
  ShortMemoryCovariance gamma;

  FinSpec(MemoryParams p, ShortMemoryCovariance g);
  int size() const { return params.size(); }
};

/// Impulse response of the fractional integration filter (1-L)^(-d),
/// computed by the stable recurrence g[0]=1, g[t]=g[t-1]*(t-1+d)/t.
Eigen::VectorXd lm_filter_coefficients(double d, int length);

/// Scale-free constant of the coarse-scale wavelet covariance approximation:
/// 2 cos(pi(dm-dn)/2) * (1-2^(dm+dn-1))/(1-dm-dn) * (2pi)^(-dm-dn),
/// with the removable singularity at dm+dn=1 evaluated by its limit ln 2.
double band_constant(double dm, double dn);

/// Attenuation of nonfractal connectivity in the coarse-scale wavelet
/// correlation: band_constant(dm,dn)/sqrt(band_constant(dm,dm)*band_constant(dn,dn)).
/// Equals 1 when dm = dn, strictly below 1 otherwise.
double attenuation_ratio(double dm, double dn);

/// Cross-spectral density gamma_{m,n} (1-e^{if})^{-dm} (1-e^{-if})^{-dn}.
std::complex<double> theoretical_cross_sdf(const FinSpec& spec, int m, int n, double f);

/// Coarse-scale approximation gamma_{m,n} * band_constant * 2^{j(dm+dn)}.
double asymptotic_wavelet_covariance(const FinSpec& spec, int m, int n, int j);

/// Independent oracle: adaptive quadrature of the cross-spectral density over
/// the ideal octave band +-[2pi/2^{j+1}, 2pi/2^j], normalized so white noise
/// with unit variance yields 1 at every scale.
double numerical_wavelet_covariance(const FinSpec& spec, int m, int n, int j);

struct TheoreticalConnectivity {
  Eigen::MatrixXd nonfractal;  // D
  Eigen::MatrixXd fractal;     // rho_infinity
};

/// D_{m,n} = gamma_{m,n}/sqrt(gamma_{m,m} gamma_{n,n});
/// rho_inf_{m,n} = D_{m,n} * attenuation_ratio(dm, dn).
TheoreticalConnectivity theoretical_connectivity(const FinSpec& spec);

/// Attenuation ratio sampled on a square grid of memory parameters;
/// cell (i, k) holds attenuation_ratio(d[i], d[k]).
Eigen::MatrixXd attenuation_grid(const Eigen::VectorXd& d_values);

}  // namespace fracconn::longmem

#endif  // FRACCONN_LONGMEM_HPP
