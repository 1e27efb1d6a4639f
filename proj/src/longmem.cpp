#include "fracconn/longmem.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "fracconn/errors.hpp"

namespace fracconn::longmem {

namespace {

constexpr double kPi = std::numbers::pi;

void check_memory_range(double d) {
  if (!(std::abs(d) < 0.5)) {
    throw out_of_range_error("memory parameter " + std::to_string(d) +
                             " outside stationary range (-0.5, 0.5)");
  }
}

void check_pair_domain(double dm, double dn) {
  check_memory_range(dm);
  check_memory_range(dn);
  if (!(dm + dn < 1.0)) {
    throw out_of_range_error("memory parameter sum must be below 1");
  }
}

}  // namespace

MemoryParams::MemoryParams(Eigen::VectorXd d) : d_(std::move(d)) {
  if (d_.size() == 0) throw invalid_input("memory parameter vector is empty");
  for (int k = 0; k < d_.size(); ++k) check_memory_range(d_[k]);
}

ShortMemoryCovariance::ShortMemoryCovariance(Eigen::MatrixXd gamma)
    : gamma_(std::move(gamma)) {
  const int q = static_cast<int>(gamma_.rows());
  if (q == 0 || gamma_.cols() != q) {
    throw invalid_input("short-memory covariance must be square and non-empty");
  }
  if (!gamma_.allFinite()) throw invalid_input("covariance contains non-finite values");
  if ((gamma_ - gamma_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw invalid_input("covariance must be symmetric within 1e-12");
  }
  for (int k = 0; k < q; ++k) {
    if (!(gamma_(k, k) > 0.0)) {
      throw degenerate_input("covariance diagonal must be strictly positive (series " +
                             std::to_string(k) + ")");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) {
    throw invalid_input("covariance is not positive semidefinite");
  }
}

FinSpec::FinSpec(MemoryParams p, ShortMemoryCovariance g)
    : params(std::move(p)), gamma(std::move(g)) {
  if (params.size() != gamma.size()) {
    throw invalid_input("memory parameter and covariance dimensions disagree");
  }
}

Eigen::VectorXd lm_filter_coefficients(double d, int length) {
  check_memory_range(d);
  if (length < 1) throw invalid_input("filter length must be >= 1");
  Eigen::VectorXd g(length);
  g[0] = 1.0;
  for (int t = 1; t < length; ++t) {
    g[t] = g[t - 1] * (t - 1 + d) / t;
  }
  return g;
}

double band_constant(double dm, double dn) {
  check_pair_domain(dm, dn);
  const double s = dm + dn;
  const double u = s - 1.0;
  // (1 - 2^(s-1)) / (1 - s) = expm1(u ln2) / u, limit ln2 at u = 0.
  double frac;
  if (std::abs(u) < 1e-6) {
    const double l2 = std::numbers::ln2;
    frac = l2 * (1.0 + u * l2 / 2.0);
  } else {
    frac = std::expm1(u * std::numbers::ln2) / u;
  }
  return 2.0 * std::cos(kPi * (dm - dn) / 2.0) * frac * std::pow(2.0 * kPi, -s);
}

double attenuation_ratio(double dm, double dn) {
  if (dm == dn) {
    check_pair_domain(dm, dn);
    return 1.0;
  }
  return band_constant(dm, dn) /
         std::sqrt(band_constant(dm, dm) * band_constant(dn, dn));
}

std::complex<double> theoretical_cross_sdf(const FinSpec& spec, int m, int n, double f) {
  const double dm = spec.params[m];
  const double dn = spec.params[n];
  if (f == 0.0 && dm + dn > 0.0) {
    throw out_of_range_error("cross-spectral density has a pole at f = 0");
  }
  const std::complex<double> i(0.0, 1.0);
  // Principal branch of the complex logarithm for both fractional powers.
  const std::complex<double> a = std::pow(1.0 - std::exp(i * f), -dm);
  const std::complex<double> b = std::pow(1.0 - std::exp(-i * f), -dn);
  return spec.gamma(m, n) * a * b;
}

double asymptotic_wavelet_covariance(const FinSpec& spec, int m, int n, int j) {
  if (j < 1) throw invalid_input("scale index must be >= 1");
  const double dm = spec.params[m];
  const double dn = spec.params[n];
  return spec.gamma(m, n) * band_constant(dm, dn) * std::pow(2.0, j * (dm + dn));
}

double numerical_wavelet_covariance(const FinSpec& spec, int m, int n, int j) {
  if (j < 1) throw invalid_input("scale index must be >= 1");
  const double dm = spec.params[m];
  const double dn = spec.params[n];
  check_pair_domain(dm, dn);
  const double lo = 2.0 * kPi / std::pow(2.0, j + 1);
  const double hi = 2.0 * kPi / std::pow(2.0, j);
  // Re S(f) for f > 0; (1-e^{if})(1-e^{-if}) factors give
  // (2 sin(f/2))^{-dm-dn} * cos((f-pi)(dm-dn)/2).
  auto integrand = [&](double f) {
    return std::pow(2.0 * std::sin(f / 2.0), -(dm + dn)) *
           std::cos((f - kPi) * (dm - dn) / 2.0);
  };
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, lo, hi, 12, 1e-10, &err);
  if (!(std::isfinite(value)) || err > 1e-6 * std::max(1.0, std::abs(value))) {
    throw numerical_error("band quadrature did not converge at scale " +
                          std::to_string(j) + " (error estimate " +
                          std::to_string(err) + ")");
  }
  // Ideal band-pass gain 2^j over both half-bands, SDF normalized so that
  // the full-band integral of white noise equals its variance.
  return spec.gamma(m, n) * std::pow(2.0, j) / kPi * value;
}

TheoreticalConnectivity theoretical_connectivity(const FinSpec& spec) {
  const int q = spec.size();
  TheoreticalConnectivity out;
  out.nonfractal = Eigen::MatrixXd::Identity(q, q);
  out.fractal = Eigen::MatrixXd::Identity(q, q);
  for (int m = 0; m < q; ++m) {
    for (int n = m + 1; n < q; ++n) {
      const double d =
          spec.gamma(m, n) / std::sqrt(spec.gamma(m, m) * spec.gamma(n, n));
      const double rho = d * attenuation_ratio(spec.params[m], spec.params[n]);
      out.nonfractal(m, n) = out.nonfractal(n, m) = d;
      out.fractal(m, n) = out.fractal(n, m) = rho;
    }
  }
  return out;
}

Eigen::MatrixXd attenuation_grid(const Eigen::VectorXd& d_values) {
  const int n = static_cast<int>(d_values.size());
  Eigen::MatrixXd grid(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      grid(i, k) = attenuation_ratio(d_values[i], d_values[k]);
    }
  }
  return grid;
}

}  // namespace fracconn::longmem
