#include "fracconn/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracconn/errors.hpp"

namespace fracconn::estimators {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSearchBox = 0.499;

void check_decomps(const std::vector<wavelet::WaveletDecomposition>& decomps,
                   int min_levels = 4) {
  if (decomps.empty()) throw invalid_input("no decompositions supplied");
  for (const auto& d : decomps) {
    if (!d.compatible_with(decomps.front())) {
      throw invalid_input("decompositions differ in length, depth, or filter");
    }
  }
  if (decomps.front().levels < min_levels) {
    throw invalid_input("need at least " + std::to_string(min_levels) +
                        " decomposition levels");
  }
}

double clamp_to_search_box(double d) { return std::clamp(d, -kSearchBox, kSearchBox); }

/// (1 - 2^(s-1)) / (1 - s) with the ln 2 limit at s = 1.
double scale_sum_fraction(double s) {
  const double u = s - 1.0;
  if (std::abs(u) < 1e-6) {
    return std::numbers::ln2 * (1.0 + u * std::numbers::ln2 / 2.0);
  }
  return std::expm1(u * std::numbers::ln2) / u;
}

struct PairConstant {
  double cosine;
  double fraction;   // B_{m,n}
  double two_pi_pow; // (2 pi)^(dm+dn)
};

PairConstant pair_constant(double dm, double dn) {
  PairConstant c;
  c.cosine = std::cos(kPi * (dm - dn) / 2.0);
  if (std::abs(c.cosine) < 1e-6) {
    throw numerical_error("memory parameter difference too close to 1; "
                          "covariance inversion ill-conditioned");
  }
  c.fraction = scale_sum_fraction(dm + dn);
  c.two_pi_pow = std::pow(2.0 * kPi, dm + dn);
  return c;
}

}  // namespace

MemoryMethod memory_method_from_name(const std::string& name) {
  if (name == "lms" || name == "LMS") return MemoryMethod::Lms;
  if (name == "ml" || name == "ML") return MemoryMethod::Ml;
  throw invalid_input("unknown memory estimator '" + name + "' (expected lms or ml)");
}

GammaMethod gamma_method_from_name(const std::string& name) {
  if (name == "lin" || name == "LIN") return GammaMethod::Lin;
  if (name == "cov" || name == "COV") return GammaMethod::Cov;
  if (name == "sdf" || name == "SDF") return GammaMethod::Sdf;
  throw invalid_input("unknown covariance estimator '" + name +
                      "' (expected lin, cov, or sdf)");
}

std::string memory_method_name(MemoryMethod m) {
  return m == MemoryMethod::Lms ? "LMS" : "ML";
}

std::string gamma_method_name(GammaMethod g) {
  switch (g) {
    case GammaMethod::Lin: return "LIN";
    case GammaMethod::Cov: return "COV";
    case GammaMethod::Sdf: return "SDF";
  }
  return "?";
}

MemoryEstimate estimate_memory_lms(
    const std::vector<wavelet::WaveletDecomposition>& decomps) {
  check_decomps(decomps);
  const int q = static_cast<int>(decomps.size());
  const int levels = decomps.front().levels;
  Eigen::MatrixXd nu(q, levels);
  for (int m = 0; m < q; ++m) {
    for (int j = 1; j <= levels; ++j) {
      nu(m, j - 1) = wavelet::wavelet_variance(decomps[static_cast<size_t>(m)], j);
    }
  }
  return estimate_memory_lms_from_variances(nu);
}

MemoryEstimate estimate_memory_lms_from_variances(const Eigen::MatrixXd& nu) {
  const int q = static_cast<int>(nu.rows());
  const int levels = static_cast<int>(nu.cols());
  if (q < 1) throw invalid_input("need at least one series");
  if (levels < 4) {
    throw insufficient_data("need at least 4 scales, got " + std::to_string(levels));
  }

  // log2 wavelet variance per series and scale; NaN marks unusable scales.
  // Each series is normalized by its largest variance first: the constant
  // shift cancels in the slope but makes d_hat invariant under rescaling of
  // the input, exactly so for power-of-two factors.
  Eigen::MatrixXd log_var(q, levels);
  for (int m = 0; m < q; ++m) {
    double top = 0.0;
    for (int j = 1; j <= levels; ++j) top = std::max(top, nu(m, j - 1));
    for (int j = 1; j <= levels; ++j) {
      const double v = top > 0.0 ? nu(m, j - 1) / top : nu(m, j - 1);
      log_var(m, j - 1) = v > 0.0 ? std::log2(v) : std::numeric_limits<double>::quiet_NaN();
    }
  }

  constexpr int kMinWidth = 3;
  double best_sigma = std::numeric_limits<double>::infinity();
  int best_lo = 0, best_hi = 0;
  Eigen::VectorXd best_d;
  bool found = false;

  for (int lo = 1; lo + kMinWidth - 1 <= levels; ++lo) {
    for (int hi = lo + kMinWidth - 1; hi <= levels; ++hi) {
      const int width = hi - lo + 1;
      bool usable = true;
      for (int m = 0; m < q && usable; ++m) {
        for (int j = lo; j <= hi; ++j) {
          if (std::isnan(log_var(m, j - 1))) {
            usable = false;
            break;
          }
        }
      }
      if (!usable) continue;

      // Per-series least squares of log2 variance on scale index.
      const double mean_j = (lo + hi) / 2.0;
      double sxx = 0.0;
      for (int j = lo; j <= hi; ++j) sxx += (j - mean_j) * (j - mean_j);
      Eigen::VectorXd d_hat(q);
      double sum_resid = 0.0;
      for (int m = 0; m < q; ++m) {
        double mean_y = 0.0;
        for (int j = lo; j <= hi; ++j) mean_y += log_var(m, j - 1);
        mean_y /= width;
        double sxy = 0.0;
        for (int j = lo; j <= hi; ++j) sxy += (j - mean_j) * (log_var(m, j - 1) - mean_y);
        const double slope = sxy / sxx;
        const double intercept = mean_y - slope * mean_j;
        d_hat[m] = slope / 2.0;
        for (int j = lo; j <= hi; ++j) {
          const double r = log_var(m, j - 1) - slope * j - intercept;
          sum_resid += r * r;
        }
      }
      // Pooled residual variance per degree of freedom; without the dof
      // normalization the search always overfits the narrowest intervals.
      const double sigma = sum_resid / (q * (width - 2));
      const bool better =
          !found || sigma < best_sigma ||
          (sigma == best_sigma &&
           (width > best_hi - best_lo + 1 ||
            (width == best_hi - best_lo + 1 && lo < best_lo)));
      if (better) {
        found = true;
        best_sigma = sigma;
        best_lo = lo;
        best_hi = hi;
        best_d = d_hat;
      }
    }
  }

  if (!found) {
    throw estimation_failure(
        "no scale interval with positive wavelet variance for all series");
  }

  MemoryEstimate est;
  est.d_hat = best_d;
  est.method = MemoryMethod::Lms;
  est.j_low = best_lo;
  est.j_high = best_hi;
  est.fit_diagnostic = best_sigma;
  for (int m = 0; m < q; ++m) {
    if (std::abs(best_d[m]) >= 0.5) est.out_of_range_series.push_back(m);
  }
  return est;
}

MemoryEstimate estimate_memory_ml(const wavelet::WaveletDecomposition& decomp) {
  if (decomp.levels < 4) throw invalid_input("need at least 4 decomposition levels");
  const int levels = decomp.levels;
  const int n = decomp.length;

  std::vector<double> energy(static_cast<size_t>(levels));
  std::vector<double> count(static_cast<size_t>(levels));
  double total_energy = 0.0;
  for (int j = 1; j <= levels; ++j) {
    const Eigen::VectorXd& w = decomp.detail(j);
    energy[static_cast<size_t>(j - 1)] = w.squaredNorm();
    count[static_cast<size_t>(j - 1)] = static_cast<double>(w.size());
    total_energy += energy[static_cast<size_t>(j - 1)];
  }
  if (total_energy <= 0.0) {
    throw estimation_failure("all wavelet coefficients are zero");
  }
  // Normalize out the overall level: the likelihood optimum in d is unchanged
  // and d_hat becomes invariant under rescaling of the input, exactly so for
  // power-of-two factors.
  for (double& e : energy) e /= total_energy;

  // Reduced log likelihood with the unit-variance band model
  // Lambda(j; d) = band_constant(d, d) * 2^{2dj}; the scaling band is
  // dropped (its band average diverges for d > 0).
  auto objective = [&](double d) {
    double gamma_hat = 0.0;
    double log_det = 0.0;
    for (int j = 1; j <= levels; ++j) {
      const double log_lambda =
          std::log(longmem::band_constant(d, d)) + 2.0 * d * j * std::numbers::ln2;
      gamma_hat += energy[static_cast<size_t>(j - 1)] * std::exp(-log_lambda);
      log_det += count[static_cast<size_t>(j - 1)] * log_lambda;
    }
    gamma_hat /= n;
    return n * std::log(gamma_hat) + log_det;
  };

  // Golden-section search on [-0.499, 0.499].
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -kSearchBox, b = kSearchBox;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (b - a > 1e-6) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = objective(x2);
    }
  }
  const double d_opt = (a + b) / 2.0;

  MemoryEstimate est;
  est.d_hat = Eigen::VectorXd::Constant(1, d_opt);
  est.method = MemoryMethod::Ml;
  est.j_low = 1;
  est.j_high = levels;
  est.fit_diagnostic = objective(d_opt);
  return est;
}

MemoryEstimate estimate_memory_ml(
    const std::vector<wavelet::WaveletDecomposition>& decomps) {
  check_decomps(decomps);
  MemoryEstimate est;
  est.method = MemoryMethod::Ml;
  est.j_low = 1;
  est.j_high = decomps.front().levels;
  est.d_hat.resize(static_cast<Eigen::Index>(decomps.size()));
  est.fit_diagnostic = 0.0;
  for (size_t m = 0; m < decomps.size(); ++m) {
    const MemoryEstimate one = estimate_memory_ml(decomps[m]);
    est.d_hat[static_cast<Eigen::Index>(m)] = one.d_hat[0];
    est.fit_diagnostic += one.fit_diagnostic;
  }
  return est;
}

MemoryEstimate estimate_memory(const std::vector<wavelet::WaveletDecomposition>& decomps,
                               MemoryMethod method) {
  return method == MemoryMethod::Lms ? estimate_memory_lms(decomps)
                                     : estimate_memory_ml(decomps);
}

Eigen::MatrixXd estimate_gamma_sdf(
    const std::vector<wavelet::WaveletDecomposition>& decomps,
    const Eigen::VectorXd& d_hat) {
  check_decomps(decomps);
  const int q = static_cast<int>(decomps.size());
  if (d_hat.size() != q) throw invalid_input("d_hat length must match series count");
  const int levels = decomps.front().levels;
  const int n = decomps.front().length;

  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(q, q);
  for (int m = 0; m < q; ++m) {
    for (int k = m; k < q; ++k) {
      const double dm = clamp_to_search_box(d_hat[m]);
      const double dk = clamp_to_search_box(d_hat[k]);
      const double log_beta = std::log(longmem::band_constant(dm, dk));
      double acc = 0.0;
      for (int j = 1; j <= levels; ++j) {
        const double cross =
            decomps[static_cast<size_t>(m)].detail(j).dot(
                decomps[static_cast<size_t>(k)].detail(j));
        const double log_lambda = log_beta + (dm + dk) * j * std::numbers::ln2;
        if (!std::isfinite(log_lambda) || std::abs(log_lambda) > 600.0) {
          throw numerical_error("band model out of representable range at scale " +
                                std::to_string(j));
        }
        acc += cross * std::exp(-log_lambda);
      }
      gamma(m, k) = gamma(k, m) = acc / n;
    }
  }
  return gamma;
}

Eigen::MatrixXd estimate_gamma_cov(
    const std::vector<wavelet::WaveletDecomposition>& decomps,
    const Eigen::VectorXd& d_hat) {
  check_decomps(decomps);
  const int q = static_cast<int>(decomps.size());
  if (d_hat.size() != q) throw invalid_input("d_hat length must match series count");
  const int levels = decomps.front().levels;

  Eigen::MatrixXd gamma(q, q);
  for (int m = 0; m < q; ++m) {
    for (int k = m; k < q; ++k) {
      const double dm = clamp_to_search_box(d_hat[m]);
      const double dk = clamp_to_search_box(d_hat[k]);
      // Covariance via the wavelet scale sum, scaling band dropped.
      double sigma2 = 0.0;
      for (int j = 1; j <= levels; ++j) {
        sigma2 += wavelet::wavelet_covariance(decomps[static_cast<size_t>(m)],
                                              decomps[static_cast<size_t>(k)], j,
                                              /*exclude_boundary=*/false) /
                  std::pow(2.0, j);
      }
      const PairConstant c = pair_constant(dm, dk);
      double scale_sum = 0.0;
      for (int j = 1; j <= levels; ++j) scale_sum += std::pow(2.0, (dm + dk - 1.0) * j);
      gamma(m, k) = gamma(k, m) =
          sigma2 * c.two_pi_pow / (2.0 * c.cosine * c.fraction * scale_sum);
    }
  }
  return gamma;
}

Eigen::MatrixXd estimate_gamma_lin(
    const std::vector<wavelet::WaveletDecomposition>& decomps,
    const Eigen::VectorXd& d_hat) {
  check_decomps(decomps);
  const int q = static_cast<int>(decomps.size());
  if (d_hat.size() != q) throw invalid_input("d_hat length must match series count");
  const int levels = decomps.front().levels;

  Eigen::MatrixXd gamma(q, q);
  for (int m = 0; m < q; ++m) {
    for (int k = m; k < q; ++k) {
      Eigen::VectorXd nu(levels);
      for (int j = 1; j <= levels; ++j) {
        nu[j - 1] = wavelet::wavelet_covariance(decomps[static_cast<size_t>(m)],
                                                decomps[static_cast<size_t>(k)], j);
      }
      gamma(m, k) = gamma(k, m) =
          invert_scale_law(nu, clamp_to_search_box(d_hat[m]),
                           clamp_to_search_box(d_hat[k]));
    }
  }
  return gamma;
}

double invert_scale_law(const Eigen::VectorXd& nu, double dm, double dn) {
  const int levels = static_cast<int>(nu.size());
  if (levels < 1) throw invalid_input("need at least one scale");
  // Rescaled per-scale covariances are flat in j when the coarse-scale law
  // holds; invert their log-mean level, weighting each scale by its share of
  // coefficients (2^-j) so the noisy coarse scales cannot dominate. Sign is
  // carried separately because the cross covariance may be negative.
  double mean_s = 0.0;
  double mean_log = 0.0;
  double weight_sum = 0.0;
  for (int j = 1; j <= levels; ++j) {
    const double w = std::pow(2.0, -j);
    const double s = nu[j - 1] * std::pow(2.0, -(dm + dn) * j);
    mean_s += w * s;
    if (std::abs(s) > 1e-12) {
      mean_log += w * std::log2(std::abs(s));
      weight_sum += w;
    }
  }
  if (weight_sum == 0.0 || mean_s == 0.0) {
    // Flagged entry: no scale carried usable signal for this pair.
    return std::numeric_limits<double>::quiet_NaN();
  }
  mean_log /= weight_sum;
  const double sign = mean_s > 0.0 ? 1.0 : -1.0;
  const PairConstant c = pair_constant(dm, dn);
  return sign * std::pow(2.0, mean_log - 1.0) * c.two_pi_pow / (c.fraction * c.cosine);
}

Eigen::MatrixXd estimate_gamma(const std::vector<wavelet::WaveletDecomposition>& decomps,
                               const Eigen::VectorXd& d_hat, GammaMethod method) {
  switch (method) {
    case GammaMethod::Lin: return estimate_gamma_lin(decomps, d_hat);
    case GammaMethod::Cov: return estimate_gamma_cov(decomps, d_hat);
    case GammaMethod::Sdf: return estimate_gamma_sdf(decomps, d_hat);
  }
  throw invalid_input("invalid covariance method");
}

ConnectivityPair connectivity(const Eigen::MatrixXd& gamma_hat,
                              const Eigen::VectorXd& d_hat) {
  const int q = static_cast<int>(gamma_hat.rows());
  if (gamma_hat.cols() != q || d_hat.size() != q) {
    throw invalid_input("gamma estimate and d_hat dimensions disagree");
  }
  for (int m = 0; m < q; ++m) {
    if (!(gamma_hat(m, m) > 0.0)) {
      throw degenerate_input("non-positive estimated variance for series " +
                             std::to_string(m));
    }
  }
  ConnectivityPair out;
  out.nonfractal = Eigen::MatrixXd::Identity(q, q);
  out.fractal = Eigen::MatrixXd::Identity(q, q);
  for (int m = 0; m < q; ++m) {
    for (int k = m + 1; k < q; ++k) {
      double d = gamma_hat(m, k) / std::sqrt(gamma_hat(m, m) * gamma_hat(k, k));
      if (std::isfinite(d)) d = std::clamp(d, -1.0, 1.0);
      const double ups = longmem::attenuation_ratio(clamp_to_search_box(d_hat[m]),
                                                    clamp_to_search_box(d_hat[k]));
      out.nonfractal(m, k) = out.nonfractal(k, m) = d;
      out.fractal(m, k) = out.fractal(k, m) = d * ups;
    }
  }
  return out;
}

Eigen::MatrixXd pearson_correlation(const Eigen::MatrixXd& series) {
  const int q = static_cast<int>(series.rows());
  const int n = static_cast<int>(series.cols());
  if (n < 2) throw invalid_input("need at least two samples per series");
  Eigen::MatrixXd centered = series.colwise() - series.rowwise().mean();
  Eigen::VectorXd sd(q);
  for (int m = 0; m < q; ++m) {
    sd[m] = centered.row(m).norm();
    if (!(sd[m] > 0.0)) {
      throw degenerate_input("series " + std::to_string(m) + " has zero variance");
    }
  }
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(q, q);
  for (int m = 0; m < q; ++m) {
    for (int k = m + 1; k < q; ++k) {
      const double r =
          std::clamp(centered.row(m).dot(centered.row(k)) / (sd[m] * sd[k]), -1.0, 1.0);
      corr(m, k) = corr(k, m) = r;
    }
  }
  return corr;
}

ConnectivityResult estimate_connectivity(const Eigen::MatrixXd& series,
                                         const PipelineOptions& options) {
  const int q = static_cast<int>(series.rows());
  const int n = static_cast<int>(series.cols());
  if (q < 2) throw invalid_input("need at least two series");
  const wavelet::WaveletFilter filter = wavelet::WaveletFilter::by_name(options.filter);
  const int levels = options.levels > 0 ? options.levels : wavelet::default_levels(n);

  std::vector<wavelet::WaveletDecomposition> decomps;
  decomps.reserve(static_cast<size_t>(q));
  for (int m = 0; m < q; ++m) {
    decomps.push_back(wavelet::dwt(series.row(m).transpose(), filter, levels));
  }

  const MemoryEstimate mem = estimate_memory(decomps, options.memory_method);
  const Eigen::MatrixXd gamma = estimate_gamma(decomps, mem.d_hat, options.gamma_method);
  const ConnectivityPair conn = connectivity(gamma, mem.d_hat);

  ConnectivityResult result;
  result.pearson = pearson_correlation(series);
  result.d_hat = mem.d_hat;
  result.gamma_hat = gamma;
  result.nonfractal = conn.nonfractal;
  result.fractal = conn.fractal;
  result.memory_method = options.memory_method;
  result.gamma_method = options.gamma_method;
  result.j_low = mem.j_low;
  result.j_high = mem.j_high;
  return result;
}

}  // namespace fracconn::estimators
