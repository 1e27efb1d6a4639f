#include "fracconn/wavelet.hpp"

#include <algorithm>
#include <cmath>

#include "fracconn/errors.hpp"

namespace fracconn::wavelet {

namespace {

std::vector<double> mirror(const std::vector<double>& g) {
  const int L = static_cast<int>(g.size());
  std::vector<double> h(L);
  for (int l = 0; l < L; ++l) {
    h[l] = ((l % 2) == 0 ? 1.0 : -1.0) * g[L - 1 - l];
  }
  return h;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

WaveletFilter WaveletFilter::haar() {
  const double s = 1.0 / std::sqrt(2.0);
  WaveletFilter f;
  f.name = "haar";
  f.g = {s, s};
  f.h = mirror(f.g);
  return f;
}

WaveletFilter WaveletFilter::la8() {
  // Daubechies least-asymmetric scaling filter, width 8 (Percival & Walden).
  WaveletFilter f;
  f.name = "la8";
  f.g = {-0.0757657147893407, -0.0296355276459541, 0.4976186676324578,
         0.8037387518052163,  0.2978577956055422,  -0.0992195435769354,
         -0.0126039672622612, 0.0322231006040713};
  f.h = mirror(f.g);
  return f;
}

WaveletFilter WaveletFilter::by_name(const std::string& name) {
  if (name == "haar") return haar();
  if (name == "la8") return la8();
  throw invalid_input("unknown wavelet filter '" + name + "' (available: haar, la8)");
}

void WaveletFilter::validate() const {
  const int L = width();
  if (L < 2 || L % 2 != 0 || static_cast<int>(h.size()) != L) {
    throw invalid_input("wavelet filter must have even width and matching g/h sizes");
  }
  double sum_g = 0.0, sum_h = 0.0, energy_g = 0.0, energy_h = 0.0;
  for (int l = 0; l < L; ++l) {
    sum_g += g[l];
    sum_h += h[l];
    energy_g += g[l] * g[l];
    energy_h += h[l] * h[l];
  }
  const double tol = 1e-12;
  if (std::abs(sum_g - std::sqrt(2.0)) > tol) {
    throw invalid_input("low-pass filter must sum to sqrt(2)");
  }
  if (std::abs(sum_h) > tol) {
    throw invalid_input("high-pass filter must sum to 0");
  }
  if (std::abs(energy_g - 1.0) > tol || std::abs(energy_h - 1.0) > tol) {
    throw invalid_input("filter coefficients must have unit energy");
  }
  for (int l = 0; l < L; ++l) {
    const double expect = ((l % 2) == 0 ? 1.0 : -1.0) * g[L - 1 - l];
    if (std::abs(h[l] - expect) > tol) {
      throw invalid_input("h is not the quadrature mirror of g");
    }
  }
}

const Eigen::VectorXd& WaveletDecomposition::detail(int j) const {
  if (j < 1 || j > levels) {
    throw invalid_input("scale index " + std::to_string(j) + " outside [1, " +
                        std::to_string(levels) + "]");
  }
  return details[static_cast<size_t>(j - 1)];
}

int WaveletDecomposition::boundary_count(int j) const {
  if (j < 1 || j > levels) {
    throw invalid_input("scale index " + std::to_string(j) + " outside [1, " +
                        std::to_string(levels) + "]");
  }
  return boundary[static_cast<size_t>(j - 1)];
}

int default_levels(int n) {
  int j = 0;
  while ((1 << (j + 1)) <= n) ++j;  // j = floor(log2 n)
  return std::max(1, j - 3);
}

WaveletDecomposition dwt(const Eigen::VectorXd& series, const WaveletFilter& filter,
                         int levels) {
  const int n = static_cast<int>(series.size());
  const int L = filter.width();
  if (levels < 1) throw invalid_input("decomposition depth must be >= 1");
  if (n < 2 || n % (1 << levels) != 0) {
    throw invalid_input("series length " + std::to_string(n) +
                        " must be divisible by 2^levels = " +
                        std::to_string(1 << levels));
  }
  if (!series.allFinite()) throw invalid_input("series contains non-finite values");

  WaveletDecomposition out;
  out.levels = levels;
  out.length = n;
  out.filter_name = filter.name;
  out.details.reserve(static_cast<size_t>(levels));
  out.boundary.reserve(static_cast<size_t>(levels));

  Eigen::VectorXd approx = series;
  for (int j = 1; j <= levels; ++j) {
    const int half = static_cast<int>(approx.size()) / 2;
    if (half < 1) throw invalid_input("decomposition depth exhausts the series");
    Eigen::VectorXd w(half), v(half);
    const int len = static_cast<int>(approx.size());
    for (int t = 0; t < half; ++t) {
      double sw = 0.0, sv = 0.0;
      for (int l = 0; l < L; ++l) {
        const double x = approx[(2 * t + l) % len];
        sw += filter.h[static_cast<size_t>(l)] * x;
        sv += filter.g[static_cast<size_t>(l)] * x;
      }
      w[t] = sw;
      v[t] = sv;
    }
    // Coefficients whose equivalent filter wraps around the end of the
    // series; count follows Percival & Walden's L'_j formula.
    const double frac = 1.0 - std::pow(2.0, -j);
    const int b = std::min(half, static_cast<int>(std::ceil((L - 2) * frac)));
    out.details.push_back(std::move(w));
    out.boundary.push_back(b);
    approx = std::move(v);
  }
  out.smooth = std::move(approx);
  return out;
}

Eigen::VectorXd idwt(const WaveletDecomposition& decomp, const WaveletFilter& filter) {
  if (filter.name != decomp.filter_name) {
    throw invalid_input("filter '" + filter.name + "' does not match decomposition ('" +
                        decomp.filter_name + "')");
  }
  const int L = filter.width();
  Eigen::VectorXd approx = decomp.smooth;
  for (int j = decomp.levels; j >= 1; --j) {
    const Eigen::VectorXd& w = decomp.detail(j);
    const int half = static_cast<int>(w.size());
    const int len = 2 * half;
    Eigen::VectorXd up = Eigen::VectorXd::Zero(len);
    for (int t = 0; t < half; ++t) {
      for (int l = 0; l < L; ++l) {
        up[(2 * t + l) % len] += filter.g[static_cast<size_t>(l)] * approx[t] +
                                 filter.h[static_cast<size_t>(l)] * w[t];
      }
    }
    approx = std::move(up);
  }
  return approx;
}

double wavelet_covariance(const WaveletDecomposition& a, const WaveletDecomposition& b,
                          int j, bool exclude_boundary) {
  if (!a.compatible_with(b)) {
    throw invalid_input("decompositions differ in length, depth, or filter");
  }
  const Eigen::VectorXd& wa = a.detail(j);
  const Eigen::VectorXd& wb = b.detail(j);
  const int n = static_cast<int>(wa.size());
  const int skip = exclude_boundary ? a.boundary_count(j) : 0;
  const int usable = n - skip;
  if (usable <= 0) {
    throw insufficient_data("no coefficients left at scale " + std::to_string(j) +
                            " after boundary exclusion");
  }
  return wa.head(usable).dot(wb.head(usable)) / usable;
}

double wavelet_variance(const WaveletDecomposition& a, int j, bool exclude_boundary) {
  return wavelet_covariance(a, a, j, exclude_boundary);
}

double wavelet_correlation(const WaveletDecomposition& a, const WaveletDecomposition& b,
                           int j, bool exclude_boundary) {
  const double va = wavelet_variance(a, j, exclude_boundary);
  const double vb = wavelet_variance(b, j, exclude_boundary);
  if (va <= 0.0 || vb <= 0.0) {
    throw degenerate_input("zero wavelet variance at scale " + std::to_string(j));
  }
  const double rho = wavelet_covariance(a, b, j, exclude_boundary) / std::sqrt(va * vb);
  return std::clamp(rho, -1.0, 1.0);
}

}  // namespace fracconn::wavelet
