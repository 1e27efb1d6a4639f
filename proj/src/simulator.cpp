#include "fracconn/simulator.hpp"

#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fracconn/errors.hpp"

namespace fracconn::simulator {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Linear convolution of g and u, truncated to the length of u.
Eigen::VectorXd truncated_convolution(const Eigen::VectorXd& g,
                                      const Eigen::VectorXd& u) {
  const int m = static_cast<int>(u.size());
  int padded = 1;
  while (padded < 2 * m) padded *= 2;
  std::vector<std::complex<double>> gf, uf;
  std::vector<double> buf(static_cast<size_t>(padded), 0.0);
  Eigen::FFT<double> fft;
  std::copy(g.data(), g.data() + m, buf.begin());
  fft.fwd(gf, buf);
  std::fill(buf.begin(), buf.end(), 0.0);
  std::copy(u.data(), u.data() + m, buf.begin());
  fft.fwd(uf, buf);
  for (size_t i = 0; i < gf.size(); ++i) uf[i] *= gf[i];
  std::vector<double> conv;
  fft.inv(conv, uf);
  Eigen::VectorXd out(m);
  std::copy(conv.begin(), conv.begin() + m, out.data());
  return out;
}

}  // namespace

ShortMemoryCondition condition_from_label(const std::string& label) {
  if (label == "1A") return ShortMemoryCondition::C1A;
  if (label == "1B") return ShortMemoryCondition::C1B;
  if (label == "2A") return ShortMemoryCondition::C2A;
  if (label == "2B") return ShortMemoryCondition::C2B;
  throw invalid_input("unknown short-memory condition '" + label +
                      "' (expected 1A, 1B, 2A, or 2B)");
}

std::string condition_label(ShortMemoryCondition c) {
  switch (c) {
    case ShortMemoryCondition::C1A: return "1A";
    case ShortMemoryCondition::C1B: return "1B";
    case ShortMemoryCondition::C2A: return "2A";
    case ShortMemoryCondition::C2B: return "2B";
  }
  throw invalid_input("invalid condition enum value");
}

ArfimaSpec::ArfimaSpec(longmem::MemoryParams p, Eigen::VectorXd ar_coeffs,
                       Eigen::MatrixXd a, std::uint64_t s)
    : params(std::move(p)), ar(std::move(ar_coeffs)), mixing(std::move(a)), seed(s) {
  const int q = params.size();
  if (ar.size() != 0 && ar.size() != q) {
    throw invalid_input("AR coefficient vector must be empty or length q");
  }
  for (int k = 0; k < ar.size(); ++k) {
    if (!(std::abs(ar[k]) < 1.0)) {
      throw invalid_input("AR(1) coefficient for series " + std::to_string(k) +
                          " must satisfy |phi| < 1");
    }
  }
  if (mixing.rows() != q || mixing.cols() != q || !mixing.allFinite()) {
    throw invalid_input("mixing matrix must be a finite q x q matrix");
  }
  stream_ids.resize(static_cast<size_t>(q));
  std::iota(stream_ids.begin(), stream_ids.end(), 0);
}

Eigen::MatrixXd build_innovation_matrix(int q, double rho) {
  if (q < 3) throw invalid_input("innovation matrix pattern requires q >= 3");
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw invalid_input("target correlation must lie in [0, 1)");
  }
  const double b = rho * (q - 2) - (q - 3);
  double a;
  if (std::abs(b) < 1e-12) {
    a = rho / 2.0;  // the quadratic degenerates to 2a = rho
  } else {
    const double disc = 1.0 - b * rho;
    if (disc < 0.0) {
      throw invalid_input("correlation " + std::to_string(rho) +
                          " unreachable for q = " + std::to_string(q) +
                          " (negative discriminant); require rho (q-2) - (q-3) <= 1/rho");
    }
    a = (1.0 - std::sqrt(disc)) / b;  // smaller-magnitude root
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(q, q);
  for (int r = 1; r < q; ++r) {
    for (int c = 1; c < q; ++c) {
      if (r != c) m(r, c) = a;
    }
  }
  return m;
}

ConditionFragment short_memory_condition(ShortMemoryCondition condition, int q,
                                         double rho) {
  if (q < 2) throw invalid_input("need at least two series");
  ConditionFragment frag;
  const bool correlated = condition == ShortMemoryCondition::C2A ||
                          condition == ShortMemoryCondition::C2B;
  const bool autocorrelated = condition == ShortMemoryCondition::C1B ||
                              condition == ShortMemoryCondition::C2B;
  frag.mixing = correlated ? build_innovation_matrix(q, rho)
                           : Eigen::MatrixXd::Identity(q, q);
  if (autocorrelated) {
    frag.ar = Eigen::VectorXd::Constant(q, 0.9);
  }
  return frag;
}

longmem::ShortMemoryCovariance analytic_short_memory_covariance(
    const Eigen::MatrixXd& mixing, const Eigen::VectorXd& ar) {
  const int q = static_cast<int>(mixing.rows());
  Eigen::MatrixXd gamma = mixing * mixing.transpose();
  if (ar.size() != 0) {
    if (ar.size() != q) throw invalid_input("AR vector length must match dimension");
    for (int m = 0; m < q; ++m) {
      for (int n = 0; n < q; ++n) {
        gamma(m, n) /= 1.0 - ar[m] * ar[n];
      }
    }
  }
  return longmem::ShortMemoryCovariance(gamma);
}

SimulationOutput simulate_arfima(const ArfimaSpec& spec, int n, int burnin,
                                 bool keep_short_memory) {
  if (!is_power_of_two(n)) {
    throw invalid_input("series length must be a power of two (got " +
                        std::to_string(n) + ")");
  }
  if (burnin < 0) throw invalid_input("burn-in must be non-negative");
  const int q = spec.size();
  const int total = n + burnin;

  // One generator per innovation stream; draws are time-major within a stream.
  Eigen::MatrixXd eps(q, total);
  for (int k = 0; k < q; ++k) {
    std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(
        static_cast<std::uint64_t>(spec.stream_ids[static_cast<size_t>(k)]) + 1)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < total; ++t) eps(k, t) = gauss(rng);
  }

  // Mix in ascending stream order so the accumulation order follows the
  // streams, not the storage order: permuting the spec then permutes the
  // output bit-for-bit.
  std::vector<int> order(static_cast<size_t>(q));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return spec.stream_ids[static_cast<size_t>(a)] <
           spec.stream_ids[static_cast<size_t>(b)];
  });
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(q, total);
  for (int m = 0; m < q; ++m) {
    for (int idx = 0; idx < q; ++idx) {
      const int c = order[static_cast<size_t>(idx)];
      const double w = spec.mixing(m, c);
      if (w != 0.0) u.row(m) += w * eps.row(c);
    }
  }
  if (spec.ar.size() != 0) {
    for (int k = 0; k < q; ++k) {
      const double phi = spec.ar[k];
      for (int t = 1; t < total; ++t) u(k, t) += phi * u(k, t - 1);
    }
  }

  SimulationOutput out{
      .series = Eigen::MatrixXd(q, n),
      .truth = longmem::FinSpec(spec.params,
                                analytic_short_memory_covariance(spec.mixing, spec.ar)),
      .nonfractal_truth = Eigen::MatrixXd(),
      .short_memory = std::nullopt,
      .burnin = burnin,
      .filter_length = total,
      .seed = spec.seed,
  };

  for (int k = 0; k < q; ++k) {
    Eigen::VectorXd uk = u.row(k).transpose();
    if (spec.params[k] == 0.0) {
      out.series.row(k) = uk.tail(n).transpose();  // fractional filter is the identity
    } else {
      const Eigen::VectorXd g = longmem::lm_filter_coefficients(spec.params[k], total);
      out.series.row(k) = truncated_convolution(g, uk).tail(n).transpose();
    }
  }

  const Eigen::MatrixXd& gamma = out.truth.gamma.matrix();
  Eigen::VectorXd scale = gamma.diagonal().cwiseSqrt().cwiseInverse();
  out.nonfractal_truth = scale.asDiagonal() * gamma * scale.asDiagonal();

  if (keep_short_memory) out.short_memory = u.rightCols(n);
  return out;
}

}  // namespace fracconn::simulator
