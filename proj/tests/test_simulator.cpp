#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "fracconn/errors.hpp"
#include "fracconn/simulator.hpp"

using namespace fracconn;
using simulator::ArfimaSpec;
using simulator::ShortMemoryCondition;

namespace {

Eigen::MatrixXd correlation_of(const Eigen::MatrixXd& cov) {
  Eigen::VectorXd s = cov.diagonal().cwiseSqrt().cwiseInverse();
  return s.asDiagonal() * cov * s.asDiagonal();
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd centered = x.colwise() - x.rowwise().mean();
  return centered * centered.transpose() / static_cast<double>(x.cols());
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("innovation matrix: zero target gives the identity") {
    CHECK(simulator::build_innovation_matrix(4, 0.0)
              .isApprox(Eigen::MatrixXd::Identity(4, 4)));
  }

  TEST_CASE("innovation matrix hits the target correlation") {
    for (auto [q, rho] : std::vector<std::pair<int, double>>{
             {4, 0.3}, {8, 0.8}, {3, 0.5}, {16, 0.2}, {6, 2.0 / 3.0}}) {
      const Eigen::MatrixXd a = simulator::build_innovation_matrix(q, rho);
      const Eigen::MatrixXd corr = correlation_of(a * a.transpose());
      for (int m = 1; m < q; ++m) {
        CHECK(std::abs(corr(0, m)) < 1e-10);  // series 1 stays uncorrelated
        for (int n = m + 1; n < q; ++n) {
          CHECK(corr(m, n) == doctest::Approx(rho).epsilon(1e-10));
        }
      }
    }
    // q=4, rho=0.3 solves the quadratic with the smaller-magnitude root.
    const Eigen::MatrixXd a = simulator::build_innovation_matrix(4, 0.3);
    CHECK(a(1, 2) == doctest::Approx(0.14575).epsilon(1e-4));
  }

  TEST_CASE("innovation matrix input validation") {
    CHECK_THROWS_AS(simulator::build_innovation_matrix(2, 0.3), invalid_input);
    CHECK_THROWS_AS(simulator::build_innovation_matrix(4, -0.1), invalid_input);
    CHECK_THROWS_AS(simulator::build_innovation_matrix(4, 1.0), invalid_input);
  }

  TEST_CASE("short-memory conditions match their definitions") {
    const auto c1a = simulator::short_memory_condition(ShortMemoryCondition::C1A, 4);
    CHECK(c1a.mixing.isApprox(Eigen::MatrixXd::Identity(4, 4)));
    CHECK(c1a.ar.size() == 0);

    const auto c1b = simulator::short_memory_condition(ShortMemoryCondition::C1B, 4);
    CHECK(c1b.mixing.isApprox(Eigen::MatrixXd::Identity(4, 4)));
    CHECK(c1b.ar.isApprox(Eigen::VectorXd::Constant(4, 0.9)));

    const auto c2a =
        simulator::short_memory_condition(ShortMemoryCondition::C2A, 4, 0.3);
    CHECK(c2a.mixing.isApprox(simulator::build_innovation_matrix(4, 0.3)));
    CHECK(c2a.ar.size() == 0);

    const auto c2b =
        simulator::short_memory_condition(ShortMemoryCondition::C2B, 4, 0.3);
    CHECK(c2b.ar.isApprox(Eigen::VectorXd::Constant(4, 0.9)));

    CHECK_THROWS_AS(simulator::condition_from_label("3C"), invalid_input);
  }

  TEST_CASE("analytic short-memory covariance") {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
    CHECK(simulator::analytic_short_memory_covariance(eye, {}).matrix().isApprox(eye));

    const Eigen::VectorXd phi = Eigen::VectorXd::Constant(3, 0.9);
    const Eigen::MatrixXd ar1 =
        simulator::analytic_short_memory_covariance(eye, phi).matrix();
    CHECK(ar1(0, 0) == doctest::Approx(1.0 / 0.19));
    CHECK(ar1(0, 1) == doctest::Approx(0.0));

    const auto frag = simulator::short_memory_condition(ShortMemoryCondition::C2A, 4, 0.3);
    const Eigen::MatrixXd corr = correlation_of(
        simulator::analytic_short_memory_covariance(frag.mixing, frag.ar).matrix());
    for (int m = 1; m < 4; ++m) {
      for (int n = m + 1; n < 4; ++n) {
        CHECK(corr(m, n) == doctest::Approx(0.3).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("white-noise spec reduces to iid Gaussian") {
    ArfimaSpec spec(longmem::MemoryParams(Eigen::VectorXd::Zero(3)), {},
                    Eigen::MatrixXd::Identity(3, 3), 99);
    const auto out = simulator::simulate_arfima(spec, 1 << 14, 1024);
    const Eigen::MatrixXd cov = sample_covariance(out.series);
    CHECK((cov - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.05);
    CHECK(out.truth.gamma.matrix().isApprox(Eigen::MatrixXd::Identity(3, 3)));
  }

  TEST_CASE("fixed seed gives bit-identical output") {
    Eigen::VectorXd d(2);
    d << 0.2, -0.1;
    ArfimaSpec spec(longmem::MemoryParams(d), {}, Eigen::MatrixXd::Identity(2, 2), 7);
    const auto a = simulator::simulate_arfima(spec, 1024, 512);
    const auto b = simulator::simulate_arfima(spec, 1024, 512);
    CHECK(a.series == b.series);
    ArfimaSpec other = spec;
    other.seed = 8;
    CHECK(simulator::simulate_arfima(other, 1024, 512).series != a.series);
  }

  TEST_CASE("input validation") {
    ArfimaSpec spec(longmem::MemoryParams(Eigen::VectorXd::Zero(2)), {},
                    Eigen::MatrixXd::Identity(2, 2), 1);
    CHECK_THROWS_AS(simulator::simulate_arfima(spec, 1000, 0), invalid_input);
    CHECK_THROWS_AS(simulator::simulate_arfima(spec, 1024, -1), invalid_input);
    CHECK_THROWS_AS(ArfimaSpec(longmem::MemoryParams(Eigen::VectorXd::Zero(2)),
                               Eigen::VectorXd::Constant(2, 1.0),
                               Eigen::MatrixXd::Identity(2, 2), 1),
                    invalid_input);
  }

  TEST_CASE("internal short memory converges to the analytic covariance") {
    const auto frag = simulator::short_memory_condition(ShortMemoryCondition::C2B, 4, 0.3);
    Eigen::VectorXd d(4);
    d << -0.3, -0.1, 0.1, 0.3;
    ArfimaSpec spec(longmem::MemoryParams(d), frag.ar, frag.mixing, 12345);
    const auto out = simulator::simulate_arfima(spec, 1 << 16, 2048, true);
    REQUIRE(out.short_memory.has_value());
    const Eigen::MatrixXd cov = sample_covariance(*out.short_memory);
    const Eigen::MatrixXd truth = out.truth.gamma.matrix();
    CHECK((cov - truth).norm() / truth.norm() < 0.03);
  }

  TEST_CASE("permuting the spec permutes the output rows") {
    const auto frag = simulator::short_memory_condition(ShortMemoryCondition::C2A, 4, 0.3);
    Eigen::VectorXd d(4);
    d << -0.3, -0.1, 0.1, 0.3;
    ArfimaSpec spec(longmem::MemoryParams(d), frag.ar, frag.mixing, 77);
    const auto base = simulator::simulate_arfima(spec, 512, 256);

    // Reverse the series order, carrying every per-series field along.
    const int q = 4;
    Eigen::VectorXd dp(q);
    Eigen::MatrixXd ap(q, q);
    for (int m = 0; m < q; ++m) {
      dp[m] = d[q - 1 - m];
      for (int n = 0; n < q; ++n) ap(m, n) = frag.mixing(q - 1 - m, q - 1 - n);
    }
    ArfimaSpec permuted(longmem::MemoryParams(dp), frag.ar, ap, 77);
    for (int m = 0; m < q; ++m) permuted.stream_ids[m] = q - 1 - m;

    const auto flipped = simulator::simulate_arfima(permuted, 512, 256);
    for (int m = 0; m < q; ++m) {
      CHECK(flipped.series.row(m) == base.series.row(q - 1 - m));
    }
  }

  TEST_CASE("spectral slope of a simulated FIN matches the model") {
    // Averaged log-periodogram slope over low frequencies vs the -2d law.
    const double d_true = 0.3;
    const int n = 1 << 13;
    const int seeds = 40;
    const int lo_bin = n / 256;  // f = 2*pi/256
    const int hi_bin = n / 8;    // f = pi/4

    std::vector<double> log_power(static_cast<size_t>(hi_bin - lo_bin), 0.0);
    for (int s = 0; s < seeds; ++s) {
      ArfimaSpec spec(longmem::MemoryParams(Eigen::VectorXd::Constant(1, d_true)), {},
                      Eigen::MatrixXd::Identity(1, 1), 1000 + s);
      const auto out = simulator::simulate_arfima(spec, n, 4096);
      for (int k = lo_bin; k < hi_bin; ++k) {
        std::complex<double> acc(0.0, 0.0);
        const double w = 2.0 * M_PI * k / n;
        for (int t = 0; t < n; ++t) {
          acc += out.series(0, t) * std::exp(std::complex<double>(0.0, -w * t));
        }
        log_power[static_cast<size_t>(k - lo_bin)] += std::norm(acc) / n;
      }
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const int count = hi_bin - lo_bin;
    for (int k = 0; k < count; ++k) {
      const double x = std::log(2.0 * M_PI * (k + lo_bin) / n);
      const double y = std::log(log_power[static_cast<size_t>(k)] / seeds);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-2.0 * d_true).epsilon(0.10));
  }
}
