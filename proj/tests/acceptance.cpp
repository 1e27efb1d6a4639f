// Acceptance gate: one pass/fail line per criterion, exit code = failure count.
#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracconn/commands.hpp"
#include "fracconn/dataset.hpp"
#include "fracconn/estimators.hpp"
#include "fracconn/longmem.hpp"
#include "fracconn/montecarlo.hpp"
#include "fracconn/simulator.hpp"
#include "fracconn/wavelet.hpp"

using namespace fracconn;
namespace fs = std::filesystem;

namespace {

int failures = 0;
std::string detail;

void criterion(int number, const std::string& name, const std::function<bool()>& body) {
  const auto start = std::chrono::steady_clock::now();
  detail.clear();
  bool ok = false;
  try {
    ok = body();
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s  %2d. %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
              secs, detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

bool expect(bool cond, const std::string& msg) {
  if (!cond && detail.empty()) detail = msg;
  return cond;
}

longmem::FinSpec pair_spec(double dm, double dn, double off) {
  Eigen::MatrixXd gamma(2, 2);
  gamma << 1.0, off, off, 1.0;
  Eigen::VectorXd d(2);
  d << dm, dn;
  return {longmem::MemoryParams(d), longmem::ShortMemoryCovariance(gamma)};
}

std::vector<wavelet::WaveletDecomposition> decompose(const Eigen::MatrixXd& series) {
  const auto f = wavelet::WaveletFilter::la8();
  const int levels = wavelet::default_levels(static_cast<int>(series.cols()));
  std::vector<wavelet::WaveletDecomposition> out;
  for (Eigen::Index m = 0; m < series.rows(); ++m) {
    out.push_back(wavelet::dwt(series.row(m).transpose(), f, levels));
  }
  return out;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

montecarlo::ExperimentConfig bias_study_config(
    simulator::ShortMemoryCondition condition, double rho) {
  montecarlo::ExperimentConfig c;
  c.condition = condition;
  c.q = 4;
  c.n = 1 << 11;
  c.reps = 100;
  c.rho = rho;
  c.base_seed = 20240901;
  return c;
}

const montecarlo::PairReport& find_pair(const montecarlo::BiasReport& report,
                                        const std::string& name) {
  for (const auto& pr : report.pairs) {
    if (montecarlo::pair_name(pr.estimator) == name) return pr;
  }
  throw std::runtime_error("estimator pair " + name + " missing from report");
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("fracconn_accept_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main() {
  criterion(1, "band-average oracle matches the asymptotic covariance law", [] {
    int misses = 0;
    double worst = 0.0, worst_dm = 0.0, worst_dn = 0.0;
    for (int a = 0; a < 7; ++a) {
      for (int b = 0; b < 7; ++b) {
        const double dm = -0.4 + 0.8 * a / 6.0;
        const double dn = -0.4 + 0.8 * b / 6.0;
        if (dm + dn >= 0.9) continue;
        const auto spec = pair_spec(dm, dn, 0.5);
        const double ratio = longmem::numerical_wavelet_covariance(spec, 0, 1, 8) /
                             longmem::asymptotic_wavelet_covariance(spec, 0, 1, 8);
        const double err = std::abs(ratio - 1.0);
        if (err > 0.02) ++misses;
        if (err > worst) {
          worst = err;
          worst_dm = dm;
          worst_dn = dn;
        }
      }
    }
    char buf[128];
    // Known to miss at (-0.4, 0.4) and (0.4, -0.4): the band average of the
    // cross-spectrum's phase factor cos((d_m-d_n)(pi-f)/2) sits
    // (|d_m-d_n|/2) * mean(f) * tan(|d_m-d_n| pi / 2) ~ 0.0227 above the
    // f -> 0 limit baked into the asymptotic law, which exceeds the gate.
    std::snprintf(buf, sizeof(buf),
                  "%d of 49 grid points exceed 0.02; worst |ratio-1|=%.5f at d=(%.3f,%.3f)",
                  misses, worst, worst_dm, worst_dn);
    return expect(misses == 0, buf);
  });

  criterion(2, "white-noise calibration of every estimator", [] {
    const int q = 4, n = 1 << 14, seeds = 100;
    const Eigen::MatrixXd mixing = simulator::build_innovation_matrix(q, 0.3);
    const Eigen::MatrixXd truth = mixing * mixing.transpose();
    std::vector<std::vector<double>> gamma_runs(3 * static_cast<size_t>(q * q));
    std::vector<double> d_lms, d_ml;
    const Eigen::VectorXd d0 = Eigen::VectorXd::Zero(q);
    for (int s = 0; s < seeds; ++s) {
      simulator::ArfimaSpec spec(longmem::MemoryParams(d0), {}, mixing,
                                 5000 + static_cast<std::uint64_t>(s));
      const auto decomps = decompose(simulator::simulate_arfima(spec, n).series);
      const estimators::GammaMethod methods[] = {estimators::GammaMethod::Lin,
                                                 estimators::GammaMethod::Cov,
                                                 estimators::GammaMethod::Sdf};
      for (int g = 0; g < 3; ++g) {
        const Eigen::MatrixXd est = estimators::estimate_gamma(decomps, d0, methods[g]);
        for (int i = 0; i < q * q; ++i) {
          gamma_runs[static_cast<size_t>(g * q * q + i)].push_back(
              est(i / q, i % q));
        }
      }
      const auto lms = estimators::estimate_memory_lms(decomps);
      const auto ml = estimators::estimate_memory_ml(decomps);
      for (int m = 0; m < q; ++m) {
        d_lms.push_back(lms.d_hat[m]);
        d_ml.push_back(ml.d_hat[m]);
      }
    }
    const char* names[] = {"LIN", "COV", "SDF"};
    for (int g = 0; g < 3; ++g) {
      for (int i = 0; i < q * q; ++i) {
        const double med = median_of(gamma_runs[static_cast<size_t>(g * q * q + i)]);
        const double want = truth(i / q, i % q);
        // 5% relative per element; exact zeros have no relative scale, so
        // they are held to 5% of the pair's variance scale instead.
        const double scale = std::sqrt(truth(i / q, i / q) * truth(i % q, i % q));
        const double tol = want != 0.0 ? 0.05 * std::abs(want) : 0.05 * scale;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s gamma(%d,%d) median %.4f vs %.4f",
                      names[g], i / q, i % q, med, want);
        if (!expect(std::abs(med - want) <= tol, buf)) return false;
      }
    }
    std::vector<double> abs_lms, abs_ml;
    for (double v : d_lms) abs_lms.push_back(std::abs(v));
    for (double v : d_ml) abs_ml.push_back(std::abs(v));
    return expect(median_of(abs_lms) <= 0.05, "LMS median |d_hat| above 0.05") &&
           expect(median_of(abs_ml) <= 0.05, "ML median |d_hat| above 0.05");
  });

  criterion(3, "round-trip nonfractal connectivity recovery, condition 2A", [] {
    auto config = bias_study_config(simulator::ShortMemoryCondition::C2A, 0.3);
    config.estimator_pairs = {
        {estimators::MemoryMethod::Ml, estimators::GammaMethod::Cov},
        {estimators::MemoryMethod::Ml, estimators::GammaMethod::Lin}};
    const auto report = montecarlo::run_experiment(config);
    for (const char* name : {"ML-COV", "ML-LIN"}) {
      const auto& pr = find_pair(report, name);
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%s median bias %.4f", name, pr.summary.median);
      if (!expect(std::abs(pr.summary.median) <= 0.1, buf)) return false;
    }
    return true;
  });

  criterion(4, "autocorrelated innovations widen every estimator's spread", [] {
    using simulator::ShortMemoryCondition;
    auto run = [](ShortMemoryCondition c, double rho) {
      auto config = bias_study_config(c, rho);
      config.reps = 800;
      // Equally spaced persistent memory parameters. With a sign-symmetric d
      // set the LIN estimator's noise floor on uncoupled pairs is inflated by
      // sqrt(B_mm B_nn) / (B_mn cos(pi (d_m - d_n) / 2))  (about 1.7 at
      // |d_m - d_n| = 0.6), which swamps the widening that autocorrelated
      // innovations cause; positive d keeps that factor near one so the
      // condition ordering is visible for all six estimator pairs.
      config.d_set.resize(4);
      config.d_set << 0.05, 0.15, 0.25, 0.35;
      return montecarlo::run_experiment(config);
    };
    const auto r1a = run(ShortMemoryCondition::C1A, 0.0);
    const auto r1b = run(ShortMemoryCondition::C1B, 0.0);
    const auto r2a = run(ShortMemoryCondition::C2A, 0.3);
    const auto r2b = run(ShortMemoryCondition::C2B, 0.3);
    for (const auto& pair : montecarlo::all_estimator_pairs()) {
      const std::string name = montecarlo::pair_name(pair);
      const double iqr_1a = find_pair(r1a, name).summary.iqr();
      const double iqr_1b = find_pair(r1b, name).summary.iqr();
      const double iqr_2a = find_pair(r2a, name).summary.iqr();
      const double iqr_2b = find_pair(r2b, name).summary.iqr();
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%s IQR 1A=%.4f 1B=%.4f 2A=%.4f 2B=%.4f",
                    name.c_str(), iqr_1a, iqr_1b, iqr_2a, iqr_2b);
      if (!expect(iqr_1b > iqr_1a && iqr_2b > iqr_2a, buf)) return false;
    }
    return true;
  });

  criterion(5, "bias grows with dimension; COV stays tightest at q=16", [] {
    auto base = bias_study_config(simulator::ShortMemoryCondition::C2A, 0.8);
    base.reps = 300;
    base.estimator_pairs = {
        {estimators::MemoryMethod::Ml, estimators::GammaMethod::Sdf},
        {estimators::MemoryMethod::Lms, estimators::GammaMethod::Sdf},
        {estimators::MemoryMethod::Ml, estimators::GammaMethod::Cov},
        {estimators::MemoryMethod::Ml, estimators::GammaMethod::Lin}};
    const auto reports =
        montecarlo::sweep(montecarlo::SweepAxis::Dimension, {4.0, 8.0, 16.0}, base);
    for (const char* name : {"ML-SDF", "LMS-SDF"}) {
      double prev = -1.0;
      for (const auto& report : reports) {
        const double med = std::abs(find_pair(report, name).summary.median);
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s |median| %.4f after %.4f at q=%d", name,
                      med, prev, report.config.q);
        if (!expect(med >= prev, buf)) return false;
        prev = med;
      }
    }
    const auto& at16 = reports.back();
    const double cov = find_pair(at16, "ML-COV").summary.iqr();
    const double lin = find_pair(at16, "ML-LIN").summary.iqr();
    const double sdf = find_pair(at16, "ML-SDF").summary.iqr();
    char buf[96];
    std::snprintf(buf, sizeof(buf), "q=16 IQR COV=%.4f LIN=%.4f SDF=%.4f", cov, lin, sdf);
    return expect(cov <= lin && cov <= sdf, buf);
  });

  criterion(6, "spread shrinks with series length for all estimator pairs", [] {
    auto base = bias_study_config(simulator::ShortMemoryCondition::C1A, 0.0);
    base.reps = 60;
    const auto reports = montecarlo::sweep(montecarlo::SweepAxis::Length,
                                           {512.0, 1024.0, 2048.0, 4096.0}, base);
    for (const auto& pair : montecarlo::all_estimator_pairs()) {
      const std::string name = montecarlo::pair_name(pair);
      double prev = std::numeric_limits<double>::infinity();
      for (const auto& report : reports) {
        const double iqr = find_pair(report, name).summary.iqr();
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s IQR %.4f after %.4f at N=%d", name.c_str(),
                      iqr, prev, report.config.n);
        if (!expect(iqr <= prev, buf)) return false;
        prev = iqr;
      }
    }
    return true;
  });

  criterion(7, "attenuation surface shape and spot value", [] {
    TempDir tmp;
    commands::cmd_grid(tmp.path / "grid.csv");
    const auto grid = io::read_matrix_csv(tmp.path / "grid.csv");
    const int n = static_cast<int>(grid.values.rows());
    if (!expect(n == 41, "grid is not 41x41")) return false;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        if (!expect(grid.values(i, k) > 0.0 && grid.values(i, k) <= 1.0,
                    "grid value outside (0, 1]")) return false;
        if (i == k && !expect(grid.values(i, k) == 1.0, "diagonal not exactly 1")) {
          return false;
        }
      }
    }
    if (!expect(grid.values == grid.values.transpose().eval(), "grid not symmetric")) {
      return false;
    }
    for (int i = 0; i + 2 < n; ++i) {
      for (int k = i + 2; k < n; ++k) {
        if (!expect(grid.values(i + 1, k - 1) > grid.values(i, k),
                    "no decay along a fixed-sum anti-diagonal")) return false;
      }
    }
    const double closed = longmem::attenuation_ratio(0.0, 0.4);
    const auto spec = pair_spec(0.0, 0.4, 0.5);
    const auto self_m = pair_spec(0.0, 0.0, 0.0);
    const auto self_n = pair_spec(0.4, 0.4, 0.0);
    const double quad =
        (longmem::numerical_wavelet_covariance(spec, 0, 1, 14) / 0.5) /
        std::sqrt(longmem::numerical_wavelet_covariance(self_m, 0, 0, 14) *
                  longmem::numerical_wavelet_covariance(self_n, 0, 0, 14));
    char buf[96];
    std::snprintf(buf, sizeof(buf), "closed=%.6f quadrature=%.6f", closed, quad);
    return expect(std::abs(closed - 0.8065) <= 5e-4, buf) &&
           expect(std::abs(quad - closed) <= 5e-4, buf);
  });

  criterion(8, "exact algebraic inversions and scaling invariance", [] {
    for (auto [dm, dn, g] : std::vector<std::tuple<double, double, double>>{
             {0.3, 0.3, 0.7}, {0.1, 0.4, -0.35}, {-0.2, 0.45, 0.12}}) {
      Eigen::VectorXd nu(10);
      const double beta = longmem::band_constant(dm, dn);
      for (int j = 1; j <= 10; ++j) nu[j - 1] = g * beta * std::pow(2.0, (dm + dn) * j);
      if (!expect(std::abs(estimators::invert_scale_law(nu, dm, dn) - g) <= 1e-9,
                  "LIN inversion misses the injected covariance")) return false;
    }

    Eigen::MatrixXd exact_nu(1, 9);
    for (int j = 1; j <= 9; ++j) exact_nu(0, j - 1) = 0.9 * std::pow(2.0, 2.0 * 0.27 * j);
    const auto lms = estimators::estimate_memory_lms_from_variances(exact_nu);
    if (!expect(std::abs(lms.d_hat[0] - 0.27) <= 1e-12,
                "LMS slope misses the injected power law")) return false;

    simulator::ArfimaSpec spec(
        longmem::MemoryParams(Eigen::VectorXd::Constant(1, 0.2)), {},
        Eigen::MatrixXd::Identity(1, 1), 314);
    const Eigen::MatrixXd x = simulator::simulate_arfima(spec, 1 << 12).series;
    const auto base = decompose(x);
    const auto scaled = decompose(Eigen::MatrixXd(1024.0 * x));
    const bool ml_same = estimators::estimate_memory_ml(base).d_hat[0] ==
                         estimators::estimate_memory_ml(scaled).d_hat[0];
    const bool lms_same = estimators::estimate_memory_lms(base).d_hat[0] ==
                          estimators::estimate_memory_lms(scaled).d_hat[0];
    return expect(ml_same, "ML d_hat changed under input rescaling") &&
           expect(lms_same, "LMS d_hat changed under input rescaling");
  });

  criterion(9, "transform foundations on 1000 random inputs", [] {
    std::mt19937 rng(2718);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 64 << (trial % 5);  // 64 .. 1024
      const auto filter = (trial % 2) ? wavelet::WaveletFilter::la8()
                                      : wavelet::WaveletFilter::haar();
      const int levels = 1 + trial % wavelet::default_levels(n);
      Eigen::VectorXd x(n), y(n);
      for (int t = 0; t < n; ++t) {
        x[t] = gauss(rng);
        y[t] = gauss(rng);
      }
      const auto dx = wavelet::dwt(x, filter, levels);
      const auto dy = wavelet::dwt(y, filter, levels);
      double energy = dx.smooth.squaredNorm();
      double cross = dx.smooth.dot(dy.smooth);
      for (int j = 1; j <= levels; ++j) {
        energy += dx.detail(j).squaredNorm();
        cross += dx.detail(j).dot(dy.detail(j));
      }
      if (!expect(std::abs(energy - x.squaredNorm()) <= 1e-9 * x.squaredNorm(),
                  "energy not conserved")) return false;
      if (!expect(std::abs(cross - x.dot(y)) <= 1e-9 * x.norm() * y.norm(),
                  "scale additivity identity violated")) return false;
      const Eigen::VectorXd back = wavelet::idwt(dx, filter);
      if (!expect((back - x).norm() <= 1e-9 * x.norm(), "reconstruction drifted")) {
        return false;
      }
    }
    return true;
  });

  criterion(10, "seeded subcommands are byte-deterministic", [] {
    TempDir tmp;
    std::ofstream(tmp.path / "sim.json")
        << R"({"q": 4, "N": 1024, "condition": "2B", "rho": 0.4, "seed": 77})";
    std::ofstream(tmp.path / "exp.json")
        << R"({"condition": "2A", "q": 4, "N": 1024, "reps": 8, "rho": 0.3,
               "baseSeed": 13, "estimatorPairs": ["ML-COV", "LMS-LIN"]})";

    commands::cmd_simulate(tmp.path / "sim.json", tmp.path / "s1");
    commands::cmd_simulate(tmp.path / "sim.json", tmp.path / "s2");
    if (!expect(slurp(tmp.path / "s1" / "series.csv") ==
                        slurp(tmp.path / "s2" / "series.csv") &&
                    slurp(tmp.path / "s1" / "truth.json") ==
                        slurp(tmp.path / "s2" / "truth.json"),
                "simulate outputs differ")) return false;

    commands::cmd_experiment(tmp.path / "exp.json", tmp.path / "e1");
    commands::cmd_experiment(tmp.path / "exp.json", tmp.path / "e2");
    if (!expect(slurp(tmp.path / "e1" / "bias_report.json") ==
                        slurp(tmp.path / "e2" / "bias_report.json") &&
                    slurp(tmp.path / "e1" / "bias_samples.csv") ==
                        slurp(tmp.path / "e2" / "bias_samples.csv"),
                "experiment outputs differ")) return false;

    const auto ds = io::ingest_csv(tmp.path / "s1" / "series.csv");
    commands::cmd_estimate(ds, {}, tmp.path / "c1");
    commands::cmd_estimate(ds, {}, tmp.path / "c2");
    for (const char* name : {"pearson.csv", "d_hat.csv", "gamma_hat.csv",
                             "nonfractal.csv", "fractal.csv", "diagnostics.json"}) {
      if (!expect(slurp(tmp.path / "c1" / name) == slurp(tmp.path / "c2" / name),
                  std::string("estimate output differs: ") + name)) return false;
    }

    commands::cmd_grid(tmp.path / "g1.csv");
    commands::cmd_grid(tmp.path / "g2.csv");
    return expect(slurp(tmp.path / "g1.csv") == slurp(tmp.path / "g2.csv"),
                  "grid outputs differ");
  });

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures;
}
