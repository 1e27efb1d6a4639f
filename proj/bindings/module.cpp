#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracconn/errors.hpp"
#include "fracconn/estimators.hpp"
#include "fracconn/longmem.hpp"
#include "fracconn/montecarlo.hpp"
#include "fracconn/simulator.hpp"
#include "fracconn/wavelet.hpp"

namespace py = pybind11;
using namespace fracconn;

namespace {

longmem::FinSpec make_spec(const Eigen::VectorXd& d, const Eigen::MatrixXd& gamma) {
  return {longmem::MemoryParams(d), longmem::ShortMemoryCovariance(gamma)};
}

std::vector<wavelet::WaveletDecomposition> decompose_all(const Eigen::MatrixXd& series,
                                                         const std::string& filter,
                                                         int levels) {
  const wavelet::WaveletFilter f = wavelet::WaveletFilter::by_name(filter);
  if (levels <= 0) levels = wavelet::default_levels(static_cast<int>(series.cols()));
  std::vector<wavelet::WaveletDecomposition> out;
  out.reserve(static_cast<size_t>(series.rows()));
  for (Eigen::Index m = 0; m < series.rows(); ++m) {
    out.push_back(wavelet::dwt(series.row(m).transpose(), f, levels));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_fracconn, m) {
  m.doc() = "Wavelet-based fractal and nonfractal connectivity analysis";

  py::register_exception<invalid_input>(m, "InvalidInputError", PyExc_ValueError);
  py::register_exception<out_of_range_error>(m, "OutOfRangeError", PyExc_ValueError);
  py::register_exception<estimation_failure>(m, "EstimationError", PyExc_RuntimeError);

  py::class_<wavelet::WaveletDecomposition>(m, "WaveletDecomposition")
      .def_readonly("levels", &wavelet::WaveletDecomposition::levels)
      .def_readonly("length", &wavelet::WaveletDecomposition::length)
      .def_readonly("filter_name", &wavelet::WaveletDecomposition::filter_name)
      .def("detail", &wavelet::WaveletDecomposition::detail, py::arg("j"),
           py::return_value_policy::copy)
      .def_property_readonly("smooth",
                             [](const wavelet::WaveletDecomposition& d) { return d.smooth; })
      .def("boundary_count", &wavelet::WaveletDecomposition::boundary_count,
           py::arg("j"));

  m.def(
      "dwt",
      [](const Eigen::VectorXd& series, const std::string& filter, int levels) {
        return wavelet::dwt(series, wavelet::WaveletFilter::by_name(filter),
                            levels > 0 ? levels
                                       : wavelet::default_levels(
                                             static_cast<int>(series.size())));
      },
      py::arg("series"), py::arg("filter") = "la8", py::arg("levels") = 0,
      "Orthonormal discrete wavelet transform with periodic boundaries.");
  m.def(
      "idwt",
      [](const wavelet::WaveletDecomposition& d) {
        return wavelet::idwt(d, wavelet::WaveletFilter::by_name(d.filter_name));
      },
      py::arg("decomposition"));
  m.def("wavelet_covariance", &wavelet::wavelet_covariance, py::arg("a"), py::arg("b"),
        py::arg("j"), py::arg("exclude_boundary") = true);
  m.def("wavelet_correlation", &wavelet::wavelet_correlation, py::arg("a"), py::arg("b"),
        py::arg("j"), py::arg("exclude_boundary") = true);

  m.def("lm_filter_coefficients", &longmem::lm_filter_coefficients, py::arg("d"),
        py::arg("length"), "Fractional integration filter impulse response.");
  m.def("band_constant", &longmem::band_constant, py::arg("dm"), py::arg("dn"));
  m.def("attenuation_ratio", &longmem::attenuation_ratio, py::arg("dm"), py::arg("dn"),
        "Ratio of fractal to nonfractal connectivity for a memory-parameter pair.");
  m.def(
      "asymptotic_wavelet_covariance",
      [](const Eigen::VectorXd& d, const Eigen::MatrixXd& gamma, int mi, int ni, int j) {
        return longmem::asymptotic_wavelet_covariance(make_spec(d, gamma), mi, ni, j);
      },
      py::arg("d"), py::arg("gamma"), py::arg("m"), py::arg("n"), py::arg("j"));
  m.def(
      "numerical_wavelet_covariance",
      [](const Eigen::VectorXd& d, const Eigen::MatrixXd& gamma, int mi, int ni, int j) {
        return longmem::numerical_wavelet_covariance(make_spec(d, gamma), mi, ni, j);
      },
      py::arg("d"), py::arg("gamma"), py::arg("m"), py::arg("n"), py::arg("j"));
  m.def(
      "theoretical_connectivity",
      [](const Eigen::VectorXd& d, const Eigen::MatrixXd& gamma) {
        const auto conn = longmem::theoretical_connectivity(make_spec(d, gamma));
        return py::make_tuple(conn.nonfractal, conn.fractal);
      },
      py::arg("d"), py::arg("gamma"),
      "Returns (nonfractal D, fractal rho_infinity) matrices.");

  m.def("build_innovation_matrix", &simulator::build_innovation_matrix, py::arg("q"),
        py::arg("rho"));
  m.def(
      "simulate_arfima",
      [](const Eigen::VectorXd& d, const Eigen::MatrixXd& mixing,
         const Eigen::VectorXd& ar, int n, std::uint64_t seed, int burnin) {
        simulator::ArfimaSpec spec(longmem::MemoryParams(d), ar, mixing, seed);
        const auto out = simulator::simulate_arfima(spec, n, burnin);
        return py::make_tuple(out.series, out.truth.gamma.matrix(),
                              out.nonfractal_truth);
      },
      py::arg("d"), py::arg("mixing"), py::arg("ar") = Eigen::VectorXd(),
      py::arg("n") = 2048, py::arg("seed") = 0,
      py::arg("burnin") = simulator::kDefaultBurnin,
      "Returns (series, gamma_truth, nonfractal_truth).");

  m.def(
      "estimate_memory",
      [](const Eigen::MatrixXd& series, const std::string& method,
         const std::string& filter, int levels) {
        const auto est = estimators::estimate_memory(
            decompose_all(series, filter, levels),
            estimators::memory_method_from_name(method));
        return est.d_hat;
      },
      py::arg("series"), py::arg("method") = "ml", py::arg("filter") = "la8",
      py::arg("levels") = 0);
  m.def(
      "estimate_connectivity",
      [](const Eigen::MatrixXd& series, const std::string& memory,
         const std::string& gamma, const std::string& filter, int levels) {
        estimators::PipelineOptions opts;
        opts.memory_method = estimators::memory_method_from_name(memory);
        opts.gamma_method = estimators::gamma_method_from_name(gamma);
        opts.filter = filter;
        opts.levels = levels;
        const auto r = estimators::estimate_connectivity(series, opts);
        py::dict out;
        out["pearson"] = r.pearson;
        out["d_hat"] = r.d_hat;
        out["gamma_hat"] = r.gamma_hat;
        out["nonfractal"] = r.nonfractal;
        out["fractal"] = r.fractal;
        return out;
      },
      py::arg("series"), py::arg("memory") = "ml", py::arg("gamma") = "cov",
      py::arg("filter") = "la8", py::arg("levels") = 0);
  m.def("pearson_correlation", &estimators::pearson_correlation, py::arg("series"));

  m.def(
      "run_experiment",
      [](const std::string& condition, int q, int n, int reps, double rho,
         std::uint64_t base_seed, const std::vector<std::string>& pairs) {
        montecarlo::ExperimentConfig config;
        config.condition = simulator::condition_from_label(condition);
        config.q = q;
        config.n = n;
        config.reps = reps;
        config.rho = rho;
        config.base_seed = base_seed;
        for (const auto& p : pairs) {
          config.estimator_pairs.push_back(montecarlo::pair_from_name(p));
        }
        const auto report = montecarlo::run_experiment(config);
        py::dict out;
        for (const auto& pr : report.pairs) {
          py::dict summary;
          summary["median"] = pr.summary.median;
          summary["q1"] = pr.summary.q1;
          summary["q3"] = pr.summary.q3;
          summary["mean"] = pr.summary.mean;
          summary["stdev"] = pr.summary.stdev;
          summary["count"] = pr.summary.count;
          out[py::str(montecarlo::pair_name(pr.estimator))] = summary;
        }
        return out;
      },
      py::arg("condition") = "1A", py::arg("q") = 4, py::arg("n") = 2048,
      py::arg("reps") = 10, py::arg("rho") = 0.0, py::arg("base_seed") = 1,
      py::arg("pairs") = std::vector<std::string>{},
      "Monte Carlo bias study; returns per-pair box-plot summaries.");
}
