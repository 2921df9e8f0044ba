#include <map>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "entropic/experiment.hpp"

namespace py = pybind11;
using namespace entropic;

namespace {

HermitianMatrix herm(const ComplexMatrix& m) { return HermitianMatrix::from_matrix(m, 1e-10); }

BlockState blocks(const std::vector<ComplexMatrix>& xs, const std::vector<double>& budgets) {
  if (xs.size() != budgets.size()) throw std::invalid_argument("blocks and budgets differ in length");
  BlockState out;
  for (std::size_t i = 0; i < xs.size(); ++i) out.emplace_back(herm(xs[i]), budgets[i]);
  return out;
}

std::vector<ComplexMatrix> matrices(const BlockState& x) {
  std::vector<ComplexMatrix> out;
  for (const auto& b : x) out.push_back(b.matrix().matrix());
  return out;
}

std::vector<ComplexMatrix> matrices(const MappingBlocks& f) {
  std::vector<ComplexMatrix> out;
  for (const auto& b : f) out.push_back(b.matrix());
  return out;
}

StepSchedule schedule_from(const std::string& kind, double scale, std::size_t horizon) {
  return StepSchedule(parse_schedule_kind(kind), scale, horizon);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entropic mirror descent on spectrahedra";

  py::register_exception<experiment::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UnsupportedOperation>(m, "UnsupportedOperation", PyExc_NotImplementedError);

  m.def("eig", [](const ComplexMatrix& a) {
    const auto d = eig(herm(a));
    return py::make_tuple(d.eigenvalues, d.eigenvectors);
  }, py::arg("a"), "Ascending eigenvalues and phased eigenvectors of a Hermitian matrix.");

  m.def("gibbs", [](const ComplexMatrix& y, double p) { return gibbs(herm(y), p).matrix().matrix(); },
        py::arg("y"), py::arg("trace_budget") = 1.0);
  m.def("entropy", [](const ComplexMatrix& x) { return entropy(SpectraPoint(herm(x), 1.0)); }, py::arg("x"));
  m.def("divergence", [](const ComplexMatrix& x, const ComplexMatrix& y) {
    return divergence(SpectraPoint(herm(x), 1.0), SpectraPoint(herm(y), 1.0));
  }, py::arg("x"), py::arg("y"));
  m.def("conjugate", [](const ComplexMatrix& y) { return conjugate(DualPoint(herm(y))); }, py::arg("y"));
  m.def("fenchel_coupling", [](const ComplexMatrix& q, const ComplexMatrix& y) {
    return fenchel_coupling(SpectraPoint(herm(q), 1.0), DualPoint(herm(y)));
  }, py::arg("q"), py::arg("y"));

  m.def("gap", [](const std::vector<ComplexMatrix>& x, const std::vector<ComplexMatrix>& f,
                  const std::vector<double>& budgets) {
    MappingBlocks mapping;
    for (const auto& b : f) mapping.push_back(herm(b));
    return gap(blocks(x, budgets), mapping);
  }, py::arg("x"), py::arg("mapping"), py::arg("budgets"));

  m.def("rate_bound_mdis", &rate_bound_mdis, py::arg("lipschitz_total"), py::arg("initial_divergence"), py::arg("n"),
        py::arg("horizon"));
  m.def("rate_bound_csvi", &rate_bound_csvi, py::arg("noise_total"), py::arg("dims"), py::arg("horizon"));

  m.def("mdis_linear", [](const std::vector<ComplexMatrix>& as, std::size_t iterations, const std::string& schedule,
                          double scale) {
    if (as.empty()) throw std::invalid_argument("mdis_linear: no objectives");
    std::vector<ComponentObjective> objs;
    for (const auto& a : as) objs.push_back(make_linear_objective(herm(a)));
    const auto r = mdis_solve(objs, schedule_from(schedule, scale, iterations), iterations,
                              SpectraPoint::uniform(as.front().rows()));
    std::vector<double> values, best;
    for (const auto& row : r.trace) {
      values.push_back(row.value);
      best.push_back(row.best_value);
    }
    py::dict out;
    out["best_value"] = r.best_value;
    out["best_iterate"] = r.best_iterate.matrix().matrix();
    out["values"] = values;
    out["best_values"] = best;
    return out;
  }, py::arg("a"), py::arg("iterations"), py::arg("schedule") = "harmonic_sqrt", py::arg("scale") = 1.0,
     "Minimize sum_i tr(A_i X) over unit-trace PSD matrices.");

  py::class_<mimo::MimoNetwork>(m, "MimoNetwork")
      .def_static("hex", [](Eigen::Index n, Eigen::Index m, double sigma, std::uint64_t seed, bool unit_power) {
        return mimo::build_hex_network(n, m, sigma, seed, unit_power ? mimo::PowerMode::unit : mimo::PowerMode::dbm);
      }, py::arg("n"), py::arg("m"), py::arg("sigma"), py::arg("seed"), py::arg("unit_power") = false,
         "Seven-link hexagonal network with Rayleigh channels.")
      .def_property_readonly("players", &mimo::MimoNetwork::players)
      .def_readonly("power", &mimo::MimoNetwork::power)
      .def_readonly("tx_antennas", &mimo::MimoNetwork::tx_antennas)
      .def_readonly("noise_variance", &mimo::MimoNetwork::noise_variance)
      .def("channel", [](const mimo::MimoNetwork& net, std::size_t j, std::size_t i) {
        return net.channels.at(j).at(i);
      }, py::arg("transmitter"), py::arg("receiver"))
      .def("payoffs", [](const mimo::MimoNetwork& net, const std::vector<ComplexMatrix>& x) {
        return mimo::payoffs(blocks(x, net.power), net);
      }, py::arg("x"))
      .def("mapping", [](const mimo::MimoNetwork& net, const std::vector<ComplexMatrix>& x) {
        return matrices(mimo::exact_mapping(blocks(x, net.power), net));
      }, py::arg("x"))
      .def("gap", [](const mimo::MimoNetwork& net, const std::vector<ComplexMatrix>& x) {
        const BlockState state = blocks(x, net.power);
        return gap(state, mimo::exact_mapping(state, net));
      }, py::arg("x"));

  m.def("solve_vi", [](const mimo::MimoNetwork& net, std::size_t iterations, const std::string& variant,
                       std::uint64_t seed, const std::string& schedule, double scale, double mel_lambda,
                       std::size_t gap_stride) {
    Rng estimator(mix_seed(seed ^ 0xC0FFEE));
    const VIOracle oracle = mimo::noisy_oracle(net, estimator);
    Rng rng(seed);
    CsviOptions options;
    options.gap_stride = gap_stride;
    options.mel_lambda = mel_lambda;
    const auto r = amsmd_solve(oracle, schedule_from(schedule, scale, iterations), iterations, net.tx_antennas,
                               net.power, parse_variant(variant), rng, options);
    std::vector<std::size_t> ts;
    std::vector<double> gaps;
    for (const auto& row : r.trace) {
      ts.push_back(row.t);
      gaps.push_back(row.gap);
    }
    py::dict out;
    out["solution"] = matrices(r.solution);
    out["t"] = ts;
    out["gap"] = gaps;
    return out;
  }, py::arg("network"), py::arg("iterations"), py::arg("variant") = "amsmd", py::arg("seed") = 1,
     py::arg("schedule") = "harmonic_sqrt", py::arg("scale") = 1.0, py::arg("mel_lambda") = 0.0,
     py::arg("gap_stride") = 10,
     "Run A-M-SMD, M-SMD or MEL on the network's stochastic game.");

  m.def("hex_cell_distances", &mimo::hex_cell_distances);

  m.def("run_experiment", [](const std::string& config_text, const std::map<std::string, std::string>& overrides) {
    experiment::Overrides ov(overrides.begin(), overrides.end());
    const auto config = experiment::parse_config(config_text, ov);
    const auto violations = experiment::validate(config);
    if (!violations.empty()) throw experiment::ConfigError("invalid config: " + violations.front());
    return experiment::to_csv(config, experiment::execute(config));
  }, py::arg("config") = "", py::arg("overrides") = std::map<std::string, std::string>{},
     "Run an experiment from key=value text and return its CSV.");
}
