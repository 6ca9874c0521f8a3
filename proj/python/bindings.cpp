#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "spinbath/echo.hpp"
#include "spinbath/ensembles.hpp"
#include "spinbath/errors.hpp"
#include "spinbath/limit_laws.hpp"
#include "spinbath/model.hpp"
#include "spinbath/runner/config.hpp"
#include "spinbath/runner/run.hpp"
#include "spinbath/spectrum.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace spinbath;

namespace {

EnvironmentAmplitudes amplitudes_from_pairs(const std::vector<std::pair<Complex, Complex>>& pairs) {
  std::vector<AmplitudePair> out;
  out.reserve(pairs.size());
  for (const auto& [up, down] : pairs) out.push_back({up, down});
  return EnvironmentAmplitudes(std::move(out));
}

std::vector<std::pair<double, double>> spectrum_entries(const EnergySpectrum& s) {
  std::vector<std::pair<double, double>> out;
  out.reserve(s.size());
  for (const auto& line : s.entries()) out.emplace_back(line.energy, line.weight);
  return out;
}

void bind_errors(py::module_& m) {
  static py::exception<Error> base(m, "SpinbathError");
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
}

void bind_model(py::module_& m) {
  py::class_<CouplingSet>(m, "CouplingSet")
      .def(py::init<std::vector<double>>(), py::arg("couplings"))
      .def("__len__", &CouplingSet::size)
      .def_property_readonly("values", [](const CouplingSet& c) {
        return std::vector<double>(c.values().begin(), c.values().end());
      });

  py::class_<EnvironmentAmplitudes>(m, "EnvironmentAmplitudes")
      .def(py::init(&amplitudes_from_pairs), py::arg("pairs"),
           "Pairs (alpha_k, beta_k); each must satisfy |alpha|^2 + |beta|^2 = 1 within 1e-12.")
      .def_static("from_weights",
                  [](const std::vector<double>& w) { return EnvironmentAmplitudes::from_weights(w); },
                  py::arg("up_weights"))
      .def("__len__", &EnvironmentAmplitudes::size)
      .def_property_readonly("pairs",
                             [](const EnvironmentAmplitudes& a) {
                               std::vector<std::pair<Complex, Complex>> out;
                               for (const auto& p : a.pairs()) out.emplace_back(p.up, p.down);
                               return out;
                             })
      .def_property_readonly("up_weights", [](const EnvironmentAmplitudes& a) {
        return std::vector<double>(a.up_weights().begin(), a.up_weights().end());
      });

  py::class_<SystemState>(m, "SystemState")
      .def(py::init<Complex, Complex>(), py::arg("a"), py::arg("b"))
      .def_property_readonly("a", &SystemState::a)
      .def_property_readonly("b", &SystemState::b);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<double, double, std::size_t>(), py::arg("start"), py::arg("stop"),
           py::arg("steps"))
      .def("samples", &TimeGrid::samples);

  py::class_<DecoherenceTrace>(m, "DecoherenceTrace")
      .def_readonly("times", &DecoherenceTrace::times)
      .def_readonly("values", &DecoherenceTrace::values)
      .def_property_readonly("spins", [](const DecoherenceTrace& t) { return t.meta.spins; })
      .def_property_readonly("ensemble", [](const DecoherenceTrace& t) { return t.meta.ensemble; })
      .def_property_readonly("seed", [](const DecoherenceTrace& t) { return t.meta.seed; });

  py::class_<ReducedDensityMatrix>(m, "ReducedDensityMatrix")
      .def_readonly("rho00", &ReducedDensityMatrix::rho00)
      .def_readonly("rho01", &ReducedDensityMatrix::rho01)
      .def_readonly("rho10", &ReducedDensityMatrix::rho10)
      .def_readonly("rho11", &ReducedDensityMatrix::rho11)
      .def("purity", &ReducedDensityMatrix::purity)
      .def("eigenvalues", &ReducedDensityMatrix::eigenvalues);

  m.def("decoherence_factor", &decoherence_factor, py::arg("couplings"), py::arg("amps"),
        py::arg("t"));
  m.def("decoherence_trace", &decoherence_trace, py::arg("couplings"), py::arg("amps"),
        py::arg("grid"), py::arg("threads") = 1);
  m.def(
      "evolve_environment_branch",
      [](const CouplingSet& g, const EnvironmentAmplitudes& a, double t, int branch) {
        return evolve_environment_branch(g, a, t, branch_from_label(branch));
      },
      py::arg("couplings"), py::arg("amps"), py::arg("t"), py::arg("branch"));
  m.def("overlap", &overlap, py::arg("bra"), py::arg("ket"));
  m.def("reduced_density_matrix", &reduced_density_matrix, py::arg("system"), py::arg("r"));
}

void bind_spectrum(py::module_& m) {
  py::class_<EnergySpectrum>(m, "EnergySpectrum")
      .def("__len__", &EnergySpectrum::size)
      .def_property_readonly("entries", &spectrum_entries)
      .def_property_readonly("merged", &EnergySpectrum::merged)
      .def_property_readonly("source_size", &EnergySpectrum::source_size)
      .def("mean", &EnergySpectrum::mean)
      .def("variance", &EnergySpectrum::variance);

  py::class_<LdosHistogram>(m, "LdosHistogram")
      .def_readonly("edges", &LdosHistogram::edges)
      .def_readonly("masses", &LdosHistogram::masses)
      .def("mean", &LdosHistogram::mean);

  m.def("enumerate_walks", &enumerate_walks, py::arg("couplings"), py::arg("amps"),
        py::arg("cap") = kDefaultEnumerationCap);
  m.def("merge_degenerate", &merge_degenerate, py::arg("spectrum"), py::arg("epsilon"));
  m.def("default_merge_epsilon", &default_merge_epsilon, py::arg("couplings"));
  m.def(
      "ldos",
      [](const EnergySpectrum& s, std::size_t bins) {
        return ldos(s, bins ? bins : default_bin_count(s));
      },
      py::arg("spectrum"), py::arg("bins") = 0);
  m.def("characteristic_function", &characteristic_function, py::arg("spectrum"), py::arg("t"));
}

void bind_limit_laws(py::module_& m) {
  py::class_<StatisticsSummary>(m, "StatisticsSummary")
      .def_readonly("step_means", &StatisticsSummary::step_means)
      .def_readonly("step_variances", &StatisticsSummary::step_variances)
      .def_readonly("mean", &StatisticsSummary::mean)
      .def_readonly("variance", &StatisticsSummary::variance)
      .def("gaussian_validity_window", &StatisticsSummary::gaussian_validity_window);

  py::class_<LindebergReport>(m, "LindebergReport")
      .def_readonly("max_step_ratio", &LindebergReport::max_step_ratio)
      .def_readonly("tail_mass", &LindebergReport::tail_mass)
      .def_readonly("threshold", &LindebergReport::threshold)
      .def_property_readonly("verdict",
                             [](const LindebergReport& r) { return std::string(to_string(r.verdict)); });

  m.def("summarize", &summarize, py::arg("couplings"), py::arg("amps"));
  m.def("gaussian_ldos", &gaussian_ldos, py::arg("summary"), py::arg("energy"));
  m.def("gaussian_decoherence", &gaussian_decoherence, py::arg("summary"), py::arg("t"));
  m.def("laplace_demoivre_weight", &laplace_demoivre_weight, py::arg("n"), py::arg("l"),
        py::arg("alpha_sq"));
  m.def("lindeberg_check", &lindeberg_check, py::arg("summary"),
        py::arg("threshold") = kDefaultLindebergThreshold);
  m.def("long_time_average_sq", &long_time_average_sq, py::arg("amps"));
  m.def("empirical_time_average_sq", &empirical_time_average_sq, py::arg("couplings"),
        py::arg("amps"), py::arg("horizon"), py::arg("samples"), py::arg("threads") = 1);
}

void bind_ensembles(py::module_& m) {
  py::class_<FixedCoupling>(m, "FixedCoupling")
      .def(py::init<double>(), py::arg("value") = 1.0)
      .def_readwrite("value", &FixedCoupling::value);
  py::class_<UniformCoupling>(m, "UniformCoupling")
      .def(py::init<double, double>(), py::arg("lo") = 0.0, py::arg("hi") = 1.0);
  py::class_<GaussianCoupling>(m, "GaussianCoupling")
      .def(py::init<double, double>(), py::arg("mean") = 0.0, py::arg("sigma") = 1.0);
  py::class_<LorentzianCoupling>(m, "LorentzianCoupling")
      .def(py::init<double, double>(), py::arg("center") = 0.0, py::arg("gamma") = 1.0);
  py::class_<EqualAmplitudes>(m, "EqualAmplitudes").def(py::init<>());
  py::class_<FixedAmplitudes>(m, "FixedAmplitudes")
      .def(py::init<double>(), py::arg("alpha_sq") = 0.5);
  py::class_<RandomAmplitudes>(m, "RandomAmplitudes").def(py::init<>());

  py::class_<EnsembleSpec>(m, "EnsembleSpec")
      .def(py::init([](CouplingDistribution c, AmplitudeRule a, std::size_t spins,
                       std::size_t realizations, std::uint64_t seed) {
             return EnsembleSpec{c, a, spins, realizations, seed};
           }),
           py::arg("couplings"), py::arg("amplitudes"), py::arg("spins"),
           py::arg("realizations") = 1, py::arg("seed") = 0);

  py::class_<EnsembleResult>(m, "EnsembleResult")
      .def_readonly("mean", &EnsembleResult::mean)
      .def_readonly("stderr_re", &EnsembleResult::stderr_re)
      .def_readonly("stderr_im", &EnsembleResult::stderr_im)
      .def_readonly("mean_abs", &EnsembleResult::mean_abs)
      .def_readonly("realizations", &EnsembleResult::realizations);

  m.def("sample_couplings", &sample_couplings, py::arg("dist"), py::arg("spins"), py::arg("seed"),
        py::arg("realization") = 0);
  m.def("sample_amplitudes", &sample_amplitudes, py::arg("rule"), py::arg("spins"),
        py::arg("seed"), py::arg("realization") = 0);
  m.def("ensemble_average_trace", &ensemble_average_trace, py::arg("spec"), py::arg("grid"),
        py::arg("keep_realizations") = false, py::arg("threads") = 1);
}

void bind_echo(py::module_& m) {
  py::class_<DiagonalBranchHamiltonian>(m, "DiagonalBranchHamiltonian")
      .def(py::init([](const std::vector<std::pair<double, double>>& levels) {
             std::vector<LevelPair> out;
             for (const auto& [up, down] : levels) out.push_back({up, down});
             return DiagonalBranchHamiltonian(std::move(out));
           }),
           py::arg("levels"))
      .def_static("from_couplings", &DiagonalBranchHamiltonian::from_couplings)
      .def_static("zero", &DiagonalBranchHamiltonian::zero)
      .def("negated", &DiagonalBranchHamiltonian::negated);

  m.def("echo_amplitude", &echo_amplitude, py::arg("h0"), py::arg("h1"), py::arg("amps"),
        py::arg("t"));
  m.def("survival_probability", &survival_probability, py::arg("h"), py::arg("amps"),
        py::arg("t"));
  m.def("strength_function", &strength_function, py::arg("h"), py::arg("amps"),
        py::arg("cap") = kDefaultEnumerationCap);
}

void bind_runner(py::module_& m) {
  m.def(
      "run",
      [](const std::string& config_text, const std::map<std::string, std::string>& overrides) {
        auto entries = runner::parse_config_text(config_text);
        for (const auto& [key, value] : overrides) runner::set_entry(entries, key, value);
        const auto result = runner::run(runner::resolve_config(entries));
        std::vector<std::string> paths;
        for (const auto& rec : result.outputs) paths.push_back(rec.path);
        return py::make_tuple(paths, result.manifest);
      },
      py::arg("config_text"), py::arg("overrides") = std::map<std::string, std::string>{},
      "Runs an experiment from config text; returns (output file names, manifest path).");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact central-spin dephasing: decoherence factor, walk spectrum, limit laws.";
  bind_errors(m);
  bind_model(m);
  bind_spectrum(m);
  bind_limit_laws(m);
  bind_ensembles(m);
  bind_echo(m);
  bind_runner(m);

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
