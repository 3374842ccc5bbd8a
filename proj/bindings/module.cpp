#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qhist/cli.hpp"
#include "qhist/histories.hpp"
#include "qhist/selection.hpp"
#include "qhist/spinmodel.hpp"

namespace py = pybind11;
using namespace qhist;

namespace {

SpinModelConfig make_config(const Vec3& v, const std::vector<Vec3>& u) {
  SpinModelConfig cfg;
  cfg.v = v;
  cfg.u = u;
  cfg.validate();
  return cfg;
}

SpinModelConfig make_random_config(int n, std::uint64_t seed, double genericity_tol) {
  SplitMix64 rng(seed);
  return random_generic_config(n, rng, genericity_tol);
}

HistorySpec make_spec(std::vector<int> between, std::optional<double> interior,
                      std::optional<int> final_k) {
  HistorySpec spec;
  spec.between = std::move(between);
  spec.interior = interior;
  spec.final_k = final_k;
  return spec;
}

}  // namespace

PYBIND11_MODULE(_qhist, m) {
  m.doc() = "spin-model consistent-histories simulator";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<VerifyError>(m, "VerifyError");
  py::register_exception<DegeneracyError>(m, "DegeneracyError");

  py::class_<SpinModelConfig>(m, "SpinModelConfig")
      .def(py::init(&make_config), py::arg("v"), py::arg("u"))
      .def_readonly("v", &SpinModelConfig::v)
      .def_readonly("u", &SpinModelConfig::u)
      .def_property_readonly("n", &SpinModelConfig::n)
      .def_property_readonly("dim", &SpinModelConfig::dim)
      .def("c", &SpinModelConfig::c, py::arg("k"))
      .def("__repr__", [](const SpinModelConfig& cfg) {
        return "SpinModelConfig(n=" + std::to_string(cfg.n()) + ")";
      });

  m.def("random_config", &make_random_config, py::arg("n"), py::arg("seed"),
        py::arg("genericity_tol") = 1e-6,
        "uniformly random model with pairwise genericity margins");

  m.def("theta", &theta_k, py::arg("k"), py::arg("t"));
  m.def(
      "schmidt_axis",
      [](const SpinModelConfig& cfg, double t) {
        SchmidtAxis ax = schmidt_axis(cfg, t);
        return py::make_tuple(ax.w, ax.N);
      },
      py::arg("config"), py::arg("t"),
      "reduced-state Bloch axis w(t) and its norm N(t)");
  m.def(
      "evolve",
      [](const SpinModelConfig& cfg, double t) { return evolve(cfg, t).amp; },
      py::arg("config"), py::arg("t"), "state amplitudes at time t");
  m.def(
      "schmidt_weights",
      [](const SpinModelConfig& cfg, double t) {
        return schmidt_decompose(evolve(cfg, t)).weights;
      },
      py::arg("config"), py::arg("t"));

  m.def(
      "probabilities",
      [](const SpinModelConfig& cfg, std::vector<int> between,
         std::optional<double> interior, std::optional<int> final_k) {
        return analytic_probabilities(
            cfg, make_spec(std::move(between), interior, final_k));
      },
      py::arg("config"), py::arg("between") = std::vector<int>{},
      py::arg("interior") = std::nullopt, py::arg("final_k") = std::nullopt,
      "closed-form history probabilities, earliest projection as msb");
  m.def("offdiag", &offdiag_general, py::arg("config"), py::arg("t"), py::arg("s"),
        py::arg("a_t") = 1, py::arg("a_s") = 1,
        "two-time decoherence element between (a_t,a_s) and (-a_t,a_s)");
  m.def("offdiag_cases", &analytic_offdiag_pair, py::arg("config"), py::arg("t"),
        py::arg("s"), py::arg("a_t") = 1, py::arg("a_s") = 1,
        "the same element assembled from the per-case closed forms");
  m.def(
      "decoherence",
      [](const SpinModelConfig& cfg, std::vector<double> times) {
        return brute_decoherence(cfg, std::move(times));
      },
      py::arg("config"), py::arg("times"),
      "full-space decoherence matrix of Schmidt projections at the times");

  py::class_<PairRecord>(m, "PairRecord")
      .def_readonly("t", &PairRecord::t)
      .def_readonly("s", &PairRecord::s)
      .def_readonly("offdiag_abs", &PairRecord::offdiag_abs)
      .def_readonly("consistent", &PairRecord::consistent)
      .def_property_readonly("case_tag",
                             [](const PairRecord& r) { return pair_case_name(r.tag); })
      .def("__repr__", [](const PairRecord& r) {
        return "PairRecord(t=" + fmt17(r.t) + ", s=" + fmt17(r.s) + ", " +
               pair_case_name(r.tag) + (r.consistent ? ", consistent)" : ")");
      });
  m.def("classify_pairs", &classify_pairs, py::arg("config"), py::arg("grid") = 25,
        py::arg("tol") = 1e-9, py::arg("use_brute") = false,
        "scan grid pairs and verify consistency matches the allowed forms");

  m.def("f_info", &f_info, py::arg("x"),
        "entropy of a binary split with mean x, in nats");
  m.def("set_information", &set_information, py::arg("config"), py::arg("k"),
        py::arg("t"));
  m.def("closed_form_information", &closed_form_Ek, py::arg("config"), py::arg("k"));

  py::class_<SelectionResult>(m, "SelectionResult")
      .def_readonly("chosen_k", &SelectionResult::chosen_k)
      .def_readonly("optimal_t", &SelectionResult::optimal_t)
      .def_readonly("information", &SelectionResult::information)
      .def_readonly("E_values", &SelectionResult::E_values)
      .def_readonly("t_values", &SelectionResult::t_values)
      .def_readonly("ties", &SelectionResult::ties)
      .def("__repr__", [](const SelectionResult& r) {
        return "SelectionResult(chosen_k=" + std::to_string(r.chosen_k) +
               ", information=" + fmt17(r.information) + ")";
      });
  m.def(
      "select",
      [](const SpinModelConfig& cfg, bool closed_form, double tie_tol) {
        return max_info_select(
            cfg, closed_form ? SelectRoute::closed_form : SelectRoute::maximize,
            tie_tol);
      },
      py::arg("config"), py::arg("closed_form") = false, py::arg("tie_tol") = 1e-10,
      "pick the interaction whose complete set carries maximal information");

  py::class_<MonteCarloReport>(m, "MonteCarloReport")
      .def_readonly("n", &MonteCarloReport::n)
      .def_readonly("samples", &MonteCarloReport::samples)
      .def_readonly("seed", &MonteCarloReport::seed)
      .def_readonly("threads", &MonteCarloReport::threads)
      .def_readonly("counts", &MonteCarloReport::counts)
      .def_readonly("fraction_by_k", &MonteCarloReport::fraction_by_k)
      .def_readonly("fraction_Sn", &MonteCarloReport::fraction_Sn)
      .def_readonly("stderr_Sn", &MonteCarloReport::stderr_Sn)
      .def_readonly("rejected", &MonteCarloReport::rejected);
  m.def("montecarlo", &montecarlo_stats, py::arg("n"), py::arg("samples"),
        py::arg("seed") = 20240817, py::arg("threads") = 0,
        py::arg("genericity_tol") = 1e-6,
        "selection statistics over random models; thread-count independent");

  py::class_<ILCandidate>(m, "ILCandidate")
      .def_readonly("between", &ILCandidate::between)
      .def_readonly("k", &ILCandidate::k)
      .def_readonly("omega", &ILCandidate::omega)
      .def_readonly("has_final", &ILCandidate::has_final)
      .def_readonly("m", &ILCandidate::m)
      .def_readonly("s_prime", &ILCandidate::s_prime)
      .def_readonly("times", &ILCandidate::times);
  py::class_<ILResult>(m, "ILResult")
      .def_readonly("minimizer", &ILResult::minimizer)
      .def_readonly("best_by_m", &ILResult::best_by_m)
      .def_readonly("terms", &ILResult::terms)
      .def_readonly("s_second", &ILResult::s_second);
  m.def("min_entropy_select", &min_il_select, py::arg("config"),
        py::arg("max_times") = -1, py::arg("omega_grid") = 33,
        "minimize the projection-count-weighted entropy over allowed sets");

  py::class_<ExtendabilityReport>(m, "ExtendabilityReport")
      .def_readonly("nonextendable", &ExtendabilityReport::nonextendable)
      .def_readonly("extendable_times", &ExtendabilityReport::extendable_times);
  m.def("check_nonextendable", &check_nonextendable, py::arg("config"), py::arg("k"),
        py::arg("t_star"), py::arg("grid") = 25, py::arg("consistency_tol") = 1e-10,
        py::arg("p_min") = 1e-12);
}
