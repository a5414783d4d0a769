#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mkp/error.hpp"
#include "mkp/inference.hpp"
#include "mkp/io.hpp"
#include "mkp/optics.hpp"
#include "mkp/qstate.hpp"
#include "mkp/tuner.hpp"
#include "mkp/vaa.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

mkp::TwoPhotonState as_state(const Eigen::MatrixXcd& amps) { return {amps}; }

mkp::DecodeOptions as_options(const std::string& strategy, bool post_select) {
    return {mkp::io::strategy_from_string(strategy), post_select};
}

py::dict report_dict(const mkp::SuccessReport& report) {
    return py::dict("p_v"_a = report.p_v, "p_m"_a = report.p_m, "average"_a = report.average_p_m());
}

}  // namespace

PYBIND11_MODULE(_mkp, m) {
    m.doc() = "Mean King's Problem optics simulator and phase optimizer";

    static py::exception<mkp::Error> error(m, "MkpError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const mkp::Error& e) {
            error(e.what());
        }
    });

    m.def("is_odd_prime", &mkp::is_odd_prime);

    py::class_<mkp::MubFamily>(m, "MubFamily")
        .def(py::init<int>(), "dim"_a)
        .def_property_readonly("dim", &mkp::MubFamily::dim)
        .def("basis", &mkp::MubFamily::basis, "m"_a, "Rows are the basis states.")
        .def("state", [](const mkp::MubFamily& f, int mb, int j) { return f.state(mb, j).amps; }, "m"_a, "j"_a);
    m.def("build_mub", &mkp::build_mub, "dim"_a);
    m.def("bell_state", [](const mkp::MubFamily& f, int mb) { return mkp::bell_state(f, mb).amps; }, "mubs"_a,
          "m"_a = 0);
    m.def("collapsed_state", [](const mkp::MubFamily& f, int mb, int j) { return mkp::collapsed_state(f, mb, j).amps; },
          "mubs"_a, "m"_a, "j"_a);

    m.def("mapping_function", &mkp::mapping_function, "k"_a, "m"_a, "dim"_a);
    py::class_<mkp::VaaBasis>(m, "VaaBasis")
        .def_property_readonly("dim", &mkp::VaaBasis::dim)
        .def_property_readonly("states",
                               [](const mkp::VaaBasis& b) {
                                   std::vector<Eigen::MatrixXcd> out;
                                   for (const auto& s : b.states) out.push_back(s.amps);
                                   return out;
                               })
        .def_property_readonly("mapping", [](const mkp::VaaBasis& b) { return b.mapping.rows(); })
        .def("gram_deviation", &mkp::vaa_gram_deviation)
        .def("overlap_deviation", &mkp::vaa_overlap_check, "mubs"_a)
        .def("mols", [](const mkp::VaaBasis& b) { return mkp::mols_check(b.mapping); });
    m.def("build_vaa_basis", &mkp::build_vaa_basis, "mubs"_a);

    py::class_<mkp::SetupModel>(m, "SetupModel")
        .def_property_readonly("dim", &mkp::SetupModel::dim)
        .def_property_readonly("detectors", &mkp::SetupModel::detectors)
        .def_property_readonly("phase_count", &mkp::SetupModel::phase_count)
        .def("transfer_matrix",
             [](const mkp::SetupModel& s, std::vector<double> phases) {
                 return mkp::transfer_matrix(s, mkp::PhaseVector{std::move(phases)});
             },
             "phases"_a)
        .def("cyclic_variant", &mkp::cyclic_variant, "shift"_a)
        .def("to_json", [](const mkp::SetupModel& s) { return mkp::io::to_json(s).dump(); })
        .def_static("from_json", [](const std::string& text) {
            return mkp::io::setup_from_json(nlohmann::json::parse(text));
        });
    m.def("build_setup", &mkp::build_setup, "dim"_a);

    m.def(
        "simulate",
        [](const mkp::SetupModel& s, std::vector<double> phases, const Eigen::MatrixXcd& state) {
            const auto dist = mkp::simulate(s, mkp::PhaseVector{std::move(phases)}, as_state(state));
            py::dict out;
            for (int idx = 0; idx < static_cast<int>(dist.probs.size()); ++idx) {
                const auto p = mkp::pattern_at(idx, dist.detector_count);
                out[py::make_tuple(s.detectors()[p.first], s.detectors()[p.second])] = dist.probs[idx];
            }
            return out;
        },
        "setup"_a, "phases"_a, "state"_a, "Click-pattern probabilities keyed by detector pair.");

    py::class_<mkp::SuccessEvaluator>(m, "SuccessEvaluator")
        .def(py::init<const mkp::SetupModel&, const mkp::MubFamily&, const mkp::VaaBasis&>(), "setup"_a, "mubs"_a,
             "vaa"_a)
        .def(
            "evaluate",
            [](mkp::SuccessEvaluator& e, std::vector<double> phases, const std::string& strategy, bool post_select) {
                return report_dict(e.evaluate(mkp::PhaseVector{std::move(phases)}, as_options(strategy, post_select)));
            },
            "phases"_a, "strategy"_a = "vaa-map", "post_select"_a = false)
        .def(
            "likelihoods",
            [](mkp::SuccessEvaluator& e, std::vector<double> phases) {
                return e.likelihoods(mkp::PhaseVector{std::move(phases)}).entries;
            },
            "phases"_a, "P(pattern | phi_k) over decodable patterns, one row per VAA state.");

    m.def(
        "optimize",
        [](const mkp::SetupModel& setup, const std::string& objective, int restarts, std::uint64_t seed,
           const std::string& strategy, bool post_select, std::vector<int> subset, int threads) {
            const mkp::MubFamily mubs(setup.dim());
            const mkp::VaaBasis vaa = mkp::build_vaa_basis(mubs);
            mkp::ObjectiveSpec spec{mkp::objective_from_string(objective), as_options(strategy, post_select),
                                    std::move(subset)};
            mkp::TunerOptions options;
            options.restarts = restarts;
            options.seed = seed;
            options.threads = threads;
            mkp::OptimizationRun run;
            {
                py::gil_scoped_release release;
                run = mkp::optimize(setup, vaa, mubs, spec, options);
            }
            mkp::SuccessEvaluator evaluator(setup, mubs, vaa);
            py::dict out = report_dict(evaluator.evaluate(run.best_phases, spec.decode));
            out["phases"] = run.best_phases.angles;
            out["best_loss"] = run.best_loss;
            out["history"] = run.history;
            return out;
        },
        "setup"_a, "objective"_a = "p_v", "restarts"_a = 500, "seed"_a = 0, "strategy"_a = "vaa-map",
        "post_select"_a = false, "subset"_a = std::vector<int>{}, "threads"_a = 0);
}
