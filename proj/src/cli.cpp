#include "mkp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "mkp/error.hpp"
#include "mkp/io.hpp"
#include "mkp/optics.hpp"
#include "mkp/report.hpp"
#include "mkp/tuner.hpp"
#include "mkp/vaa.hpp"

namespace mkp::cli {

namespace {

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConstructionInconsistent:
        case ErrorCode::DegenerateOutput:
        case ErrorCode::NonFiniteLoss:
            return kFailure;
        default:
            return kUsage;
    }
}

SetupModel resolve_setup(const RunConfig& config) {
    if (config.setup_path.empty()) {
        if (!config.dim) throw Error(ErrorCode::SchemaError, "--dim or --setup is required");
        return build_setup(*config.dim);
    }
    SetupModel setup = io::load_setup(config.setup_path);
    if (config.dim && *config.dim != setup.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "--dim " + std::to_string(*config.dim) + " but setup has dim " +
                                                      std::to_string(setup.dim()));
    }
    return setup;
}

DecodeOptions decode_options(const RunConfig& config, Strategy fallback = Strategy::VaaMap) {
    return {config.strategy.value_or(fallback), config.post_select};
}

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
    if (config.out.empty()) {
        out << text;
    } else {
        io::write_text(config.out, text);
    }
}

struct SuiteResult {
    std::string name;
    double deviation;
    double tolerance;

    bool passed() const { return deviation <= tolerance; }
};

std::vector<int> parse_indices(const std::string& spec, char sep) {
    std::vector<int> out;
    std::stringstream in(spec);
    std::string item;
    while (std::getline(in, item, sep)) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::SchemaError, "bad index '" + item + "' in '" + spec + "'");
        }
    }
    return out;
}

TwoPhotonState parse_state(const std::string& spec, const MubFamily& mubs, const VaaBasis& vaa) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::vector<int> args = colon == std::string::npos ? std::vector<int>{} : parse_indices(spec.substr(colon + 1), ':');
    if (kind == "bell" && args.empty()) return bell_state(mubs, 0);
    if (kind == "vaa" && args.size() == 1) {
        if (args[0] < 0 || args[0] >= static_cast<int>(vaa.states.size())) {
            throw Error(ErrorCode::IndexOutOfRange, "VAA index out of range");
        }
        return vaa.states[args[0]];
    }
    if (kind == "collapsed" && args.size() == 2) return collapsed_state(mubs, args[0], args[1]);
    if (kind == "modes" && args.size() == 2) return basis_state(mubs.dim(), args[0], args[1]);
    throw Error(ErrorCode::SchemaError, "unknown state '" + spec + "' (bell | vaa:K | collapsed:M:J | modes:P:Q)");
}

PhaseVector load_phases(const RunConfig& config, const SetupModel& setup, io::PhaseFile* file_out = nullptr) {
    if (config.phases_path.empty()) return PhaseVector::zeros(setup);
    io::PhaseFile file = io::load_phase_file(config.phases_path);
    if (file.dim != setup.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "phase file has dim " + std::to_string(file.dim) +
                                                      ", setup has dim " + std::to_string(setup.dim()));
    }
    if (static_cast<int>(file.phases.size()) != setup.phase_count()) {
        throw Error(ErrorCode::PhaseCountMismatch, "phase file holds " + std::to_string(file.phases.size()) +
                                                       " phases, setup needs " + std::to_string(setup.phase_count()));
    }
    PhaseVector phases{file.phases};
    if (file_out) *file_out = std::move(file);
    return phases;
}

std::vector<SuiteResult> run_suites(const SetupModel& setup, std::uint64_t seed) {
    const int dim = setup.dim();
    std::vector<SuiteResult> out;
    const MubFamily mubs = build_mub(dim);
    out.push_back({"mub_orthonormality", mub_orthonormality_deviation(mubs), kStateTolerance});
    out.push_back({"mub_unbiasedness", mub_unbiasedness_deviation(mubs), kStateTolerance});

    const TwoPhotonState bell = bell_state(mubs, 0);
    double bell_dev = 0.0;
    double overlap_dev = 0.0;
    const double root = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int m = 0; m <= dim; ++m) {
        bell_dev = std::max(bell_dev, (bell_state(mubs, m).amps - bell.amps).cwiseAbs().maxCoeff());
        for (int j = 0; j < dim; ++j) {
            overlap_dev = std::max(overlap_dev, std::abs(inner(bell, collapsed_state(mubs, m, j)) - root));
        }
    }
    out.push_back({"bell_mub_independence", bell_dev, kStateTolerance});
    out.push_back({"bell_collapsed_overlap", overlap_dev, kStateTolerance});

    const VaaBasis vaa = build_vaa_basis(mubs);
    out.push_back({"vaa_gram", vaa_gram_deviation(vaa), kVaaTolerance});
    out.push_back({"vaa_overlap", vaa_overlap_check(vaa, mubs), kVaaTolerance});
    out.push_back({"vaa_completeness", vaa_completeness_deviation(vaa), kVaaTolerance});
    out.push_back({"mols_bijection", mols_check(vaa.mapping) ? 0.0 : 1.0, 0.0});
    double subset_dev = 0.0;
    for (int m = 0; m <= dim; ++m) {
        for (int j = 0; j < dim; ++j) {
            subset_dev = std::max(subset_dev, std::abs(static_cast<double>(vaa.mapping.retrodiction_subset(m, j).size()) - dim));
        }
    }
    out.push_back({"retrodiction_subset_size", subset_dev, 0.0});

    double unit_dev = 0.0;
    for (const auto& row : setup.rows()) {
        for (const auto& e : row.entries) unit_dev = std::max(unit_dev, std::abs(std::abs(e.coefficient) - 1.0));
    }
    out.push_back({"setup_unit_couplings", unit_dev, kStateTolerance});

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    PhaseVector phases = PhaseVector::zeros(setup);
    for (auto& a : phases.angles) a = angle(rng);
    double norm_dev = 0.0;
    double support_dev = 0.0;
    double shift_dev = 0.0;
    const SetupModel shifted = cyclic_variant(setup, 1 % dim);
    for (const auto& state : vaa.states) {
        const ClickDistribution dist = simulate(setup, phases, state);
        double total = 0.0;
        for (double p : dist.probs) total += p;
        norm_dev = std::max(norm_dev, std::abs(total - 1.0));
        const auto support = matching_support(setup, state);
        for (std::size_t i = 0; i < dist.probs.size(); ++i) {
            if (!support[i]) support_dev = std::max(support_dev, dist.probs[i]);
        }
        const ClickDistribution moved = simulate(shifted, phases, shift_modes(state, 1));
        for (std::size_t i = 0; i < dist.probs.size(); ++i) {
            shift_dev = std::max(shift_dev, std::abs(moved.probs[i] - dist.probs[i]));
        }
    }
    out.push_back({"simulate_normalization", norm_dev, 1e-9});
    out.push_back({"matching_support", support_dev, 0.0});
    out.push_back({"cyclic_equivariance", shift_dev, kStateTolerance});
    return out;
}

std::string probability_table(const std::vector<double>& p_m, bool percent) {
    std::ostringstream out;
    out << "m,p_M\n";
    for (std::size_t m = 0; m < p_m.size(); ++m) out << m << ',' << format_probability(p_m[m], percent) << '\n';
    return out.str();
}

}  // namespace

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const SetupModel setup = resolve_setup(config);
    const auto suites = run_suites(setup, config.seed);
    out << "suite,max_deviation,tolerance,status\n";
    int failures = 0;
    for (const auto& s : suites) {
        char dev[32];
        std::snprintf(dev, sizeof dev, "%.3e", s.deviation);
        char tol[32];
        std::snprintf(tol, sizeof tol, "%.0e", s.tolerance);
        out << s.name << ',' << dev << ',' << tol << ',' << (s.passed() ? "pass" : "FAIL") << '\n';
        if (!s.passed()) {
            err << "invariant failed: " << s.name << '\n';
            ++failures;
        }
    }
    return failures == 0 ? kSuccess : kFailure;
}

int cmd_optimize(const RunConfig& config, std::ostream& out, std::ostream& err) {
    if (config.restarts < 1) throw Error(ErrorCode::SchemaError, "--restarts must be at least 1");
    const SetupModel setup = resolve_setup(config);
    const MubFamily mubs = build_mub(setup.dim());
    const VaaBasis vaa = build_vaa_basis(mubs);

    ObjectiveSpec objective;
    objective.kind = objective_from_string(config.objective);
    objective.decode = decode_options(config);
    objective.subset = config.subset;
    TunerOptions options;
    options.restarts = config.restarts;
    options.seed = config.seed;
    options.threads = config.threads;

    const OptimizationRun run = optimize(setup, vaa, mubs, objective, options);
    SuccessEvaluator evaluator(setup, mubs, vaa);
    const SuccessReport report = evaluator.evaluate(run.best_phases, objective.decode);

    io::PhaseFile file;
    file.dim = setup.dim();
    file.objective = to_string(objective.kind);
    file.seed = config.seed;
    file.phases = run.best_phases.angles;
    file.p_v = report.p_v;
    for (int m = 0; m <= setup.dim(); ++m) file.p_m[m] = report.p_m[m];
    file.strategy = io::to_string(objective.decode.strategy);
    file.post_select = objective.decode.post_select;
    file.restarts = config.restarts;
    const std::string json = io::to_json(file).dump(2) + "\n";

    std::ostream& summary = config.out.empty() ? err : out;
    if (config.out.empty()) {
        out << json;
    } else {
        io::write_text(config.out, json);
    }
    summary << "p_V," << format_probability(report.p_v, config.percent) << '\n'
            << probability_table(report.p_m, config.percent)
            << "average," << format_probability(report.average_p_m(), config.percent) << '\n';
    return kSuccess;
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream&) {
    const SetupModel setup = resolve_setup(config);
    const MubFamily mubs = build_mub(setup.dim());
    const VaaBasis vaa = build_vaa_basis(mubs);
    const PhaseVector phases = load_phases(config, setup);
    const TwoPhotonState state = parse_state(config.state, mubs, vaa);
    const ClickDistribution dist = simulate(setup, phases, state);
    if (config.format == "json") {
        emit(config, io::to_json(dist, setup).dump(2) + "\n", out);
        return kSuccess;
    }
    std::ostringstream csv;
    csv << "detector_1,detector_2,decodable,probability\n";
    for (int idx = 0; idx < static_cast<int>(dist.probs.size()); ++idx) {
        const ClickPattern p = pattern_at(idx, dist.detector_count);
        csv << setup.detectors()[p.first] << ',' << setup.detectors()[p.second] << ','
            << (p.decodable() ? 1 : 0) << ',' << format_probability(dist.probs[idx], config.percent) << '\n';
    }
    emit(config, csv.str(), out);
    return kSuccess;
}

int cmd_report(const RunConfig& config, std::ostream& out, std::ostream&) {
    if (!config.values_path.empty()) {
        const auto tables = read_values_csv(config.values_path);
        std::vector<TableSummary> selected;
        for (const auto& t : tables) {
            if (!config.dim || t.dim == *config.dim) selected.push_back(t);
        }
        if (selected.empty()) throw Error(ErrorCode::DimensionMismatch, "values file has no rows for the requested dim");
        emit(config, format_csv(selected, config.percent), out);
        return kSuccess;
    }
    if (config.phases_path.empty()) throw Error(ErrorCode::SchemaError, "report needs --phases or --values");
    io::PhaseFile file = io::load_phase_file(config.phases_path);
    RunConfig resolved = config;
    if (!resolved.dim && resolved.setup_path.empty()) resolved.dim = file.dim;
    const SetupModel setup = resolve_setup(resolved);
    const PhaseVector phases = load_phases(resolved, setup);
    const MubFamily mubs = build_mub(setup.dim());
    const VaaBasis vaa = build_vaa_basis(mubs);
    DecodeOptions options{config.strategy.value_or(io::strategy_from_string(file.strategy)),
                         config.post_select || file.post_select};
    SuccessEvaluator evaluator(setup, mubs, vaa);
    const SuccessReport report = evaluator.evaluate(phases, options);

    if (config.format == "json") {
        const LikelihoodTable table = evaluator.likelihoods(phases);
        const TableSummary summary = summarize(setup.dim(), report.p_m);
        io::json doc{{"dim", setup.dim()},
                     {"strategy", io::to_string(options.strategy)},
                     {"post_select", options.post_select},
                     {"p_v", report.p_v},
                     {"p_m", report.p_m},
                     {"average", summary.average},
                     {"best_pair", {{"bases", summary.best_pair.bases}, {"average", summary.best_pair.average}}},
                     {"decoding", io::to_json(table, decode(table), setup)}};
        emit(config, doc.dump(2) + "\n", out);
        return kSuccess;
    }
    emit(config, format_csv({summarize(setup.dim(), report.p_m)}, config.percent), out);
    return kSuccess;
}

int cmd_export_vaa(const RunConfig& config, std::ostream& out, std::ostream&) {
    if (!config.dim) throw Error(ErrorCode::SchemaError, "--dim is required");
    const MubFamily mubs = build_mub(*config.dim);
    const VaaBasis vaa = build_vaa_basis(mubs);
    io::json doc = io::to_json(vaa);
    doc["mols"] = mols_check(vaa.mapping);
    emit(config, doc.dump(2) + "\n", out);
    return kSuccess;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mean King's Problem optics simulator and phase optimizer", "mkp"};
    app.require_subcommand(1);
    RunConfig config;
    std::string strategy;
    std::string subset;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--dim", config.dim, "Odd prime dimension D");
        sub->add_option("--setup", config.setup_path, "Setup topology JSON (default: built-in template)");
        sub->add_option("--seed", config.seed, "Random seed");
        sub->add_option("--strategy", strategy, "vaa-map | basis-conditioned");
        sub->add_flag("--post-select", config.post_select, "Condition success on a two-detector coincidence");
        sub->add_option("--out", config.out, "Output file (default: stdout)");
        sub->add_option("--format", config.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--percent", config.percent, "Print probabilities as percentages");
    };
    auto* verify = app.add_subcommand("verify", "Run the analytic and simulator invariant suites");
    auto* opt = app.add_subcommand("optimize", "Tune phase shifters with multi-start BFGS");
    auto* sim = app.add_subcommand("simulate", "Click-pattern distribution of one input state");
    auto* report = app.add_subcommand("report", "Per-basis success table with average and best pair");
    auto* vaa = app.add_subcommand("export-vaa", "Dump the VAA basis and mapping table as JSON");
    for (auto* sub : {verify, opt, sim, report, vaa}) common(sub);
    opt->add_option("--restarts", config.restarts, "Random restarts");
    opt->add_option("--objective", config.objective, "p_v | p_m_average | p_m_subset");
    opt->add_option("--subset", subset, "Comma-separated bases for p_m_subset");
    opt->add_option("--threads", config.threads, "Worker threads (default: MKP_THREADS or all cores)");
    sim->add_option("--phases", config.phases_path, "Phase file (default: all zeros)");
    sim->add_option("--state", config.state, "bell | vaa:K | collapsed:M:J | modes:P:Q");
    report->add_option("--phases", config.phases_path, "Phase file written by optimize");
    report->add_option("--values", config.values_path, "CSV of D,m,p_M values to aggregate instead");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "mkp: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (!strategy.empty()) config.strategy = io::strategy_from_string(strategy);
        if (!subset.empty()) config.subset = parse_indices(subset, ',');
        if (*verify) return cmd_verify(config, out, err);
        if (*opt) return cmd_optimize(config, out, err);
        if (*sim) return cmd_simulate(config, out, err);
        if (*report) return cmd_report(config, out, err);
        return cmd_export_vaa(config, out, err);
    } catch (const Error& e) {
        err << "mkp: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "mkp: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace mkp::cli
