#include "mkp/io.hpp"

#include <fstream>
#include <sstream>

#include "mkp/error.hpp"

namespace mkp::io {

namespace {

json complex_pair(Complex z) { return json::array({z.real(), z.imag()}); }

Complex pair_to_complex(const json& v) {
    if (!v.is_array() || v.size() != 2) throw Error(ErrorCode::SchemaError, "amplitude must be a [re, im] pair");
    return {v.at(0).get<double>(), v.at(1).get<double>()};
}

std::string input_label(const InputRow& row) {
    return (row.photon == Photon::A ? "a" : "b") + std::to_string(row.mode);
}

template <typename F>
auto with_schema(const std::string& what, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaError, what + ": " + e.what());
    }
}

}  // namespace

json to_json(const Ket& ket) {
    json out = json::array();
    for (int k = 0; k < ket.dim(); ++k) out.push_back(complex_pair(ket.amps(k)));
    return out;
}

json to_json(const TwoPhotonState& state) {
    json out = json::array();
    for (int p = 0; p < state.dim(); ++p) {
        json row = json::array();
        for (int q = 0; q < state.dim(); ++q) row.push_back(complex_pair(state.amps(p, q)));
        out.push_back(std::move(row));
    }
    return out;
}

TwoPhotonState state_from_json(const json& value) {
    return with_schema("state", [&] {
        const int dim = static_cast<int>(value.size());
        if (!value.is_array() || dim == 0) throw Error(ErrorCode::SchemaError, "state must be a non-empty matrix");
        TwoPhotonState state{Eigen::MatrixXcd(dim, dim)};
        for (int p = 0; p < dim; ++p) {
            if (value.at(p).size() != static_cast<std::size_t>(dim)) {
                throw Error(ErrorCode::SchemaError, "state matrix must be square");
            }
            for (int q = 0; q < dim; ++q) state.amps(p, q) = pair_to_complex(value.at(p).at(q));
        }
        return state;
    });
}

json to_json(const SetupModel& setup) {
    json rows = json::array();
    for (const auto& row : setup.rows()) {
        json entries = json::array();
        for (const auto& e : row.entries) {
            entries.push_back({{"det", setup.detectors()[e.detector]},
                               {"re", e.coefficient.real()},
                               {"im", e.coefficient.imag()}});
        }
        rows.push_back({{"input", input_label(row)}, {"phase_slot", row.phase_slot}, {"entries", std::move(entries)}});
    }
    return {{"dim", setup.dim()}, {"detectors", setup.detectors()}, {"rows", std::move(rows)}};
}

SetupModel setup_from_json(const json& value) {
    return with_schema("setup", [&] {
        const int dim = value.at("dim").get<int>();
        require_odd_prime(dim);
        auto detectors = value.at("detectors").get<std::vector<std::string>>();
        std::map<std::string, int> index;
        for (int i = 0; i < static_cast<int>(detectors.size()); ++i) {
            if (!index.emplace(detectors[i], i).second) {
                throw Error(ErrorCode::SchemaError, "duplicate detector '" + detectors[i] + "'");
            }
        }
        std::vector<InputRow> rows;
        for (const auto& r : value.at("rows")) {
            const auto label = r.at("input").get<std::string>();
            if (label.size() < 2 || (label[0] != 'a' && label[0] != 'b')) {
                throw Error(ErrorCode::SchemaError, "bad input label '" + label + "'");
            }
            InputRow row;
            row.photon = label[0] == 'a' ? Photon::A : Photon::B;
            try {
                std::size_t used = 0;
                row.mode = std::stoi(label.substr(1), &used);
                if (used != label.size() - 1) throw std::invalid_argument(label);
            } catch (const std::logic_error&) {
                throw Error(ErrorCode::SchemaError, "bad input label '" + label + "'");
            }
            row.phase_slot = r.at("phase_slot").get<int>();
            for (const auto& e : r.at("entries")) {
                const auto name = e.at("det").get<std::string>();
                const auto it = index.find(name);
                if (it == index.end()) throw Error(ErrorCode::SchemaError, "unknown detector '" + name + "'");
                row.entries.push_back({it->second, {e.at("re").get<double>(), e.at("im").get<double>()}});
            }
            rows.push_back(std::move(row));
        }
        return SetupModel(dim, std::move(detectors), std::move(rows));
    });
}

SetupModel load_setup(const std::filesystem::path& path) { return setup_from_json(read_json(path)); }

json to_json(const VaaBasis& basis) {
    const int dim = basis.dim();
    json states = json::array();
    for (int k = 0; k < basis.mapping.state_count(); ++k) {
        states.push_back({{"k", k},
                          {"i", basis.mapping.row_index(k)},
                          {"j", basis.mapping.column_index(k)},
                          {"mapping", basis.mapping.rows()[k]},
                          {"amplitudes", to_json(basis.states[k])}});
    }
    return {{"dim", dim}, {"states", std::move(states)}};
}

json to_json(const ClickDistribution& dist, const SetupModel& setup) {
    json patterns = json::array();
    for (int idx = 0; idx < static_cast<int>(dist.probs.size()); ++idx) {
        const ClickPattern p = pattern_at(idx, dist.detector_count);
        patterns.push_back({{"detectors", {setup.detectors()[p.first], setup.detectors()[p.second]}},
                            {"decodable", p.decodable()},
                            {"probability", dist.probs[idx]}});
    }
    return {{"dim", setup.dim()}, {"patterns", std::move(patterns)}};
}

json to_json(const LikelihoodTable& table, const DecodeRule& rule, const SetupModel& setup) {
    json patterns = json::array();
    for (int i = 0; i < table.pattern_count(); ++i) {
        const ClickPattern p = table.patterns[i];
        std::vector<double> likelihood(table.state_count());
        std::vector<double> posterior(table.state_count());
        for (int k = 0; k < table.state_count(); ++k) {
            likelihood[k] = table.entries(k, i);
            posterior[k] = rule.posterior(k, i);
        }
        json entry{{"detectors", {setup.detectors()[p.first], setup.detectors()[p.second]}},
                   {"likelihood", likelihood},
                   {"posterior", posterior}};
        entry["map_state"] = rule.reachable(i) ? json(rule.assignment[i]) : json(nullptr);
        patterns.push_back(std::move(entry));
    }
    return {{"patterns", std::move(patterns)}, {"leakage", table.leakage}};
}

json to_json(const PhaseFile& file) {
    json p_m = json::object();
    for (const auto& [m, v] : file.p_m) p_m[std::to_string(m)] = v;
    return {{"dim", file.dim},           {"objective", file.objective},     {"seed", file.seed},
            {"phases", file.phases},     {"p_v", file.p_v},                 {"p_m", std::move(p_m)},
            {"strategy", file.strategy}, {"post_select", file.post_select}, {"restarts", file.restarts}};
}

PhaseFile phase_file_from_json(const json& value) {
    return with_schema("phase file", [&] {
        if (!value.is_object()) throw Error(ErrorCode::SchemaError, "phase file must be a JSON object");
        PhaseFile file;
        file.dim = value.at("dim").get<int>();
        file.phases = value.at("phases").get<std::vector<double>>();
        file.objective = value.value("objective", std::string{"p_v"});
        file.seed = value.value("seed", std::uint64_t{0});
        file.p_v = value.value("p_v", 0.0);
        if (value.contains("p_m")) {
            for (const auto& [key, v] : value.at("p_m").items()) file.p_m[std::stoi(key)] = v.get<double>();
        }
        file.strategy = value.value("strategy", std::string{"vaa-map"});
        file.post_select = value.value("post_select", false);
        file.restarts = value.value("restarts", 0);
        return file;
    });
}

PhaseFile load_phase_file(const std::filesystem::path& path) { return phase_file_from_json(read_json(path)); }

std::string to_string(Strategy strategy) {
    return strategy == Strategy::VaaMap ? "vaa-map" : "basis-conditioned";
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "vaa-map") return Strategy::VaaMap;
    if (name == "basis-conditioned") return Strategy::BasisConditioned;
    throw Error(ErrorCode::SchemaError, "unknown strategy '" + name + "'");
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::SchemaError, "cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (buffer.str().find_first_not_of(" \t\r\n") == std::string::npos) {
        throw Error(ErrorCode::SchemaError, path.string() + " is empty");
    }
    try {
        return json::parse(buffer.str());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::SchemaError, "cannot write " + path.string());
    out << text;
}

}  // namespace mkp::io
