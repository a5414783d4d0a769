#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "mkp/inference.hpp"
#include "mkp/tuner.hpp"

namespace mkp::io {

using nlohmann::json;

/// Amplitudes as nested arrays of [re, im] pairs.
json to_json(const Ket& ket);
json to_json(const TwoPhotonState& state);
TwoPhotonState state_from_json(const json& value);

/// { "dim", "detectors", "rows": [ { "input": "a3", "phase_slot", "entries": [ { "det", "re", "im" } ] } ] }
json to_json(const SetupModel& setup);
SetupModel setup_from_json(const json& value);
SetupModel load_setup(const std::filesystem::path& path);

json to_json(const VaaBasis& basis);

json to_json(const ClickDistribution& dist, const SetupModel& setup);

/// Full per-pattern likelihoods, posteriors and MAP assignment.
json to_json(const LikelihoodTable& table, const DecodeRule& rule, const SetupModel& setup);

/// Persisted result of an optimization run.
struct PhaseFile {
    int dim = 0;
    std::string objective;
    std::uint64_t seed = 0;
    std::vector<double> phases;
    double p_v = 0.0;
    std::map<int, double> p_m;
    // Extensions beyond the core record.
    std::string strategy = "vaa-map";
    bool post_select = false;
    int restarts = 0;
};

json to_json(const PhaseFile& file);
PhaseFile phase_file_from_json(const json& value);
PhaseFile load_phase_file(const std::filesystem::path& path);

std::string to_string(Strategy strategy);
Strategy strategy_from_string(const std::string& name);

json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mkp::io
