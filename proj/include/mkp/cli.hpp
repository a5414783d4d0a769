#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mkp/inference.hpp"

namespace mkp::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

struct RunConfig {
    std::optional<int> dim;
    /// Empty selects the built-in topology.
    std::string setup_path;
    int restarts = 500;
    std::uint64_t seed = 0;
    std::optional<Strategy> strategy;
    bool post_select = false;
    std::string objective = "p_v";
    std::vector<int> subset;
    std::string out;
    std::string format = "csv";
    bool percent = false;
    std::string phases_path;
    std::string values_path;
    std::string state = "bell";
    int threads = 0;
};

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_optimize(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_report(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_export_vaa(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv-style arguments (without the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mkp::cli
