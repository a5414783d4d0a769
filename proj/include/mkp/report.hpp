#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mkp/inference.hpp"

namespace mkp {

/// One dimension's row of success probabilities with its aggregates.
struct TableSummary {
    int dim = 0;
    std::vector<double> p_m;
    double average = 0.0;
    SubsetResult best_pair;
};

TableSummary summarize(int dim, std::vector<double> p_m);

/// %.6g formatting, optionally scaled to percent.
std::string format_probability(double value, bool percent);

/// Rows "D,m,p_M" per basis, then "D,average,..." and "D,best2:a+b,...".
std::string format_csv(const std::vector<TableSummary>& tables, bool percent);

/// Reads a D,m,p_M table (fractions) into one summary per dimension.
std::vector<TableSummary> read_values_csv(const std::filesystem::path& path);

}  // namespace mkp
