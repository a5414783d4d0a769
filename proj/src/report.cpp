#include "mkp/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mkp/error.hpp"

namespace mkp {

TableSummary summarize(int dim, std::vector<double> p_m) {
    if (p_m.empty()) throw Error(ErrorCode::EmptySubset, "no success probabilities to summarize");
    TableSummary out;
    out.dim = dim;
    std::vector<int> all(p_m.size());
    for (std::size_t m = 0; m < p_m.size(); ++m) all[m] = static_cast<int>(m);
    out.average = subset_average(p_m, all);
    if (p_m.size() >= 2) out.best_pair = best_pair(p_m);
    out.p_m = std::move(p_m);
    return out;
}

std::string format_probability(double value, bool percent) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", percent ? value * 100.0 : value);
    return buf;
}

std::string format_csv(const std::vector<TableSummary>& tables, bool percent) {
    std::ostringstream out;
    out << "D,m,p_M\n";
    for (const auto& t : tables) {
        for (std::size_t m = 0; m < t.p_m.size(); ++m) {
            out << t.dim << ',' << m << ',' << format_probability(t.p_m[m], percent) << '\n';
        }
        out << t.dim << ",average," << format_probability(t.average, percent) << '\n';
        if (t.best_pair.bases.size() == 2) {
            out << t.dim << ",best2:" << t.best_pair.bases[0] << '+' << t.best_pair.bases[1] << ','
                << format_probability(t.best_pair.average, percent) << '\n';
        }
    }
    return out.str();
}

std::vector<TableSummary> read_values_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::SchemaError, "cannot open " + path.string());
    std::map<int, std::map<int, double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.rfind("D,", 0) == 0) continue;
        std::istringstream fields(line);
        std::string d, m, p;
        if (!std::getline(fields, d, ',') || !std::getline(fields, m, ',') || !std::getline(fields, p, ',')) {
            throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(line_no) + ": expected D,m,p_M");
        }
        try {
            rows[std::stoi(d)][std::stoi(m)] = std::stod(p);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(line_no) + ": not numeric");
        }
    }
    if (rows.empty()) throw Error(ErrorCode::SchemaError, path.string() + " has no rows");
    std::vector<TableSummary> out;
    for (auto& [dim, by_m] : rows) {
        std::vector<double> p_m;
        for (auto& [m, v] : by_m) {
            if (m != static_cast<int>(p_m.size())) {
                throw Error(ErrorCode::SchemaError, "bases of D=" + std::to_string(dim) + " are not contiguous from 0");
            }
            p_m.push_back(v);
        }
        out.push_back(summarize(dim, std::move(p_m)));
    }
    return out;
}

}  // namespace mkp
