#include "mkp/inference.hpp"

#include <cmath>
#include <string>

#include "mkp/error.hpp"

namespace mkp {

namespace {

// Column mass at or below this is treated as a pattern no state can trigger.
constexpr double kUnreachableMass = 1e-14;

void check_basis(int m, int dim) {
    if (m < 0 || m > dim) {
        throw Error(ErrorCode::IndexOutOfRange, "basis index " + std::to_string(m) + " outside [0, D]");
    }
}

}  // namespace

LikelihoodTable LikelihoodTable::from_entries(Eigen::MatrixXd entries, std::vector<double> leakage) {
    if (static_cast<Eigen::Index>(leakage.size()) != entries.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "leakage needs one entry per state");
    }
    LikelihoodTable table;
    for (int i = 0; i < entries.cols(); ++i) table.patterns.push_back({i, i + 1});
    table.entries = std::move(entries);
    table.leakage = std::move(leakage);
    return table;
}

double likelihood_row_deviation(const LikelihoodTable& table) {
    double worst = 0.0;
    for (int n = 0; n < table.state_count(); ++n) {
        worst = std::max(worst, std::abs(table.entries.row(n).sum() + table.leakage[n] - 1.0));
    }
    return worst;
}

LikelihoodTable likelihoods(const SetupModel& setup, const PhaseVector& phases, const VaaBasis& vaa) {
    if (vaa.dim() != setup.dim()) throw Error(ErrorCode::DimensionMismatch, "VAA basis and setup dimensions differ");
    const ModeExpansion expansion(setup);
    const auto mono = expansion.monomial_phases(phases);
    LikelihoodTable table;
    table.detector_count = setup.detector_count();
    std::vector<int> decodable;
    for (int idx = 0; idx < expansion.pattern_count(); ++idx) {
        const ClickPattern pattern = pattern_at(idx, setup.detector_count());
        if (pattern.decodable()) {
            decodable.push_back(idx);
            table.patterns.push_back(pattern);
        }
    }
    const int n = static_cast<int>(vaa.states.size());
    table.entries.resize(n, static_cast<Eigen::Index>(decodable.size()));
    table.leakage.assign(n, 0.0);
    std::vector<double> probs(expansion.pattern_count());
    for (int k = 0; k < n; ++k) {
        expansion.probabilities(vaa.states[k], mono, probs);
        double decodable_mass = 0.0;
        for (std::size_t i = 0; i < decodable.size(); ++i) {
            table.entries(k, static_cast<Eigen::Index>(i)) = probs[decodable[i]];
            decodable_mass += probs[decodable[i]];
        }
        table.leakage[k] = std::max(0.0, 1.0 - decodable_mass);
    }
    return table;
}

DecodeRule decode(const LikelihoodTable& table) {
    DecodeRule rule;
    const int states = table.state_count();
    const int patterns = table.pattern_count();
    rule.assignment.assign(patterns, DecodeRule::kUnreachable);
    rule.posterior = Eigen::MatrixXd::Zero(states, patterns);
    for (int i = 0; i < patterns; ++i) {
        const auto column = table.entries.col(i);
        const double total = column.sum();
        if (!(total > kUnreachableMass)) continue;
        int best = 0;
        for (int k = 0; k < states; ++k) {
            rule.posterior(k, i) = column(k) / total;
            if (column(k) > column(best)) best = k;
        }
        rule.assignment[i] = best;
    }
    return rule;
}

double success_v(const LikelihoodTable& table, const DecodeRule& rule, bool post_select) {
    // P(d_i) * max_k P(phi_k | d_i) collapses to max_k P(d_i | phi_k) / N.
    double hit = 0.0;
    double total = 0.0;
    for (int i = 0; i < table.pattern_count(); ++i) {
        total += table.entries.col(i).sum();
        if (rule.reachable(i)) hit += table.entries(rule.assignment[i], i);
    }
    if (post_select) return total > 0.0 ? hit / total : 0.0;
    return hit / table.state_count();
}

double success_m(const SetupModel& setup, const PhaseVector& phases, const MubFamily& mubs, const VaaBasis& vaa,
                 int m, const DecodeOptions& options) {
    check_basis(m, mubs.dim());
    SuccessEvaluator evaluator(setup, mubs, vaa);
    return evaluator.success_m(phases, m, options);
}

double subset_average(std::span<const double> p_m, std::span<const int> subset) {
    if (subset.empty()) throw Error(ErrorCode::EmptySubset, "basis subset is empty");
    double sum = 0.0;
    for (int m : subset) {
        if (m < 0 || m >= static_cast<int>(p_m.size())) {
            throw Error(ErrorCode::IndexOutOfRange, "basis index " + std::to_string(m) + " outside the table");
        }
        sum += p_m[m];
    }
    return sum / static_cast<double>(subset.size());
}

SubsetResult best_pair(std::span<const double> p_m) {
    if (p_m.size() < 2) throw Error(ErrorCode::EmptySubset, "need at least two bases for a pair");
    SubsetResult best{{0, 1}, (p_m[0] + p_m[1]) / 2.0};
    for (int a = 0; a < static_cast<int>(p_m.size()); ++a) {
        for (int b = a + 1; b < static_cast<int>(p_m.size()); ++b) {
            const double mean = (p_m[a] + p_m[b]) / 2.0;
            if (mean > best.average) best = {{a, b}, mean};
        }
    }
    return best;
}

double subset_report(const SetupModel& setup, const PhaseVector& phases, const MubFamily& mubs, const VaaBasis& vaa,
                     std::span<const int> subset, const DecodeOptions& options) {
    if (subset.empty()) throw Error(ErrorCode::EmptySubset, "basis subset is empty");
    SuccessEvaluator evaluator(setup, mubs, vaa);
    const SuccessReport report = evaluator.evaluate(phases, options);
    return subset_average(report.p_m, subset);
}

double SuccessReport::average_p_m() const {
    double sum = 0.0;
    for (double v : p_m) sum += v;
    return p_m.empty() ? 0.0 : sum / static_cast<double>(p_m.size());
}

SuccessEvaluator::SuccessEvaluator(const SetupModel& setup, const MubFamily& mubs, const VaaBasis& vaa)
    : dim_(setup.dim()), expansion_(setup), mapping_(vaa.mapping), vaa_states_(vaa.states) {
    if (mubs.dim() != dim_ || vaa.dim() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "setup, MUB family and VAA basis dimensions differ");
    }
    collapsed_.resize(dim_ + 1);
    for (int m = 0; m <= dim_; ++m) {
        for (int j = 0; j < dim_; ++j) collapsed_[m].push_back(collapsed_state(mubs, m, j));
    }
    for (int idx = 0; idx < expansion_.pattern_count(); ++idx) {
        const ClickPattern pattern = pattern_at(idx, expansion_.detector_count());
        if (pattern.decodable()) {
            decodable_.push_back(idx);
            patterns_.push_back(pattern);
        }
    }
    scratch_.resize(expansion_.pattern_count());
}

Eigen::MatrixXd SuccessEvaluator::decodable_rows(std::span<const TwoPhotonState> states,
                                                 std::span<const Complex> phases, std::vector<double>* leakage) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(states.size()), static_cast<Eigen::Index>(decodable_.size()));
    if (leakage) leakage->assign(states.size(), 0.0);
    for (std::size_t s = 0; s < states.size(); ++s) {
        expansion_.probabilities(states[s], phases, scratch_);
        double mass = 0.0;
        for (std::size_t i = 0; i < decodable_.size(); ++i) {
            const double p = scratch_[decodable_[i]];
            out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)) = p;
            mass += p;
        }
        if (leakage) (*leakage)[s] = std::max(0.0, 1.0 - mass);
    }
    return out;
}

LikelihoodTable SuccessEvaluator::likelihoods(const PhaseVector& phases) {
    const auto mono = expansion_.monomial_phases(phases);
    LikelihoodTable table;
    table.detector_count = expansion_.detector_count();
    table.patterns = patterns_;
    table.entries = decodable_rows(vaa_states_, mono, &table.leakage);
    return table;
}

Eigen::MatrixXd SuccessEvaluator::collapsed_likelihoods(const PhaseVector& phases, int m) {
    check_basis(m, dim_);
    const auto mono = expansion_.monomial_phases(phases);
    return decodable_rows(collapsed_[m], mono, nullptr);
}

double SuccessEvaluator::success_v(const PhaseVector& phases, bool post_select) {
    const LikelihoodTable table = likelihoods(phases);
    return mkp::success_v(table, decode(table), post_select);
}

double SuccessEvaluator::success_m_from(const Eigen::MatrixXd& collapsed, const DecodeRule& rule, int m,
                                        const DecodeOptions& options) const {
    double hit = 0.0;
    const int patterns = static_cast<int>(collapsed.cols());
    if (options.strategy == Strategy::VaaMap) {
        for (int i = 0; i < patterns; ++i) {
            if (!rule.reachable(i)) continue;
            const int guess = mapping_.at(rule.assignment[i], m);
            hit += collapsed(guess, i);
        }
    } else {
        for (int i = 0; i < patterns; ++i) hit += collapsed.col(i).maxCoeff();
    }
    if (options.post_select) {
        const double total = collapsed.sum();
        return total > 0.0 ? hit / total : 0.0;
    }
    return hit / dim_;
}

double SuccessEvaluator::success_m(const PhaseVector& phases, int m, const DecodeOptions& options) {
    check_basis(m, dim_);
    const Eigen::MatrixXd collapsed = collapsed_likelihoods(phases, m);
    DecodeRule rule;
    if (options.strategy == Strategy::VaaMap) rule = decode(likelihoods(phases));
    return success_m_from(collapsed, rule, m, options);
}

SuccessReport SuccessEvaluator::evaluate(const PhaseVector& phases, const DecodeOptions& options) {
    const auto mono = expansion_.monomial_phases(phases);
    LikelihoodTable table;
    table.detector_count = expansion_.detector_count();
    table.patterns = patterns_;
    table.entries = decodable_rows(vaa_states_, mono, &table.leakage);
    const DecodeRule rule = decode(table);

    SuccessReport report;
    report.p_v = mkp::success_v(table, rule, options.post_select);
    report.p_m.reserve(dim_ + 1);
    for (int m = 0; m <= dim_; ++m) {
        const Eigen::MatrixXd collapsed = decodable_rows(collapsed_[m], mono, nullptr);
        report.p_m.push_back(success_m_from(collapsed, rule, m, options));
    }
    return report;
}

}  // namespace mkp
