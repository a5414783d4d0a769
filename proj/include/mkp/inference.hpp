#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mkp/optics.hpp"
#include "mkp/vaa.hpp"

namespace mkp {

/// How Alice turns a click pattern into a guess once the basis is revealed.
enum class Strategy {
    /// Decode the pattern to the MAP VAA state, then answer f_k(m).
    VaaMap,
    /// Decode the pattern directly to argmax_j P(pattern | m_j) for the revealed basis.
    BasisConditioned,
};

struct DecodeOptions {
    Strategy strategy = Strategy::VaaMap;
    /// Condition the success metrics on a two-detector coincidence instead of
    /// counting every other outcome as a failure.
    bool post_select = false;
};

/// P(d_i | phi_n) over the decodable (two distinct detector) patterns.
struct LikelihoodTable {
    int detector_count = 0;
    std::vector<ClickPattern> patterns;
    /// Row n = VAA state, column i = decodable pattern.
    Eigen::MatrixXd entries;
    /// Mass of state n on same-detector doubles.
    std::vector<double> leakage;

    int state_count() const { return static_cast<int>(entries.rows()); }
    int pattern_count() const { return static_cast<int>(entries.cols()); }

    /// Builds a table from raw likelihoods (synthetic tables, tests). Patterns
    /// are labeled by column only.
    static LikelihoodTable from_entries(Eigen::MatrixXd entries, std::vector<double> leakage);
};

/// Largest |decodable + leakage - 1| over the rows.
double likelihood_row_deviation(const LikelihoodTable& table);

struct DecodeRule {
    static constexpr int kUnreachable = -1;

    /// MAP VAA index per pattern, or kUnreachable when no state fires it.
    std::vector<int> assignment;
    /// P(phi_k | d_i), row k, column i. Zero columns for unreachable patterns.
    Eigen::MatrixXd posterior;

    bool reachable(int pattern) const { return assignment[pattern] != kUnreachable; }
};

LikelihoodTable likelihoods(const SetupModel& setup, const PhaseVector& phases, const VaaBasis& vaa);

/// Bayes posterior under a uniform prior, MAP assignment with ties to the
/// lowest index. Patterns no state can trigger are marked unreachable.
DecodeRule decode(const LikelihoodTable& table);

/// p_V = sum_i P(d_i) max_k P(phi_k | d_i), P(d_i) = (1/N) sum_n P(d_i | phi_n).
double success_v(const LikelihoodTable& table, const DecodeRule& rule, bool post_select = false);

/// Probability Alice names the King's outcome for basis m.
double success_m(const SetupModel& setup, const PhaseVector& phases, const MubFamily& mubs, const VaaBasis& vaa,
                 int m, const DecodeOptions& options = {});

struct SubsetResult {
    std::vector<int> bases;
    double average = 0.0;
};

/// Mean of p_M over the listed bases. Throws EmptySubset or IndexOutOfRange.
double subset_average(std::span<const double> p_m, std::span<const int> subset);

/// The basis pair with the largest mean p_M; ties go to the lexicographically first pair.
SubsetResult best_pair(std::span<const double> p_m);

double subset_report(const SetupModel& setup, const PhaseVector& phases, const MubFamily& mubs, const VaaBasis& vaa,
                     std::span<const int> subset, const DecodeOptions& options = {});

struct SuccessReport {
    double p_v = 0.0;
    std::vector<double> p_m;

    double average_p_m() const;
};

/// Precompiles the setup expansion and every input state (VAA states and
/// collapsed MUB products) so that repeated evaluation at new phases only
/// pays for the expansion itself. Not thread-safe; copy per worker.
class SuccessEvaluator {
public:
    SuccessEvaluator(const SetupModel& setup, const MubFamily& mubs, const VaaBasis& vaa);

    int dim() const { return dim_; }
    int phase_count() const { return expansion_.phase_count(); }
    const ModeExpansion& expansion() const { return expansion_; }

    LikelihoodTable likelihoods(const PhaseVector& phases);

    /// P(d_i | m_j) over decodable patterns; row j.
    Eigen::MatrixXd collapsed_likelihoods(const PhaseVector& phases, int m);

    double success_v(const PhaseVector& phases, bool post_select = false);
    double success_m(const PhaseVector& phases, int m, const DecodeOptions& options);
    SuccessReport evaluate(const PhaseVector& phases, const DecodeOptions& options);

private:
    Eigen::MatrixXd decodable_rows(std::span<const TwoPhotonState> states, std::span<const Complex> phases,
                                   std::vector<double>* leakage);
    double success_m_from(const Eigen::MatrixXd& collapsed, const DecodeRule& rule, int m,
                          const DecodeOptions& options) const;

    int dim_;
    ModeExpansion expansion_;
    MappingTable mapping_;
    std::vector<TwoPhotonState> vaa_states_;
    std::vector<std::vector<TwoPhotonState>> collapsed_;
    std::vector<int> decodable_;
    std::vector<ClickPattern> patterns_;
    std::vector<double> scratch_;
};

}  // namespace mkp
