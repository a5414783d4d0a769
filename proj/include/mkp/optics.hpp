#pragma once

#include <span>
#include <string>
#include <vector>

#include "mkp/qstate.hpp"

namespace mkp {

enum class Photon { A, B };

struct Coupling {
    int detector;
    Complex coefficient;
};

/// Transfer row of one input mode: each entry couples the mode to a detector
/// with a fixed coefficient; the whole row shares one phase shifter.
struct InputRow {
    Photon photon;
    int mode;
    int phase_slot;
    std::vector<Coupling> entries;
};

/// Graph-derived linear-optical setup. Rows are ordered a_0..a_{D-1},
/// b_0..b_{D-1}.
class SetupModel {
public:
    SetupModel(int dim, std::vector<std::string> detectors, std::vector<InputRow> rows);

    int dim() const { return dim_; }
    int detector_count() const { return static_cast<int>(detectors_.size()); }
    int phase_count() const { return 2 * dim_; }
    const std::vector<std::string>& detectors() const { return detectors_; }
    const std::vector<InputRow>& rows() const { return rows_; }
    const InputRow& row(Photon photon, int mode) const;

    friend bool operator==(const SetupModel&, const SetupModel&);

private:
    int dim_;
    std::vector<std::string> detectors_;
    std::vector<InputRow> rows_;
};

bool operator==(const Coupling&, const Coupling&);
bool operator==(const InputRow&, const InputRow&);

struct PhaseVector {
    std::vector<double> angles;

    std::size_t size() const { return angles.size(); }
    static PhaseVector zeros(const SetupModel& setup) {
        return {std::vector<double>(setup.phase_count(), 0.0)};
    }
};

/// Unordered detector pair; first == second is a double occupation.
struct ClickPattern {
    int first;
    int second;

    bool decodable() const { return first != second; }
    friend bool operator==(const ClickPattern&, const ClickPattern&) = default;
};

/// Patterns are enumerated (u, v) with u <= v in lexicographic order.
int pattern_count(int detector_count);
int pattern_index(int u, int v, int detector_count);
ClickPattern pattern_at(int index, int detector_count);

/// Probabilities over all click patterns of one setup, indexed by pattern_index.
struct ClickDistribution {
    int detector_count = 0;
    std::vector<double> probs;

    double at(int u, int v) const { return probs[pattern_index(u, v, detector_count)]; }
    double decodable_mass() const;
};

/// Template topology for an odd prime D. Detectors are
/// [c, d, J1..J(D-1), T1..T(D-1)]; a_i uses phase slot 2i and b_i slot 2i+1.
SetupModel build_setup(int dim);

/// Dense 2D x detectors matrix; entry = coefficient * exp(i * angle[slot]).
Eigen::MatrixXcd transfer_matrix(const SetupModel& setup, const PhaseVector& phases);

/// Relabels input modes i -> (i + shift) mod D for both photons; each row
/// keeps its couplings and phase slot.
SetupModel cyclic_variant(const SetupModel& setup, int shift);

/// Detector patterns reachable by at least one perfect matching: some input
/// monomial a_p b_q with nonzero amplitude whose rows cover the pattern.
std::vector<bool> matching_support(const SetupModel& setup, const TwoPhotonState& state);

/// Phase-free expansion of every input monomial a_p b_q into detector
/// monomials. Substituting the transfer rows and collecting coefficients is
/// linear in the input amplitudes, so it is compiled once per setup.
class ModeExpansion {
public:
    explicit ModeExpansion(const SetupModel& setup);

    int dim() const { return dim_; }
    int detector_count() const { return detector_count_; }
    int pattern_count() const { return pattern_count_; }
    int phase_count() const { return 2 * dim_; }

    /// exp(i (theta[slot(a_p)] + theta[slot(b_q)])) for every monomial, index p*D+q.
    std::vector<Complex> monomial_phases(const PhaseVector& phases) const;

    /// Unnormalized detector-monomial coefficients.
    void coefficients(const TwoPhotonState& state, std::span<const Complex> phases,
                      std::span<Complex> out) const;

    /// Normalized probabilities written into out. Throws DegenerateOutput when
    /// every coefficient vanishes.
    void probabilities(const TwoPhotonState& state, std::span<const Complex> phases,
                       std::span<double> out) const;

    ClickDistribution distribution(const TwoPhotonState& state, const PhaseVector& phases) const;

private:
    struct Term {
        int pattern;
        Complex coefficient;
    };

    int dim_;
    int detector_count_;
    int pattern_count_;
    std::vector<int> slot_a_;
    std::vector<int> slot_b_;
    // CSR layout over monomials p*D+q.
    std::vector<int> offsets_;
    std::vector<Term> terms_;
};

/// Expands state through the setup and returns the normalized click
/// distribution.
ClickDistribution simulate(const SetupModel& setup, const PhaseVector& phases, const TwoPhotonState& state);

/// Input-mode permutation (p, q) -> (p + shift, q + shift) mod D.
TwoPhotonState shift_modes(const TwoPhotonState& state, int shift);

}  // namespace mkp
