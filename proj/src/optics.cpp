#include "mkp/optics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mkp/error.hpp"

namespace mkp {

namespace {

constexpr double kDegenerateNorm = 1e-24;

const Complex kI{0.0, 1.0};

int row_position(Photon photon, int mode, int dim) { return (photon == Photon::A ? 0 : dim) + mode; }

std::string row_label(Photon photon, int mode) { return (photon == Photon::A ? "a" : "b") + std::to_string(mode); }

}  // namespace

SetupModel::SetupModel(int dim, std::vector<std::string> detectors, std::vector<InputRow> rows)
    : dim_(dim), detectors_(std::move(detectors)) {
    if (dim < 1) throw Error(ErrorCode::SchemaError, "setup dimension must be positive");
    if (detectors_.empty()) throw Error(ErrorCode::SchemaError, "setup has no detectors");
    if (static_cast<int>(rows.size()) != 2 * dim) {
        throw Error(ErrorCode::SchemaError,
                    "setup needs " + std::to_string(2 * dim) + " input rows, got " + std::to_string(rows.size()));
    }
    rows_.resize(2 * dim);
    std::vector<bool> filled(2 * dim, false);
    for (auto& row : rows) {
        if (row.mode < 0 || row.mode >= dim) {
            throw Error(ErrorCode::SchemaError, "input mode " + std::to_string(row.mode) + " out of range");
        }
        const int pos = row_position(row.photon, row.mode, dim);
        if (filled[pos]) throw Error(ErrorCode::SchemaError, "duplicate input row " + row_label(row.photon, row.mode));
        if (row.phase_slot < 0 || row.phase_slot >= 2 * dim) {
            throw Error(ErrorCode::SchemaError, "phase slot of " + row_label(row.photon, row.mode) + " out of range");
        }
        for (const auto& e : row.entries) {
            if (e.detector < 0 || e.detector >= detector_count()) {
                throw Error(ErrorCode::SchemaError, "row " + row_label(row.photon, row.mode) + " names an unknown detector");
            }
        }
        filled[pos] = true;
        rows_[pos] = std::move(row);
    }
}

const InputRow& SetupModel::row(Photon photon, int mode) const {
    if (mode < 0 || mode >= dim_) throw Error(ErrorCode::IndexOutOfRange, "input mode out of range");
    return rows_[row_position(photon, mode, dim_)];
}

bool operator==(const Coupling& a, const Coupling& b) {
    return a.detector == b.detector && a.coefficient == b.coefficient;
}

bool operator==(const InputRow& a, const InputRow& b) {
    return a.photon == b.photon && a.mode == b.mode && a.phase_slot == b.phase_slot && a.entries == b.entries;
}

bool operator==(const SetupModel& a, const SetupModel& b) {
    return a.dim_ == b.dim_ && a.detectors_ == b.detectors_ && a.rows_ == b.rows_;
}

int pattern_count(int detector_count) { return detector_count * (detector_count + 1) / 2; }

int pattern_index(int u, int v, int detector_count) {
    if (u > v) std::swap(u, v);
    // Rows before u contribute n + (n-1) + ... + (n-u+1) patterns.
    return u * detector_count - u * (u - 1) / 2 + (v - u);
}

ClickPattern pattern_at(int index, int detector_count) {
    int u = 0;
    while (index >= detector_count - u) {
        index -= detector_count - u;
        ++u;
    }
    return {u, u + index};
}

double ClickDistribution::decodable_mass() const {
    double mass = 0.0;
    for (int idx = 0; idx < static_cast<int>(probs.size()); ++idx) {
        if (pattern_at(idx, detector_count).decodable()) mass += probs[idx];
    }
    return mass;
}

SetupModel build_setup(int dim) {
    require_odd_prime(dim);
    std::vector<std::string> detectors{"c", "d"};
    for (int i = 1; i < dim; ++i) detectors.push_back("J" + std::to_string(i));
    for (int i = 1; i < dim; ++i) detectors.push_back("T" + std::to_string(i));
    const int c = 0;
    const int d = 1;
    auto junction = [](int i) { return 1 + i; };
    auto tail = [dim](int i) { return dim + i; };

    std::vector<InputRow> rows;
    rows.push_back({Photon::A, 0, 0, {{c, 1.0}, {d, kI}, {junction(1), kI}, {junction(2), -1.0}}});
    for (int i = 1; i < dim; ++i) {
        if (i % 2 == 1) {
            rows.push_back({Photon::A, i, 2 * i, {{c, -1.0}, {junction(i), kI}, {tail(i), 1.0}}});
        } else {
            rows.push_back({Photon::A, i, 2 * i, {{d, kI}, {junction(i), 1.0}, {tail(i), kI}}});
        }
    }
    rows.push_back({Photon::B, 0, 1, {{c, kI}, {d, 1.0}, {junction(1), -1.0}, {junction(2), kI}}});
    for (int i = 1; i < dim; ++i) {
        if (i % 2 == 1) {
            rows.push_back({Photon::B, i, 2 * i + 1, {{c, kI}, {junction(i), 1.0}, {tail(i), kI}}});
        } else {
            rows.push_back({Photon::B, i, 2 * i + 1, {{d, -1.0}, {junction(i), kI}, {tail(i), 1.0}}});
        }
    }
    return SetupModel(dim, std::move(detectors), std::move(rows));
}

Eigen::MatrixXcd transfer_matrix(const SetupModel& setup, const PhaseVector& phases) {
    if (static_cast<int>(phases.size()) != setup.phase_count()) {
        throw Error(ErrorCode::PhaseCountMismatch, "expected " + std::to_string(setup.phase_count()) +
                                                       " phases, got " + std::to_string(phases.size()));
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * setup.dim(), setup.detector_count());
    for (const auto& row : setup.rows()) {
        const Complex phase = std::polar(1.0, phases.angles[row.phase_slot]);
        const int r = row_position(row.photon, row.mode, setup.dim());
        for (const auto& e : row.entries) out(r, e.detector) += e.coefficient * phase;
    }
    return out;
}

SetupModel cyclic_variant(const SetupModel& setup, int shift) {
    const int dim = setup.dim();
    if (shift < 0 || shift >= dim) {
        throw Error(ErrorCode::IndexOutOfRange, "cyclic shift " + std::to_string(shift) + " outside [0, D)");
    }
    std::vector<InputRow> rows = setup.rows();
    for (auto& row : rows) row.mode = (row.mode + shift) % dim;
    return SetupModel(dim, setup.detectors(), std::move(rows));
}

std::vector<bool> matching_support(const SetupModel& setup, const TwoPhotonState& state) {
    const int dim = setup.dim();
    if (state.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "state and setup dimensions differ");
    const int n = setup.detector_count();
    std::vector<bool> support(pattern_count(n), false);
    for (int p = 0; p < dim; ++p) {
        for (int q = 0; q < dim; ++q) {
            if (state.amps(p, q) == Complex{}) continue;
            for (const auto& ea : setup.row(Photon::A, p).entries) {
                for (const auto& eb : setup.row(Photon::B, q).entries) {
                    if (ea.coefficient != Complex{} && eb.coefficient != Complex{}) {
                        support[pattern_index(ea.detector, eb.detector, n)] = true;
                    }
                }
            }
        }
    }
    return support;
}

ModeExpansion::ModeExpansion(const SetupModel& setup)
    : dim_(setup.dim()),
      detector_count_(setup.detector_count()),
      pattern_count_(mkp::pattern_count(setup.detector_count())) {
    for (int p = 0; p < dim_; ++p) {
        slot_a_.push_back(setup.row(Photon::A, p).phase_slot);
        slot_b_.push_back(setup.row(Photon::B, p).phase_slot);
    }
    offsets_.push_back(0);
    std::vector<Complex> scratch(pattern_count_);
    for (int p = 0; p < dim_; ++p) {
        for (int q = 0; q < dim_; ++q) {
            std::fill(scratch.begin(), scratch.end(), Complex{});
            for (const auto& ea : setup.row(Photon::A, p).entries) {
                for (const auto& eb : setup.row(Photon::B, q).entries) {
                    scratch[pattern_index(ea.detector, eb.detector, detector_count_)] +=
                        ea.coefficient * eb.coefficient;
                }
            }
            for (int idx = 0; idx < pattern_count_; ++idx) {
                if (scratch[idx] != Complex{}) terms_.push_back({idx, scratch[idx]});
            }
            offsets_.push_back(static_cast<int>(terms_.size()));
        }
    }
}

std::vector<Complex> ModeExpansion::monomial_phases(const PhaseVector& phases) const {
    if (static_cast<int>(phases.size()) != phase_count()) {
        throw Error(ErrorCode::PhaseCountMismatch, "expected " + std::to_string(phase_count()) + " phases, got " +
                                                       std::to_string(phases.size()));
    }
    std::vector<Complex> out(dim_ * dim_);
    for (int p = 0; p < dim_; ++p) {
        for (int q = 0; q < dim_; ++q) {
            out[p * dim_ + q] = std::polar(1.0, phases.angles[slot_a_[p]] + phases.angles[slot_b_[q]]);
        }
    }
    return out;
}

void ModeExpansion::coefficients(const TwoPhotonState& state, std::span<const Complex> phases,
                                 std::span<Complex> out) const {
    if (state.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "state and setup dimensions differ");
    std::fill(out.begin(), out.end(), Complex{});
    for (int p = 0; p < dim_; ++p) {
        for (int q = 0; q < dim_; ++q) {
            const Complex amp = state.amps(p, q);
            if (amp == Complex{}) continue;
            const int mono = p * dim_ + q;
            const Complex weight = amp * phases[mono];
            for (int t = offsets_[mono]; t < offsets_[mono + 1]; ++t) {
                out[terms_[t].pattern] += weight * terms_[t].coefficient;
            }
        }
    }
}

void ModeExpansion::probabilities(const TwoPhotonState& state, std::span<const Complex> phases,
                                  std::span<double> out) const {
    std::vector<Complex> coeffs(pattern_count_);
    coefficients(state, phases, coeffs);
    double total = 0.0;
    for (int idx = 0; idx < pattern_count_; ++idx) {
        out[idx] = std::norm(coeffs[idx]);
        total += out[idx];
    }
    if (!(total > kDegenerateNorm)) {
        throw Error(ErrorCode::DegenerateOutput, "every detector monomial cancels for this phase setting");
    }
    for (auto& v : out) v /= total;
}

ClickDistribution ModeExpansion::distribution(const TwoPhotonState& state, const PhaseVector& phases) const {
    ClickDistribution dist{detector_count_, std::vector<double>(pattern_count_)};
    probabilities(state, monomial_phases(phases), dist.probs);
    return dist;
}

ClickDistribution simulate(const SetupModel& setup, const PhaseVector& phases, const TwoPhotonState& state) {
    if (state.dim() != setup.dim()) throw Error(ErrorCode::DimensionMismatch, "state and setup dimensions differ");
    return ModeExpansion(setup).distribution(state, phases);
}

TwoPhotonState shift_modes(const TwoPhotonState& state, int shift) {
    const int dim = state.dim();
    shift = ((shift % dim) + dim) % dim;
    TwoPhotonState out{Eigen::MatrixXcd::Zero(dim, dim)};
    for (int p = 0; p < dim; ++p) {
        for (int q = 0; q < dim; ++q) out.amps((p + shift) % dim, (q + shift) % dim) = state.amps(p, q);
    }
    return out;
}

}  // namespace mkp
