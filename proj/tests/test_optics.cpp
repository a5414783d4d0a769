#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "expansion_oracle.hpp"
#include "mkp/error.hpp"
#include "mkp/optics.hpp"
#include "mkp/vaa.hpp"
#include "test_support.hpp"

using namespace mkp;

namespace {

Eigen::MatrixXcd to_eigen(const oracle::Matrix& m) {
    Eigen::MatrixXcd out(m.size(), m[0].size());
    for (std::size_t r = 0; r < m.size(); ++r) {
        for (std::size_t c = 0; c < m[0].size(); ++c) out(r, c) = m[r][c];
    }
    return out;
}

double oracle_gap(const ClickDistribution& dist, const std::map<std::pair<int, int>, double>& ref) {
    double worst = 0.0;
    for (const auto& [key, p] : ref) worst = std::max(worst, std::abs(dist.at(key.first, key.second) - p));
    return worst;
}

}  // namespace

TEST(Patterns, IndexRoundTrip) {
    for (int n : {1, 6, 10, 14}) {
        EXPECT_EQ(pattern_count(n), n * (n + 1) / 2);
        for (int idx = 0; idx < pattern_count(n); ++idx) {
            const ClickPattern p = pattern_at(idx, n);
            EXPECT_LE(p.first, p.second);
            EXPECT_EQ(pattern_index(p.first, p.second, n), idx);
            EXPECT_EQ(pattern_index(p.second, p.first, n), idx);
        }
    }
}

TEST(BuildSetup, ThreeDimMatchesOperatorForm) {
    const SetupModel setup = build_setup(3);
    EXPECT_EQ(setup.rows().size(), 6u);
    EXPECT_EQ(setup.detector_count(), 6);
    EXPECT_EQ(setup.phase_count(), 6);
    const Eigen::MatrixXcd t = transfer_matrix(setup, PhaseVector::zeros(setup));
    const Eigen::MatrixXcd want = to_eigen(oracle::operator_matrix_3d(std::vector<double>(6, 0.0)));
    EXPECT_EQ(t, want);
}

TEST(BuildSetup, RowStructure) {
    for (int d : {3, 5, 7, 11}) {
        const SetupModel setup = build_setup(d);
        EXPECT_EQ(static_cast<int>(setup.rows().size()), 2 * d);
        EXPECT_EQ(setup.detector_count(), 2 * d);
        EXPECT_EQ(setup.phase_count(), 2 * d);
        std::vector<int> slot_uses(2 * d, 0);
        for (const auto& row : setup.rows()) {
            EXPECT_EQ(row.entries.size(), row.mode == 0 ? 4u : 3u);
            ++slot_uses[row.phase_slot];
            for (const auto& e : row.entries) EXPECT_DOUBLE_EQ(std::abs(e.coefficient), 1.0);
        }
        for (int uses : slot_uses) EXPECT_EQ(uses, 1);
    }
}

TEST(BuildSetup, HigherDimensionCounts) {
    const SetupModel five = build_setup(5);
    EXPECT_EQ(five.detector_count() - 2, 8);
    EXPECT_EQ(five.phase_count(), 10);
    const SetupModel seven = build_setup(7);
    EXPECT_EQ(seven.detector_count(), 14);
    EXPECT_EQ(seven.phase_count(), 14);
}

TEST(BuildSetup, RejectsNonPrime) { EXPECT_THROW(build_setup(9), Error); }

TEST(TransferMatrix, PhaseOfPiNegatesRowA0) {
    const SetupModel setup = build_setup(3);
    PhaseVector phases = PhaseVector::zeros(setup);
    phases.angles[0] = std::numbers::pi;  // phi_1 drives a_0
    const Eigen::MatrixXcd base = transfer_matrix(setup, PhaseVector::zeros(setup));
    const Eigen::MatrixXcd t = transfer_matrix(setup, phases);
    EXPECT_LT((t.row(0) + base.row(0)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(t.bottomRows(5), base.bottomRows(5));
}

TEST(TransferMatrix, MatchesOperatorFormAtRandomPhases) {
    std::mt19937_64 rng(5);
    const SetupModel setup = build_setup(3);
    for (int trial = 0; trial < 20; ++trial) {
        const PhaseVector phases = fixture::random_phases(6, rng);
        const Eigen::MatrixXcd want = to_eigen(oracle::operator_matrix_3d(phases.angles));
        EXPECT_LT((transfer_matrix(setup, phases) - want).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(TransferMatrix, UnitModulusEntries) {
    std::mt19937_64 rng(6);
    const SetupModel setup = build_setup(7);
    const Eigen::MatrixXcd t = transfer_matrix(setup, fixture::random_phases(14, rng));
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
        for (Eigen::Index c = 0; c < t.cols(); ++c) {
            const double mag = std::abs(t(r, c));
            EXPECT_TRUE(mag == 0.0 || std::abs(mag - 1.0) < 1e-15);
        }
    }
}

TEST(TransferMatrix, PhaseCountMismatch) {
    const SetupModel setup = build_setup(3);
    try {
        transfer_matrix(setup, PhaseVector{{0.0, 0.0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PhaseCountMismatch);
    }
    EXPECT_THROW(simulate(setup, PhaseVector{{0.0}}, basis_state(3, 0, 0)), Error);
}

TEST(Simulate, MatchesBruteForceOracleThreeDim) {
    std::mt19937_64 rng(21);
    const SetupModel setup = build_setup(3);
    const MubFamily mubs = build_mub(3);
    const TwoPhotonState bell = bell_state(mubs, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const PhaseVector phases = fixture::random_phases(6, rng);
        const TwoPhotonState state = trial % 2 == 0 ? fixture::random_state(3, rng) : bell;
        const ClickDistribution dist = simulate(setup, phases, state);
        EXPECT_LT(oracle_gap(dist, oracle::expand(oracle::operator_matrix_3d(phases.angles), state)), 1e-10);
    }
}

TEST(Simulate, MatchesBruteForceOracleFiveDim) {
    std::mt19937_64 rng(22);
    const SetupModel setup = build_setup(5);
    for (int trial = 0; trial < 100; ++trial) {
        const PhaseVector phases = fixture::random_phases(10, rng);
        const TwoPhotonState state = fixture::random_state(5, rng);
        const ClickDistribution dist = simulate(setup, phases, state);
        EXPECT_LT(oracle_gap(dist, oracle::expand(oracle::template_matrix(5, phases.angles), state)), 1e-10);
    }
}

TEST(Simulate, NormalizedAndNonNegative) {
    std::mt19937_64 rng(23);
    for (int d : {3, 5, 7}) {
        const SetupModel setup = build_setup(d);
        for (int trial = 0; trial < 20; ++trial) {
            const ClickDistribution dist =
                simulate(setup, fixture::random_phases(2 * d, rng), fixture::random_state(d, rng));
            double total = 0.0;
            for (double p : dist.probs) {
                EXPECT_GE(p, 0.0);
                total += p;
            }
            EXPECT_NEAR(total, 1.0, 1e-9);
        }
    }
}

TEST(Simulate, ZeroZeroInputNeverGivesCD) {
    std::mt19937_64 rng(24);
    const SetupModel setup = build_setup(3);
    const TwoPhotonState zz = basis_state(3, 0, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const ClickDistribution dist = simulate(setup, fixture::random_phases(6, rng), zz);
        EXPECT_LT(dist.at(0, 1), 1e-30);
    }
}

TEST(Simulate, SupportWithinPerfectMatchings) {
    std::mt19937_64 rng(25);
    for (int d : {3, 5}) {
        const SetupModel setup = build_setup(d);
        const VaaBasis vaa = build_vaa_basis(build_mub(d));
        const PhaseVector phases = fixture::random_phases(2 * d, rng);
        for (const auto& state : vaa.states) {
            const ClickDistribution dist = simulate(setup, phases, state);
            const auto support = matching_support(setup, state);
            for (std::size_t i = 0; i < dist.probs.size(); ++i) {
                if (!support[i]) EXPECT_EQ(dist.probs[i], 0.0);
            }
        }
    }
}

TEST(Simulate, SameHigherModeNeverReachesCD) {
    // A ket |pp> with p >= 1 routes both photons to a single target detector.
    const SetupModel setup = build_setup(5);
    for (int p = 1; p < 5; ++p) {
        const auto support = matching_support(setup, basis_state(5, p, p));
        EXPECT_FALSE(support[pattern_index(0, 1, setup.detector_count())]);
    }
}

TEST(Simulate, DegenerateOutput) {
    std::vector<InputRow> rows;
    for (int i = 0; i < 3; ++i) {
        rows.push_back({Photon::A, i, 2 * i, {}});
        rows.push_back({Photon::B, i, 2 * i + 1, {}});
    }
    const SetupModel dark(3, {"c", "d"}, rows);
    try {
        simulate(dark, PhaseVector::zeros(dark), basis_state(3, 0, 0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateOutput);
    }
}

TEST(CyclicVariant, IdentityAndGroupOrder) {
    const SetupModel setup = build_setup(3);
    EXPECT_EQ(cyclic_variant(setup, 0), setup);
    EXPECT_EQ(cyclic_variant(cyclic_variant(cyclic_variant(setup, 1), 1), 1), setup);
    EXPECT_FALSE(cyclic_variant(setup, 1) == setup);
    EXPECT_THROW(cyclic_variant(setup, 3), Error);
}

TEST(CyclicVariant, RelabelsInputModes) {
    std::mt19937_64 rng(26);
    const SetupModel setup = build_setup(3);
    const SetupModel shifted = cyclic_variant(setup, 1);
    const PhaseVector phases = fixture::random_phases(6, rng);
    const ClickDistribution a = simulate(shifted, phases, basis_state(3, 1, 1));
    const ClickDistribution b = simulate(setup, phases, basis_state(3, 0, 0));
    for (std::size_t i = 0; i < a.probs.size(); ++i) EXPECT_NEAR(a.probs[i], b.probs[i], 1e-12);
}

TEST(CyclicVariant, Equivariance) {
    std::mt19937_64 rng(27);
    for (int d : {3, 5}) {
        const SetupModel setup = build_setup(d);
        for (int t = 0; t < d; ++t) {
            const SetupModel shifted = cyclic_variant(setup, t);
            for (int trial = 0; trial < 10; ++trial) {
                const PhaseVector phases = fixture::random_phases(2 * d, rng);
                const TwoPhotonState state = fixture::random_state(d, rng);
                const ClickDistribution a = simulate(shifted, phases, shift_modes(state, t));
                const ClickDistribution b = simulate(setup, phases, state);
                for (std::size_t i = 0; i < a.probs.size(); ++i) EXPECT_NEAR(a.probs[i], b.probs[i], 1e-12);
            }
        }
    }
}

TEST(SetupModel, RejectsMalformedRows) {
    auto rows = build_setup(3).rows();
    const std::vector<std::string> dets = build_setup(3).detectors();
    auto missing = rows;
    missing.pop_back();
    EXPECT_THROW(SetupModel(3, dets, missing), Error);
    auto duplicate = rows;
    duplicate[1] = duplicate[0];
    EXPECT_THROW(SetupModel(3, dets, duplicate), Error);
    auto bad_slot = rows;
    bad_slot[0].phase_slot = 6;
    EXPECT_THROW(SetupModel(3, dets, bad_slot), Error);
    auto bad_det = rows;
    bad_det[0].entries[0].detector = 6;
    EXPECT_THROW(SetupModel(3, dets, bad_det), Error);
}
