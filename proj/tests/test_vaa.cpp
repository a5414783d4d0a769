#include <cmath>
#include <set>
#include <utility>

#include <gtest/gtest.h>

#include "mkp/error.hpp"
#include "mkp/vaa.hpp"

using namespace mkp;

TEST(MappingFunction, Examples) {
    EXPECT_EQ(mapping_function(3, 0, 3), 2);
    EXPECT_EQ(mapping_function(7, 3, 3), 1);
    for (int m = 0; m <= 5; ++m) EXPECT_EQ(mapping_function(0, m, 5), 0);
}

TEST(MappingFunction, IndexErrors) {
    EXPECT_THROW(mapping_function(9, 0, 3), Error);
    EXPECT_THROW(mapping_function(0, 4, 3), Error);
    EXPECT_THROW(mapping_function(-1, 0, 3), Error);
}

TEST(MappingTable, DecomposesKAsJTimesDPlusI) {
    const MappingTable t(5);
    EXPECT_EQ(t.row_index(13), 3);
    EXPECT_EQ(t.column_index(13), 2);
}

namespace {

// Independent brute-force Latin/orthogonality check over explicit pair sets.
bool brute_force_mols(const MappingTable& t) {
    const int d = t.dim();
    for (int m = 0; m <= d; ++m) {
        for (int j = 0; j < d; ++j) {
            int hits = 0;
            for (int k = 0; k < d * d; ++k) hits += t.at(k, m) == j;
            if (hits != d) return false;
        }
        for (int mp = 0; mp <= d; ++mp) {
            if (mp == m) continue;
            std::set<std::pair<int, int>> pairs;
            for (int k = 0; k < d * d; ++k) pairs.insert({t.at(k, m), t.at(k, mp)});
            if (static_cast<int>(pairs.size()) != d * d) return false;
        }
    }
    return true;
}

}  // namespace

TEST(MolsCheck, HoldsForOddPrimes) {
    for (int d : {3, 5, 7, 11}) {
        const MappingTable t(d);
        EXPECT_TRUE(brute_force_mols(t)) << d;
        EXPECT_TRUE(mols_check(t)) << d;
        for (int m = 0; m <= d; ++m) {
            for (int j = 0; j < d; ++j) EXPECT_EQ(static_cast<int>(t.retrodiction_subset(m, j).size()), d);
        }
    }
}

TEST(MolsCheck, DetectsCorruptedEntry) {
    auto rows = MappingTable(3).rows();
    rows[4][1] = (rows[4][1] + 1) % 3;
    const MappingTable corrupted(3, rows);
    EXPECT_FALSE(mols_check(corrupted));
    EXPECT_FALSE(brute_force_mols(corrupted));
}

TEST(MolsCheck, DetectsOutOfRangeValue) {
    auto rows = MappingTable(3).rows();
    rows[0][0] = 3;
    EXPECT_FALSE(mols_check(MappingTable(3, rows)));
}

TEST(VaaBasis, ThreeDimIsOrthonormal) {
    const MubFamily mubs = build_mub(3);
    const VaaBasis vaa = build_vaa_basis(mubs);
    ASSERT_EQ(vaa.states.size(), 9u);
    EXPECT_LT(vaa_gram_deviation(vaa), kVaaTolerance);
}

TEST(VaaBasis, BellOverlapIsInverseD) {
    for (int d : {3, 5, 7}) {
        const MubFamily mubs = build_mub(d);
        const VaaBasis vaa = build_vaa_basis(mubs);
        const TwoPhotonState bell = bell_state(mubs, 0);
        for (const auto& s : vaa.states) EXPECT_NEAR(std::abs(inner(bell, s) - 1.0 / d), 0.0, kVaaTolerance);
    }
}

TEST(VaaBasis, FiveDimStatesAreUnitNorm) {
    const VaaBasis vaa = build_vaa_basis(build_mub(5));
    ASSERT_EQ(vaa.states.size(), 25u);
    for (const auto& s : vaa.states) EXPECT_NEAR(s.norm(), 1.0, kVaaTolerance);
}

TEST(VaaBasis, PhiThreeContainsZeroZeroButNotHigherDiagonals) {
    const VaaBasis vaa = build_vaa_basis(build_mub(3));
    const auto& amps = vaa.states[3].amps;
    EXPECT_GT(std::abs(amps(0, 0)), 0.1);
    EXPECT_LT(std::abs(amps(1, 1)), 1e-12);
    EXPECT_LT(std::abs(amps(2, 2)), 1e-12);
}

TEST(VaaOverlap, SpecificEntries) {
    const MubFamily mubs = build_mub(3);
    const VaaBasis vaa = build_vaa_basis(mubs);
    EXPECT_NEAR(std::abs(inner(vaa.states[3], collapsed_state(mubs, 0, 2))), 1.0 / std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(std::abs(inner(vaa.states[3], collapsed_state(mubs, 0, 0))), 0.0, 1e-12);
}

TEST(VaaOverlap, ExhaustiveScan) {
    for (int d : {3, 5, 7}) {
        const MubFamily mubs = build_mub(d);
        const VaaBasis vaa = build_vaa_basis(mubs);
        EXPECT_LT(vaa_overlap_check(vaa, mubs), kVaaTolerance) << d;
        EXPECT_LT(vaa_completeness_deviation(vaa), kVaaTolerance) << d;
    }
}

TEST(VaaOverlap, DimensionMismatch) {
    const VaaBasis vaa = build_vaa_basis(build_mub(3));
    EXPECT_THROW(vaa_overlap_check(vaa, build_mub(5)), Error);
}
