#pragma once

#include <vector>

#include "mkp/qstate.hpp"

namespace mkp {

inline constexpr double kVaaTolerance = 1e-10;

/// f_k(m) = (m*i - j) mod D for m < D and i for m = D, where k = j*D + i.
int mapping_function(int k, int m, int dim);

/// Table of f_k(m) for all k in [0, D^2) and m in [0, D].
class MappingTable {
public:
    explicit MappingTable(int dim);
    MappingTable(int dim, std::vector<std::vector<int>> table);

    int dim() const { return dim_; }
    int state_count() const { return dim_ * dim_; }
    int at(int k, int m) const { return table_[k][m]; }

    /// k = j*D + i.
    int row_index(int k) const { return k % dim_; }
    int column_index(int k) const { return k / dim_; }

    /// VAA indices k with f_k(m) = j; Alice's retrodiction subset for |m_j>.
    std::vector<int> retrodiction_subset(int m, int j) const;

    const std::vector<std::vector<int>>& rows() const { return table_; }

private:
    int dim_;
    std::vector<std::vector<int>> table_;
};

/// True iff every basis column takes each outcome exactly D times and every
/// pair of columns maps k bijectively onto Z_D x Z_D.
bool mols_check(const MappingTable& table);

struct VaaBasis {
    MappingTable mapping;
    std::vector<TwoPhotonState> states;

    int dim() const { return mapping.dim(); }
};

/// |phi_k> = -|B00> + (1/sqrt(D)) sum_m conj(m_f) (x) m_f with f = f_k(m).
/// Throws ConstructionInconsistent if the D^2 states are not orthonormal.
VaaBasis build_vaa_basis(const MubFamily& mubs);

/// Largest deviation of the VAA Gram matrix from the identity.
double vaa_gram_deviation(const VaaBasis& basis);

/// Largest deviation of |<phi_k| conj(m_j) (x) m_j>| from delta_{j, f_k(m)}/sqrt(D).
double vaa_overlap_check(const VaaBasis& basis, const MubFamily& mubs);

/// Largest deviation of sum_k |phi_k><phi_k| from the D^2 identity.
double vaa_completeness_deviation(const VaaBasis& basis);

}  // namespace mkp
