#include "mkp/vaa.hpp"

#include <cmath>
#include <string>

#include "mkp/error.hpp"

namespace mkp {

namespace {

constexpr double kInconsistencyThreshold = 1e-8;

Eigen::MatrixXcd stacked(const VaaBasis& basis) {
    const int n = basis.dim() * basis.dim();
    Eigen::MatrixXcd cols(n, static_cast<int>(basis.states.size()));
    for (std::size_t k = 0; k < basis.states.size(); ++k) {
        cols.col(static_cast<int>(k)) = basis.states[k].amps.reshaped();
    }
    return cols;
}

}  // namespace

int mapping_function(int k, int m, int dim) {
    if (k < 0 || k >= dim * dim) {
        throw Error(ErrorCode::IndexOutOfRange, "VAA index " + std::to_string(k) + " outside [0, D^2)");
    }
    if (m < 0 || m > dim) {
        throw Error(ErrorCode::IndexOutOfRange, "basis index " + std::to_string(m) + " outside [0, D]");
    }
    const int i = k % dim;
    const int j = k / dim;
    if (m == dim) return i;
    return ((m * i - j) % dim + dim) % dim;
}

MappingTable::MappingTable(int dim) : dim_(dim) {
    require_odd_prime(dim);
    table_.assign(dim * dim, std::vector<int>(dim + 1));
    for (int k = 0; k < dim * dim; ++k) {
        for (int m = 0; m <= dim; ++m) table_[k][m] = mapping_function(k, m, dim);
    }
}

MappingTable::MappingTable(int dim, std::vector<std::vector<int>> table)
    : dim_(dim), table_(std::move(table)) {
    if (static_cast<int>(table_.size()) != dim * dim) {
        throw Error(ErrorCode::DimensionMismatch, "mapping table needs D^2 rows");
    }
    for (const auto& row : table_) {
        if (static_cast<int>(row.size()) != dim + 1) {
            throw Error(ErrorCode::DimensionMismatch, "mapping table rows need D+1 entries");
        }
    }
}

std::vector<int> MappingTable::retrodiction_subset(int m, int j) const {
    std::vector<int> out;
    for (int k = 0; k < state_count(); ++k) {
        if (table_[k][m] == j) out.push_back(k);
    }
    return out;
}

bool mols_check(const MappingTable& table) {
    const int dim = table.dim();
    const int n = table.state_count();
    for (int m = 0; m <= dim; ++m) {
        std::vector<int> counts(dim, 0);
        for (int k = 0; k < n; ++k) {
            const int v = table.at(k, m);
            if (v < 0 || v >= dim) return false;
            ++counts[v];
        }
        for (int c : counts) {
            if (c != dim) return false;
        }
    }
    for (int m = 0; m <= dim; ++m) {
        for (int mp = m + 1; mp <= dim; ++mp) {
            std::vector<bool> seen(n, false);
            for (int k = 0; k < n; ++k) {
                const int cell = table.at(k, m) * dim + table.at(k, mp);
                if (seen[cell]) return false;
                seen[cell] = true;
            }
        }
    }
    return true;
}

VaaBasis build_vaa_basis(const MubFamily& mubs) {
    const int dim = mubs.dim();
    MappingTable mapping(dim);
    const TwoPhotonState bell = bell_state(mubs, 0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));

    // Collapsed products are shared by many k; build each once.
    std::vector<std::vector<TwoPhotonState>> collapsed(dim + 1);
    for (int m = 0; m <= dim; ++m) {
        for (int j = 0; j < dim; ++j) collapsed[m].push_back(collapsed_state(mubs, m, j));
    }

    std::vector<TwoPhotonState> states;
    states.reserve(mapping.state_count());
    for (int k = 0; k < mapping.state_count(); ++k) {
        Eigen::MatrixXcd amps = -bell.amps;
        for (int m = 0; m <= dim; ++m) amps += scale * collapsed[m][mapping.at(k, m)].amps;
        states.push_back({std::move(amps)});
    }

    VaaBasis basis{std::move(mapping), std::move(states)};
    const double deviation = vaa_gram_deviation(basis);
    if (!(deviation <= kInconsistencyThreshold)) {
        throw Error(ErrorCode::ConstructionInconsistent,
                    "VAA Gram matrix deviates from identity by " + std::to_string(deviation));
    }
    return basis;
}

double vaa_gram_deviation(const VaaBasis& basis) {
    const Eigen::MatrixXcd cols = stacked(basis);
    const Eigen::MatrixXcd gram = cols.adjoint() * cols;
    return (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

double vaa_overlap_check(const VaaBasis& basis, const MubFamily& mubs) {
    if (basis.dim() != mubs.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "VAA basis and MUB family dimensions differ");
    }
    const int dim = mubs.dim();
    const double expected = 1.0 / std::sqrt(static_cast<double>(dim));
    double worst = 0.0;
    for (int m = 0; m <= dim; ++m) {
        for (int j = 0; j < dim; ++j) {
            const TwoPhotonState target = collapsed_state(mubs, m, j);
            for (int k = 0; k < basis.mapping.state_count(); ++k) {
                const double overlap = std::abs(inner(basis.states[k], target));
                const double want = basis.mapping.at(k, m) == j ? expected : 0.0;
                worst = std::max(worst, std::abs(overlap - want));
            }
        }
    }
    return worst;
}

double vaa_completeness_deviation(const VaaBasis& basis) {
    const Eigen::MatrixXcd cols = stacked(basis);
    const Eigen::MatrixXcd projector = cols * cols.adjoint();
    return (projector - Eigen::MatrixXcd::Identity(projector.rows(), projector.cols())).cwiseAbs().maxCoeff();
}

}  // namespace mkp
