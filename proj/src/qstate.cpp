#include "mkp/qstate.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mkp/error.hpp"

namespace mkp {

Complex inner(const TwoPhotonState& lhs, const TwoPhotonState& rhs) {
    return (lhs.amps.conjugate().cwiseProduct(rhs.amps)).sum();
}

TwoPhotonState product_state(const Ket& a, const Ket& b) {
    return {a.amps * b.amps.transpose()};
}

TwoPhotonState basis_state(int dim, int p, int q) {
    if (p < 0 || p >= dim || q < 0 || q >= dim) {
        throw Error(ErrorCode::IndexOutOfRange, "mode index outside [0, " + std::to_string(dim) + ")");
    }
    TwoPhotonState out{Eigen::MatrixXcd::Zero(dim, dim)};
    out.amps(p, q) = 1.0;
    return out;
}

bool is_odd_prime(int n) {
    if (n < 3 || n % 2 == 0) return false;
    for (int f = 3; f * f <= n; f += 2) {
        if (n % f == 0) return false;
    }
    return true;
}

void require_odd_prime(int n) {
    if (!is_odd_prime(n)) {
        throw Error(ErrorCode::NotOddPrime, "dimension " + std::to_string(n) + " is not an odd prime");
    }
}

MubFamily::MubFamily(int dim) : dim_(dim) {
    require_odd_prime(dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    bases_.reserve(dim + 1);
    for (int m = 0; m < dim; ++m) {
        Eigen::MatrixXcd basis(dim, dim);
        for (int j = 0; j < dim; ++j) {
            for (int k = 0; k < dim; ++k) {
                // Reduce the exponent mod D before taking the angle to keep it exact.
                const long exponent = (static_cast<long>(m) * k * k + static_cast<long>(j) * k) % dim;
                const double angle = 2.0 * std::numbers::pi * static_cast<double>(exponent) / dim;
                basis(j, k) = std::polar(scale, angle);
            }
        }
        bases_.push_back(std::move(basis));
    }
    bases_.push_back(Eigen::MatrixXcd::Identity(dim, dim));
}

const Eigen::MatrixXcd& MubFamily::basis(int m) const {
    if (m < 0 || m > dim_) {
        throw Error(ErrorCode::BasisOutOfRange, "basis index " + std::to_string(m) + " outside [0, D]");
    }
    return bases_[m];
}

Ket MubFamily::state(int m, int j) const {
    const auto& b = basis(m);
    if (j < 0 || j >= dim_) {
        throw Error(ErrorCode::IndexOutOfRange, "outcome index " + std::to_string(j) + " outside [0, D)");
    }
    return {b.row(j).transpose()};
}

MubFamily build_mub(int dim) { return MubFamily(dim); }

Ket conjugate_ket(const Ket& psi) { return {psi.amps.conjugate()}; }

TwoPhotonState bell_state(const MubFamily& mubs, int m) {
    const int dim = mubs.dim();
    const auto& b = mubs.basis(m);
    // sum_j conj(m_j) m_j^T = B^H B with B's rows the basis states.
    TwoPhotonState out{b.adjoint() * b};
    out.amps /= std::sqrt(static_cast<double>(dim));
    out.amps /= out.amps.norm();
    return out;
}

TwoPhotonState collapsed_state(const MubFamily& mubs, int m, int j) {
    const Ket k = mubs.state(m, j);
    TwoPhotonState out = product_state(conjugate_ket(k), k);
    out.amps /= out.amps.norm();
    return out;
}

double mub_orthonormality_deviation(const MubFamily& mubs) {
    double worst = 0.0;
    const int dim = mubs.dim();
    for (int m = 0; m < mubs.basis_count(); ++m) {
        const auto& b = mubs.basis(m);
        const Eigen::MatrixXcd gram = b.conjugate() * b.transpose();
        worst = std::max(worst, (gram - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff());
    }
    return worst;
}

double mub_unbiasedness_deviation(const MubFamily& mubs) {
    double worst = 0.0;
    const double target = 1.0 / mubs.dim();
    for (int m = 0; m < mubs.basis_count(); ++m) {
        for (int n = m + 1; n < mubs.basis_count(); ++n) {
            const Eigen::MatrixXcd overlaps = mubs.basis(m).conjugate() * mubs.basis(n).transpose();
            worst = std::max(worst, (overlaps.cwiseAbs2().array() - target).abs().maxCoeff());
        }
    }
    return worst;
}

}  // namespace mkp
