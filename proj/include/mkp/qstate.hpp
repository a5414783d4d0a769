#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace mkp {

using Complex = std::complex<double>;

/// Tolerance for analytic identities of the state algebra.
inline constexpr double kStateTolerance = 1e-12;

/// Pure single-qudit state in the computational basis.
struct Ket {
    Eigen::VectorXcd amps;

    int dim() const { return static_cast<int>(amps.size()); }
};

/// Pure two-photon state; amps(p, q) is the amplitude of photon a in mode p
/// and photon b in mode q.
struct TwoPhotonState {
    Eigen::MatrixXcd amps;

    int dim() const { return static_cast<int>(amps.rows()); }
    double norm() const { return amps.norm(); }
};

/// <lhs|rhs> over the D*D two-photon modes.
Complex inner(const TwoPhotonState& lhs, const TwoPhotonState& rhs);

/// |a> (x) |b>.
TwoPhotonState product_state(const Ket& a, const Ket& b);

/// Computational basis product |p>_a |q>_b.
TwoPhotonState basis_state(int dim, int p, int q);

bool is_odd_prime(int n);

/// Throws NotOddPrime unless n is an odd prime >= 3.
void require_odd_prime(int n);

/// The D+1 mutually unbiased bases of an odd prime dimension. Bases
/// 0..D-1 are the quadratic phase bases <k|m_j> = w^(m k^2 + j k) / sqrt(D)
/// with w = exp(2 pi i / D); basis D is the computational basis.
class MubFamily {
public:
    explicit MubFamily(int dim);

    int dim() const { return dim_; }
    int basis_count() const { return dim_ + 1; }

    /// Row j holds the amplitudes of |m_j>.
    const Eigen::MatrixXcd& basis(int m) const;
    Ket state(int m, int j) const;

private:
    int dim_;
    std::vector<Eigen::MatrixXcd> bases_;
};

MubFamily build_mub(int dim);

/// Componentwise complex conjugate in the computational basis.
Ket conjugate_ket(const Ket& psi);

/// Generalized Bell state (1/sqrt(D)) sum_j conj(m_j) (x) m_j built from
/// basis m. The result does not depend on m.
TwoPhotonState bell_state(const MubFamily& mubs, int m);

/// State after the King's projection onto |m_j>: conj(m_j) (x) m_j.
TwoPhotonState collapsed_state(const MubFamily& mubs, int m, int j);

/// Largest deviation of any basis Gram matrix from the identity.
double mub_orthonormality_deviation(const MubFamily& mubs);

/// Largest deviation of |<m_j|m'_j'>|^2 from 1/D over distinct bases.
double mub_unbiasedness_deviation(const MubFamily& mubs);

}  // namespace mkp
