#pragma once

// Brute-force reference for the two-photon polynomial expansion. It builds
// its own dense transfer matrices and multiplies out every input monomial
// against every ordered detector pair, with no shared code from the
// simulator beyond the state type.

#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "mkp/qstate.hpp"

namespace mkp::oracle {

using Matrix = std::vector<std::vector<std::complex<double>>>;

/// Operator-form matrix of the 3D setup with unit-modulus phase factors.
/// Rows a0 a1 a2 b0 b1 b2, columns c d 1_0 2_0 3_0 4_0. phi[k-1]
/// multiplies the row carrying phi_k.
inline Matrix operator_matrix_3d(const std::vector<double>& phi) {
    const std::complex<double> i{0.0, 1.0};
    auto f = [&](int k) { return std::polar(1.0, phi[k - 1]); };
    Matrix t(6, std::vector<std::complex<double>>(6, 0.0));
    const std::complex<double> a0[] = {1.0, i, i, -1.0, 0.0, 0.0};
    const std::complex<double> a1[] = {-1.0, 0.0, i, 0.0, 1.0, 0.0};
    const std::complex<double> a2[] = {0.0, i, 0.0, 1.0, 0.0, i};
    const std::complex<double> b0[] = {i, 1.0, -1.0, i, 0.0, 0.0};
    const std::complex<double> b1[] = {i, 0.0, 1.0, 0.0, i, 0.0};
    const std::complex<double> b2[] = {0.0, -1.0, 0.0, i, 0.0, 1.0};
    for (int c = 0; c < 6; ++c) {
        t[0][c] = a0[c] * f(1);
        t[1][c] = a1[c] * f(3);
        t[2][c] = a2[c] * f(5);
        t[3][c] = b0[c] * f(2);
        t[4][c] = b1[c] * f(4);
        t[5][c] = b2[c] * f(6);
    }
    return t;
}

/// Dense template matrix for odd D: columns c, d, J1..J(D-1), T1..T(D-1);
/// rows a0..a(D-1), b0..b(D-1); a_i uses angle 2i and b_i angle 2i+1.
inline Matrix template_matrix(int dim, const std::vector<double>& angle) {
    const std::complex<double> i{0.0, 1.0};
    const int cols = 2 * dim;
    Matrix t(2 * dim, std::vector<std::complex<double>>(cols, 0.0));
    auto J = [](int k) { return 1 + k; };
    auto T = [dim](int k) { return dim + k; };
    auto& a0 = t[0];
    a0[0] = 1.0; a0[1] = i; a0[J(1)] = i; a0[J(2)] = -1.0;
    auto& b0 = t[dim];
    b0[0] = i; b0[1] = 1.0; b0[J(1)] = -1.0; b0[J(2)] = i;
    for (int k = 1; k < dim; ++k) {
        auto& a = t[k];
        auto& b = t[dim + k];
        if (k % 2 == 1) {
            a[0] = -1.0; a[J(k)] = i; a[T(k)] = 1.0;
            b[0] = i; b[J(k)] = 1.0; b[T(k)] = i;
        } else {
            a[1] = i; a[J(k)] = 1.0; a[T(k)] = i;
            b[1] = -1.0; b[J(k)] = i; b[T(k)] = 1.0;
        }
    }
    for (int k = 0; k < dim; ++k) {
        for (auto& v : t[k]) v *= std::polar(1.0, angle[2 * k]);
        for (auto& v : t[dim + k]) v *= std::polar(1.0, angle[2 * k + 1]);
    }
    return t;
}

/// Normalized probabilities keyed by (u, v), u <= v.
inline std::map<std::pair<int, int>, double> expand(const Matrix& transfer, const TwoPhotonState& state) {
    const int dim = state.dim();
    const int cols = static_cast<int>(transfer[0].size());
    std::map<std::pair<int, int>, std::complex<double>> coeff;
    for (int u = 0; u < cols; ++u) {
        for (int v = u; v < cols; ++v) coeff[{u, v}] = 0.0;
    }
    for (int p = 0; p < dim; ++p) {
        for (int q = 0; q < dim; ++q) {
            for (int u = 0; u < cols; ++u) {
                for (int v = 0; v < cols; ++v) {
                    // a_p -> detector u, b_q -> detector v; the monomial u*v is commutative.
                    const auto term = state.amps(p, q) * transfer[p][u] * transfer[dim + q][v];
                    coeff[{std::min(u, v), std::max(u, v)}] += term;
                }
            }
        }
    }
    double total = 0.0;
    for (const auto& [key, c] : coeff) total += std::norm(c);
    std::map<std::pair<int, int>, double> out;
    for (const auto& [key, c] : coeff) out[key] = std::norm(c) / total;
    return out;
}

}  // namespace mkp::oracle
