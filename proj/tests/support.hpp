#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gew/matrix.hpp"

namespace gew::testing {

inline cplx gauss_c(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    const double re = g(rng);
    return {re, g(rng)};
}

inline CMat random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    CMat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = gauss_c(rng);
    return m;
}

inline CMat random_hermitian(std::size_t n, std::mt19937_64& rng) {
    const CMat m = random_matrix(n, n, rng);
    return 0.5 * (m + m.adjoint());
}

inline std::vector<cplx> random_unit(std::size_t n, std::mt19937_64& rng) {
    std::vector<cplx> v(n);
    double s = 0.0;
    for (auto& x : v) {
        x = gauss_c(rng);
        s += std::norm(x);
    }
    for (auto& x : v) x /= std::sqrt(s);
    return v;
}

/// Ginibre-distributed mixed state of full rank.
inline CMat random_state(std::size_t n, std::mt19937_64& rng) {
    const CMat m = random_matrix(n, n, rng);
    CMat rho = m * m.adjoint();
    rho *= 1.0 / rho.trace().real();
    return rho;
}

inline CMat pure(std::span<const cplx> v) { return CMat::outer(v); }

inline std::vector<cplx> phi_plus(std::size_t d) {
    std::vector<cplx> v(d * d);
    for (std::size_t j = 0; j < d; ++j) v[j * d + j] = 1.0 / std::sqrt(static_cast<double>(d));
    return v;
}

// Smallest eigenvalue of a 2x2 Hermitian matrix in closed form.
inline double min_eig_2x2(cplx a, cplx b, cplx d) {
    const double ar = a.real(), dr = d.real();
    return 0.5 * (ar + dr) - std::sqrt(0.25 * (ar - dr) * (ar - dr) + std::norm(b));
}

// min over psi of min eig of (<psi| x 1) C (|psi> x 1) for a 4x4 C.
inline double inner_min(const CMat& c, double theta, double phi) {
    const cplx p0(std::cos(theta / 2.0), 0.0);
    const cplx p1 = std::polar(std::sin(theta / 2.0), phi);
    const std::array<cplx, 2> psi{p0, p1};
    cplx k[2][2]{};
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t l = 0; l < 2; ++l)
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t kk = 0; kk < 2; ++kk)
                    k[j][l] += std::conj(psi[i]) * c(i * 2 + j, kk * 2 + l) * psi[kk];
    return min_eig_2x2(k[0][0], k[0][1], k[1][1]);
}

// Grid over party A's Bloch sphere (200 x 400 angles) with the exact
// minimum over party B, then local refinement of the best cell.
inline double two_qubit_grid_min(const CMat& c) {
    constexpr int nt = 200, np = 400;
    const double pi = std::numbers::pi;
    double best = 1e300, bt = 0.0, bp = 0.0;
    for (int i = 0; i <= nt; ++i)
        for (int j = 0; j < np; ++j) {
            const double t = pi * i / nt, p = 2.0 * pi * j / np;
            const double v = inner_min(c, t, p);
            if (v < best) {
                best = v;
                bt = t;
                bp = p;
            }
        }
    double st = pi / nt, sp = 2.0 * pi / np;
    for (int round = 0; round < 40; ++round) {
        for (int i = -4; i <= 4; ++i)
            for (int j = -4; j <= 4; ++j) {
                const double t = bt + st * i / 4.0, p = bp + sp * j / 4.0;
                const double v = inner_min(c, t, p);
                if (v < best) {
                    best = v;
                    bt = t;
                    bp = p;
                }
            }
        st *= 0.5;
        sp *= 0.5;
    }
    return best;
}

}  // namespace gew::testing
