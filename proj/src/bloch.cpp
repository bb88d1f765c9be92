#include "gew/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gew {

namespace {

constexpr double kBasisTol = 1e-10;

std::size_t wrap(long x, std::size_t d) {
    const long dd = static_cast<long>(d);
    return static_cast<std::size_t>(((x % dd) + dd) % dd);
}

double max_abs(std::span<const cplx> v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

OperatorBasis rotate(const OperatorBasis& basis, const CMat& coeffs) {
    // D_i = sum_j coeffs(i, j) A_j
    OperatorBasis out;
    out.dim = basis.dim;
    out.norm = basis.norm;
    out.units.reserve(basis.units.size());
    for (std::size_t i = 0; i < basis.units.size(); ++i) {
        CMat d(basis.dim, basis.dim);
        for (std::size_t j = 0; j < basis.units.size(); ++j)
            if (coeffs(i, j) != cplx{}) d += coeffs(i, j) * basis.units[j];
        out.units.push_back(std::move(d));
    }
    return out;
}

}  // namespace

OperatorBasis OperatorBasis::from_units(std::vector<CMat> units) {
    if (units.empty()) throw std::invalid_argument("OperatorBasis: no units");
    const std::size_t d = units.front().rows();
    if (d < 2 || units.size() != d * d - 1)
        throw std::invalid_argument("OperatorBasis: need d^2-1 units of size d x d, d >= 2");
    for (const auto& u : units) {
        if (u.rows() != d || u.cols() != d)
            throw std::invalid_argument("OperatorBasis: unit size mismatch");
        if (std::abs(u.trace()) > kBasisTol)
            throw std::invalid_argument("OperatorBasis: unit is not traceless");
    }
    const double n = hs_inner(units[0], units[0]).real();
    for (std::size_t i = 0; i < units.size(); ++i)
        for (std::size_t j = 0; j < units.size(); ++j) {
            const cplx g = hs_inner(units[i], units[j]);
            const double want = i == j ? n : 0.0;
            if (std::abs(g - want) > kBasisTol * std::max(1.0, n))
                throw std::invalid_argument("OperatorBasis: units are not orthogonal with common norm");
        }
    return OperatorBasis{d, std::move(units), n};
}

double OperatorBasis::scale() const {
    const double d = static_cast<double>(dim);
    return std::sqrt(d * (d - 1.0) / norm);
}

CMat weyl_operator(std::size_t d, long n, long m) {
    if (d < 2) throw std::invalid_argument("weyl_operator: d must be >= 2");
    const std::size_t nn = wrap(n, d), mm = wrap(m, d);
    CMat u(d, d);
    for (std::size_t k = 0; k < d; ++k) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(k * nn) / static_cast<double>(d);
        u(k, (k + mm) % d) = std::polar(1.0, phase);
    }
    return u;
}

std::size_t weyl_index(std::size_t d, long n, long m) {
    const std::size_t idx = wrap(n, d) * d + wrap(m, d);
    if (idx == 0) throw std::invalid_argument("weyl_index: U_00 is the identity");
    return idx - 1;
}

OperatorBasis weyl_basis(std::size_t d) {
    if (d < 2) throw std::invalid_argument("weyl_basis: d must be >= 2");
    std::vector<CMat> units;
    units.reserve(d * d - 1);
    for (std::size_t n = 0; n < d; ++n)
        for (std::size_t m = 0; m < d; ++m)
            if (n != 0 || m != 0) units.push_back(weyl_operator(d, static_cast<long>(n), static_cast<long>(m)));
    return OperatorBasis{d, std::move(units), static_cast<double>(d)};
}

OpDecomp decompose_op(const CMat& op, const OperatorBasis& basis_a, const OperatorBasis& basis_b) {
    const std::size_t da = basis_a.dim, db = basis_b.dim;
    if (!op.is_square() || op.rows() != da * db)
        throw std::invalid_argument("decompose_op: operator size " + std::to_string(op.rows()) +
                                    " does not match bases " + std::to_string(da) + "x" +
                                    std::to_string(db));
    const CMat id_a = CMat::identity(da), id_b = CMat::identity(db);
    const double na = basis_a.norm, nb = basis_b.norm;
    OpDecomp dec;
    dec.basis_a = basis_a;
    dec.basis_b = basis_b;
    dec.e = op.trace() / static_cast<double>(da * db);
    dec.a.resize(basis_a.units.size());
    dec.b.resize(basis_b.units.size());
    dec.c = CMat(basis_a.units.size(), basis_b.units.size());
    for (std::size_t i = 0; i < basis_a.units.size(); ++i)
        dec.a[i] = hs_inner(kron(basis_a.units[i], id_b), op) / (na * static_cast<double>(db));
    for (std::size_t j = 0; j < basis_b.units.size(); ++j)
        dec.b[j] = hs_inner(kron(id_a, basis_b.units[j]), op) / (nb * static_cast<double>(da));
    for (std::size_t i = 0; i < basis_a.units.size(); ++i)
        for (std::size_t j = 0; j < basis_b.units.size(); ++j)
            dec.c(i, j) = hs_inner(kron(basis_a.units[i], basis_b.units[j]), op) / (na * nb);
    return dec;
}

CMat reconstruct(const OpDecomp& dec) {
    const std::size_t da = dec.basis_a.dim, db = dec.basis_b.dim;
    const CMat id_a = CMat::identity(da), id_b = CMat::identity(db);
    CMat out = dec.e * CMat::identity(da * db);
    for (std::size_t i = 0; i < dec.a.size(); ++i)
        if (dec.a[i] != cplx{}) out += dec.a[i] * kron(dec.basis_a.units[i], id_b);
    for (std::size_t j = 0; j < dec.b.size(); ++j)
        if (dec.b[j] != cplx{}) out += dec.b[j] * kron(id_a, dec.basis_b.units[j]);
    for (std::size_t i = 0; i < dec.c.rows(); ++i)
        for (std::size_t j = 0; j < dec.c.cols(); ++j)
            if (dec.c(i, j) != cplx{}) out += dec.c(i, j) * kron(dec.basis_a.units[i], dec.basis_b.units[j]);
    return out;
}

SvoForm svo(const OpDecomp& dec) {
    if (dec.basis_a.dim != dec.basis_b.dim)
        throw std::invalid_argument("svo: subsystem dimensions differ");
    // c = W S X^dagger, so U = W^dagger and V = X^dagger.
    const SvdResult f = svd(dec.c);
    const std::size_t k = dec.c.rows();
    CMat rot_a(k, k), rot_b(k, k);  // D^A_i = sum_j W_ji A_j, D^B_i = sum_j conj(X_ji) B_j
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            rot_a(i, j) = f.u(j, i);
            rot_b(i, j) = std::conj(f.v(j, i));
        }
    SvoForm out;
    out.e = dec.e;
    out.s = f.singular_values;
    out.rotated_a = rotate(dec.basis_a, rot_a);
    out.rotated_b = rotate(dec.basis_b, rot_b);
    out.r.assign(k, 0.0);
    out.t.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            out.r[i] += dec.a[j] * std::conj(f.u(j, i));  // r_i = sum_j a_j u_ij
            out.t[i] += dec.b[j] * f.v(j, i);             // t_i = sum_j b_j v*_ij
        }
    return out;
}

CMat reconstruct(const SvoForm& form) {
    const std::size_t d = form.rotated_a.dim;
    const CMat id = CMat::identity(d);
    CMat out = form.e * CMat::identity(d * d);
    for (std::size_t i = 0; i < form.r.size(); ++i) {
        out += form.r[i] * kron(form.rotated_a.units[i], id);
        out += form.t[i] * kron(id, form.rotated_b.units[i]);
        out += form.s[i] * kron(form.rotated_a.units[i], form.rotated_b.units[i]);
    }
    return out;
}

WitnessForm witness_form(const OpDecomp& dec) {
    const double scale = std::max({std::abs(dec.e), max_abs(dec.a), max_abs(dec.b), dec.c.max_abs()});
    if (std::abs(dec.e.imag()) > 1e-12 * std::max(1.0, scale))
        throw std::invalid_argument("witness_form: identity coefficient is not real");
    const double e = dec.e.real();
    if (std::abs(e) <= 1e-14 * std::max(1.0, scale))
        throw std::invalid_argument("witness_form: identity coefficient vanishes (delta = 0)");
    const double da = static_cast<double>(dec.basis_a.dim), db = static_cast<double>(dec.basis_b.dim);
    WitnessForm w;
    w.mu = std::sqrt((da - 1.0) * (db - 1.0));
    w.negated = e < 0.0;
    const double sign = w.negated ? -1.0 : 1.0;
    w.delta = sign * e / w.mu;
    const cplx k = sign / w.delta;
    w.normalized = dec;
    w.normalized.e = w.mu;
    for (auto& x : w.normalized.a) x *= k;
    for (auto& x : w.normalized.b) x *= k;
    w.normalized.c *= k;
    return w;
}

SvoForm witness_svo(const WitnessForm& w) { return svo(w.normalized); }

SCoefficients s_coefficients(const OperatorBasis& basis_a, const OperatorBasis& basis_b) {
    const double da = static_cast<double>(basis_a.dim), db = static_cast<double>(basis_b.dim);
    const double na = basis_a.norm, nb = basis_b.norm;
    return {std::sqrt(na / (da * (db - 1.0))), std::sqrt(nb / (db * (da - 1.0))),
            std::sqrt(na * nb / (da * db))};
}

double s_value(const WitnessForm& w, std::span<const cplx> n, std::span<const cplx> m) {
    const auto& dec = w.normalized;
    if (n.size() != dec.a.size() || m.size() != dec.b.size())
        throw std::invalid_argument("s_value: Bloch vector length mismatch");
    const auto k = s_coefficients(dec.basis_a, dec.basis_b);
    cplx la = 0.0, lb = 0.0, corr = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) la += dec.a[i] * std::conj(n[i]);
    for (std::size_t j = 0; j < m.size(); ++j) lb += dec.b[j] * std::conj(m[j]);
    for (std::size_t i = 0; i < n.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) corr += dec.c(i, j) * std::conj(n[i]) * std::conj(m[j]);
    return (k.local_a * la + k.local_b * lb + k.correlation * corr).real();
}

double s_value(const SvoForm& normalized, std::span<const cplx> n, std::span<const cplx> m) {
    if (n.size() != normalized.r.size() || m.size() != normalized.t.size())
        throw std::invalid_argument("s_value: Bloch vector length mismatch");
    const auto k = s_coefficients(normalized.rotated_a, normalized.rotated_b);
    cplx la = 0.0, lb = 0.0, corr = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        la += normalized.r[i] * std::conj(n[i]);
        lb += normalized.t[i] * std::conj(m[i]);
        corr += normalized.s[i] * std::conj(n[i]) * std::conj(m[i]);
    }
    return (k.local_a * la + k.local_b * lb + k.correlation * corr).real();
}

std::vector<cplx> bloch_vector(const CMat& rho, const OperatorBasis& basis) {
    if (!rho.is_square() || rho.rows() != basis.dim)
        throw std::invalid_argument("bloch_vector: state size does not match basis");
    const double k = static_cast<double>(basis.dim) / (basis.scale() * basis.norm);
    std::vector<cplx> n(basis.units.size());
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = k * hs_inner(basis.units[i], rho);
    return n;
}

CMat state_from_bloch(std::span<const cplx> n, const OperatorBasis& basis) {
    if (n.size() != basis.units.size())
        throw std::invalid_argument("state_from_bloch: Bloch vector length mismatch");
    CMat rho = CMat::identity(basis.dim);
    const double f = basis.scale();
    for (std::size_t i = 0; i < n.size(); ++i) rho += (f * n[i]) * basis.units[i];
    rho *= 1.0 / static_cast<double>(basis.dim);
    return rho;
}

bool lemma1_check(const SvoForm& normalized) {
    if (normalized.rotated_a.dim != normalized.rotated_b.dim)
        throw std::invalid_argument("lemma1_check: subsystem dimensions differ");
    if (max_abs(normalized.r) > 1e-10 || max_abs(normalized.t) > 1e-10)
        throw std::invalid_argument("lemma1_check: local Bloch parts do not vanish");
    const auto k = s_coefficients(normalized.rotated_a, normalized.rotated_b);
    const double smax = normalized.s.empty() ? 0.0 : normalized.s.front();
    return k.correlation * smax <= 1.0 + 1e-12;
}

}  // namespace gew
