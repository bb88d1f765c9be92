#include "gew/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gew/parallel.hpp"

namespace gew {

namespace {

constexpr double kSameStateTol = 1e-12;

std::vector<cplx> random_unit(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> v(n);
    double s = 0.0;
    for (auto& x : v) {
        const double re = g(rng);
        x = {re, g(rng)};
        s += std::norm(x);
    }
    for (auto& x : v) x /= std::sqrt(s);
    return v;
}

// (1 x <phi|) C (1 x |phi>)
CMat reduce_on_b(const CMat& c, Dims dims, const std::vector<cplx>& phi) {
    CMat k(dims.a, dims.a);
    for (std::size_t i = 0; i < dims.a; ++i)
        for (std::size_t kk = 0; kk < dims.a; ++kk) {
            cplx s = 0.0;
            for (std::size_t j = 0; j < dims.b; ++j) {
                cplx row = 0.0;
                for (std::size_t l = 0; l < dims.b; ++l) row += c(i * dims.b + j, kk * dims.b + l) * phi[l];
                s += std::conj(phi[j]) * row;
            }
            k(i, kk) = s;
        }
    return k;
}

// (<psi| x 1) C (|psi> x 1)
CMat reduce_on_a(const CMat& c, Dims dims, const std::vector<cplx>& psi) {
    CMat k(dims.b, dims.b);
    for (std::size_t j = 0; j < dims.b; ++j)
        for (std::size_t l = 0; l < dims.b; ++l) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < dims.a; ++i) {
                cplx row = 0.0;
                for (std::size_t kk = 0; kk < dims.a; ++kk) row += c(i * dims.b + j, kk * dims.b + l) * psi[kk];
                s += std::conj(psi[i]) * row;
            }
            k(j, l) = s;
        }
    return k;
}

std::pair<double, std::vector<cplx>> lowest(const CMat& k) {
    const auto e = herm_eig(0.5 * (k + k.adjoint()));
    return {e.eigenvalues.front(), e.eigenvectors.column(0)};
}

double expectation(const CMat& c, const std::vector<cplx>& psi, const std::vector<cplx>& phi) {
    const auto v = kron(std::span<const cplx>(psi), std::span<const cplx>(phi));
    const auto cv = c * std::span<const cplx>(v);
    cplx s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += std::conj(v[i]) * cv[i];
    return s.real();
}

struct RunResult {
    std::vector<cplx> psi;
    std::vector<cplx> phi;
    double value = std::numeric_limits<double>::infinity();
    bool converged = false;
    bool monotone = true;
    std::vector<double> history;
};

RunResult see_saw(const CMat& c, Dims dims, std::vector<cplx> phi, const SeeSawOptions& opt, double scale) {
    RunResult run;
    double prev = std::numeric_limits<double>::infinity();
    std::vector<cplx> psi;
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        psi = lowest(reduce_on_b(c, dims, phi)).second;
        auto [value, next_phi] = lowest(reduce_on_a(c, dims, psi));
        phi = std::move(next_phi);
        run.history.push_back(value);
        if (value > prev + 1e-12 * scale) run.monotone = false;
        if (std::abs(prev - value) <= opt.tolerance * scale) {
            run.converged = true;
            break;
        }
        prev = value;
    }
    run.psi = std::move(psi);
    run.phi = std::move(phi);
    run.value = expectation(c, run.psi, run.phi);
    return run;
}

double spectral_norm(const EigResult& e) {
    return std::max(std::abs(e.eigenvalues.front()), std::abs(e.eigenvalues.back()));
}

}  // namespace

GeometricOperator geometric_operator(const DensityMatrix& rho1, const DensityMatrix& rho2) {
    if (!(rho1.dims() == rho2.dims()))
        throw std::invalid_argument("geometric_operator: states have different dimensions");
    const CMat diff = rho1.mat() - rho2.mat();
    if (diff.norm() <= kSameStateTol)
        throw std::invalid_argument("geometric_operator: rho1 and rho2 coincide");
    CMat g = diff - CMat::identity(rho1.dim()) * hs_inner(rho1.mat(), diff);
    return GeometricOperator{rho1, rho2, std::move(g)};
}

ProductOptimum min_product_expectation(const CMat& c, Dims dims, const SeeSawOptions& options) {
    if (!c.is_square() || c.rows() != dims.total())
        throw std::invalid_argument("min_product_expectation: operator size does not match dims");
    if (!is_hermitian(c)) throw std::invalid_argument("min_product_expectation: operator is not Hermitian");
    if (options.restarts == 0) throw std::invalid_argument("min_product_expectation: restarts must be >= 1");

    const double scale = std::max(1.0, c.max_abs());
    std::mt19937_64 rng(options.seed);
    std::vector<std::vector<cplx>> starts;
    starts.reserve(options.restarts);
    for (std::size_t r = 0; r < options.restarts; ++r) starts.push_back(random_unit(dims.b, rng));

    std::vector<RunResult> runs(options.restarts);
    parallel_for(options.restarts, options.jobs,
                 [&](std::size_t r) { runs[r] = see_saw(c, dims, starts[r], options, scale); });

    std::size_t best = 0;
    bool monotone = true;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        monotone = monotone && runs[r].monotone;
        if (runs[r].value < runs[best].value) best = r;
    }
    ProductOptimum out;
    out.psi = std::move(runs[best].psi);
    out.phi = std::move(runs[best].phi);
    out.value = runs[best].value;
    out.converged = runs[best].converged;
    out.history = std::move(runs[best].history);
    out.monotone = monotone;
    out.restarts_used = options.restarts;
    const double e = c.trace().real() / static_cast<double>(dims.total());
    if (e > 0.0) out.s_min = out.value / e - 1.0;
    return out;
}

WitnessReport is_witness(const CMat& c, Dims dims, const SeeSawOptions& options) {
    WitnessReport rep;
    rep.optimum = min_product_expectation(c, dims, options);
    const auto e = herm_eig(c);
    rep.min_eigenvalue = e.eigenvalues.front();
    rep.spectral_norm = spectral_norm(e);
    rep.witness = rep.optimum.value >= -kWitnessTol * rep.spectral_norm;
    rep.detecting = rep.min_eigenvalue < 0.0;
    rep.optimal = rep.witness && rep.detecting && std::abs(rep.optimum.value) <= kOptimalTol * rep.spectral_norm;
    return rep;
}

ShiftFamily::ShiftFamily(DensityMatrix rho, DensityMatrix rho_tilde)
    : rho_(std::move(rho)), rho_tilde_(std::move(rho_tilde)) {
    if (!(rho_.dims() == rho_tilde_.dims()))
        throw std::invalid_argument("ShiftFamily: endpoints have different dimensions");
}

double ShiftFamily::length() const { return hs_distance(rho_.mat(), rho_tilde_.mat()); }

CMat ShiftFamily::state(double lambda) const {
    return cplx(lambda) * rho_.mat() + cplx(1.0 - lambda) * rho_tilde_.mat();
}

GeometricOperator shift_operator(const ShiftFamily& family, double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw std::invalid_argument("shift_operator: lambda must lie in [0, 1)");
    if (family.length() <= kSameStateTol) throw std::invalid_argument("shift_operator: degenerate family");
    const CMat step = cplx(1.0 - lambda) * (family.rho_tilde().mat() - family.rho().mat());
    const CMat rho_l = family.state(lambda);
    CMat g = step - CMat::identity(rho_l.rows()) * hs_inner(rho_l, step);
    return GeometricOperator{DensityMatrix(rho_l, family.dims()), family.rho(), std::move(g)};
}

std::string to_string(ShiftMode mode) { return mode == ShiftMode::outside_in ? "outside_in" : "inside_out"; }

CrossingReport find_witness_crossing(const ShiftFamily& family, ShiftMode mode, double tol,
                                     const SeeSawOptions& options) {
    if (!(tol > 0.0 && tol < 0.5)) throw std::invalid_argument("find_witness_crossing: tol must lie in (0, 0.5)");
    if (family.length() <= kSameStateTol) throw NoBracketError("degenerate family: rho equals rho~");

    CrossingReport rep;
    rep.mode = mode;
    auto probe = [&](double lambda) {
        const auto g = shift_operator(family, lambda);
        auto w = is_witness(g.g, family.dims(), options);
        rep.probes.push_back({lambda, w.optimum.value, w.witness});
        return w;
    };

    double lo = 0.0, hi = 1.0 - tol;
    auto w_lo = probe(lo);
    auto w_hi = probe(hi);
    if (w_lo.witness == w_hi.witness)
        throw NoBracketError("witness status is " + std::string(w_lo.witness ? "true" : "false") +
                             " at both lambda = 0 and lambda = 1 - tol");
    rep.witness_above = w_hi.witness;
    ProductOptimum witness_side = rep.witness_above ? w_hi.optimum : w_lo.optimum;

    constexpr std::size_t kMaxIterations = 80;
    while (hi - lo > tol && rep.iterations < kMaxIterations) {
        ++rep.iterations;
        const double mid = 0.5 * (lo + hi);
        auto w = probe(mid);
        if (w.witness == rep.witness_above) {
            hi = mid;
            if (rep.witness_above) witness_side = std::move(w.optimum);
        } else {
            lo = mid;
            if (!rep.witness_above) witness_side = std::move(w.optimum);
        }
    }
    rep.lower = lo;
    rep.upper = hi;
    rep.lambda_star = rep.witness_above ? hi : lo;
    rep.optimum = std::move(witness_side);
    return rep;
}

}  // namespace gew
