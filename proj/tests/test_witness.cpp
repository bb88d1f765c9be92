#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gew/bloch.hpp"
#include "gew/witness.hpp"
#include "support.hpp"

using namespace gew;
using namespace gew::testing;

namespace {

DensityMatrix random_density(std::size_t da, std::size_t db, std::mt19937_64& rng) {
    return DensityMatrix(random_state(da * db, rng), Dims{da, db});
}

SeeSawOptions quick(std::size_t restarts = 8) {
    SeeSawOptions o;
    o.restarts = restarts;
    return o;
}

}  // namespace

TEST_CASE("geometric operator identities on random pairs") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const auto r1 = random_density(3, 3, rng), r2 = random_density(3, 3, rng);
        const auto g = geometric_operator(r1, r2);
        const double d2 = std::pow(hs_distance(r1.mat(), r2.mat()), 2);
        CHECK(std::abs(hs_inner(r1.mat(), g.g)) <= 1e-12);
        CHECK(std::abs(hs_inner(r2.mat(), g.g) + d2) <= 1e-12);
        CHECK(is_hermitian(g.g, 1e-14));
        // Tr(sigma G) = <sigma - rho1, rho1 - rho2> for any unit-trace sigma.
        const CMat s = random_state(9, rng);
        const cplx lhs = hs_inner(s, g.g);
        const cplx rhs = hs_inner(s - r1.mat(), r1.mat() - r2.mat());
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("geometric operator examples and errors") {
    const DensityMatrix mixed(CMat::identity(9) * cplx(1.0 / 9.0), 3, 3);
    const DensityMatrix bell(pure(phi_plus(3)), 3, 3);
    const auto g = geometric_operator(mixed, bell);
    CHECK(hs_inner(bell.mat(), g.g).real() == doctest::Approx(-8.0 / 9.0).epsilon(1e-14));
    CHECK_THROWS_AS(geometric_operator(bell, bell), std::invalid_argument);
    const DensityMatrix q(CMat::identity(4) * cplx(0.25), 2, 2);
    CHECK_THROWS_AS(geometric_operator(q, bell), std::invalid_argument);
}

TEST_CASE("shift operator") {
    std::mt19937_64 rng(111);
    for (int trial = 0; trial < 50; ++trial) {
        const ShiftFamily f(random_density(3, 3, rng), random_density(3, 3, rng));
        const double d2 = std::pow(f.length(), 2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double li = u(rng) * 0.999, l = u(rng);
        const auto a = shift_operator(f, li);
        const double lhs = hs_inner(f.state(l), a.g).real();
        CHECK(std::abs(lhs - (li - l) * (1.0 - li) * d2) <= 1e-10);
        CHECK(std::abs(hs_inner(f.state(li), a.g)) <= 1e-12);
        CHECK(std::abs(hs_inner(f.rho().mat(), a.g).real() + (1.0 - li) * (1.0 - li) * d2) <= 1e-12);
    }
    const ShiftFamily f(random_density(3, 3, rng), random_density(3, 3, rng));
    const auto g0 = shift_operator(f, 0.0);
    CHECK(max_abs_diff(g0.g, geometric_operator(f.rho_tilde(), f.rho()).g) < 1e-15);
    CHECK_THROWS_AS(shift_operator(f, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(shift_operator(f, -0.1), std::invalid_argument);
}

TEST_CASE("min_product_expectation basics") {
    const auto id = min_product_expectation(CMat::identity(9), Dims{3, 3}, quick());
    CHECK(id.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(id.s_min.has_value());
    CHECK(std::abs(*id.s_min) < 1e-12);
    CHECK_THROWS_AS(min_product_expectation(CMat{{1.0, 1.0}, {0.0, 1.0}}, Dims{2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(min_product_expectation(CMat::identity(9), Dims{2, 4}), std::invalid_argument);

    std::mt19937_64 rng(121);
    const auto w3 = weyl_basis(3);
    for (int trial = 0; trial < 10; ++trial) {
        CMat c = random_hermitian(9, rng);
        c += CMat::identity(9) * cplx(2.0);
        const auto opt = min_product_expectation(c, Dims{3, 3}, quick());
        const auto v = kron(std::span<const cplx>(opt.psi), std::span<const cplx>(opt.phi));
        CHECK(std::abs(hs_inner(CMat::outer(v), c).real() - opt.value) <= 1e-12);
        CHECK(opt.monotone);
        CHECK(opt.converged);
        for (std::size_t k = 1; k < opt.history.size(); ++k) CHECK(opt.history[k] <= opt.history[k - 1] + 1e-12);
        // value = delta mu (1 + S)
        const auto w = witness_form(decompose_op(c, w3, w3));
        REQUIRE(opt.s_min.has_value());
        CHECK(std::abs(w.delta * w.mu * (1.0 + *opt.s_min) - opt.value) <= 1e-12);
        // never below the global minimum eigenvalue
        CHECK(opt.value >= min_eigenvalue(c) - 1e-12);
    }
}

TEST_CASE("min_product_expectation is independent of the worker count") {
    std::mt19937_64 rng(131);
    const CMat c = random_hermitian(9, rng);
    SeeSawOptions one = quick(16), many = quick(16);
    many.jobs = 4;
    const auto a = min_product_expectation(c, Dims{3, 3}, one);
    const auto b = min_product_expectation(c, Dims{3, 3}, many);
    CHECK(a.value == b.value);
    CHECK(a.psi == b.psi);
    CHECK(a.history == b.history);
}

TEST_CASE("is_witness") {
    const auto id = is_witness(CMat::identity(9), Dims{3, 3}, quick());
    CHECK(id.witness);
    CHECK_FALSE(id.detecting);
    CHECK_FALSE(id.optimal);

    // Flip operator on two qubits' partial transpose: |phi+><phi+|^Gamma = SWAP/2.
    const CMat w = partial_transpose(pure(phi_plus(2)), Dims{2, 2});
    const auto r = is_witness(w, Dims{2, 2}, quick());
    CHECK(r.witness);
    CHECK(r.detecting);
    CHECK(r.optimal);

    std::mt19937_64 rng(141);
    for (int trial = 0; trial < 20; ++trial) {
        CMat c = random_hermitian(4, rng);
        c += CMat::identity(4) * cplx(trial % 3);
        const double k = std::exp(std::uniform_real_distribution<double>(-6.0, 6.0)(rng));
        CHECK(is_witness(c, Dims{2, 2}, quick()).witness == is_witness(cplx(k) * c, Dims{2, 2}, quick()).witness);
    }
}

TEST_CASE("two-qubit oracle") {
    std::mt19937_64 rng(151);
    const auto w2 = weyl_basis(2);
    const CMat x{{0.0, 1.0}, {1.0, 0.0}}, y{{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}}, z{{1.0, 0.0}, {0.0, -1.0}};
    const std::array<CMat, 3> pauli{x, y, z};
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.3, 1.8);
    int witnesses = 0, trials = 0;
    while (trials < 25) {
        CMat c = CMat::identity(4);
        std::array<double, 9> t{};
        double norm = 0.0;
        for (auto& v : t) norm += (v = g(rng)) * v;
        const double s = scale(rng) / std::sqrt(norm / 3.0);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) c += cplx(s * t[i * 3 + j]) * kron(pauli[i], pauli[j]);
        const auto f = svo(decompose_op(c, w2, w2));
        // Skip operators within 1e-3 of the decision boundary s_max = 1.
        if (std::abs(f.s.front() - 1.0) < 1e-3) continue;
        ++trials;
        const auto rep = is_witness(c, Dims{2, 2}, quick(16));
        CHECK(std::abs(rep.optimum.value - two_qubit_grid_min(c)) <= 1e-4);
        CHECK(rep.witness == (f.s.front() <= 1.0));
        witnesses += rep.witness;
    }
    CHECK(witnesses > 0);
    CHECK(witnesses < trials);
}

TEST_CASE("find_witness_crossing errors") {
    const DensityMatrix mixed(CMat::identity(9) * cplx(1.0 / 9.0), 3, 3);
    CHECK_THROWS_AS(find_witness_crossing(ShiftFamily(mixed, mixed), ShiftMode::outside_in), NoBracketError);

    // Both endpoints strictly inside the separable set: never a witness.
    std::vector<cplx> prod(9);
    prod[0] = 1.0;
    const CMat near = cplx(0.8) * mixed.mat() + cplx(0.2) * pure(prod);
    const ShiftFamily inner(mixed, DensityMatrix(near, 3, 3));
    CHECK_THROWS_AS(find_witness_crossing(inner, ShiftMode::outside_in, 1e-6, quick()), NoBracketError);
    CHECK_THROWS_AS(find_witness_crossing(inner, ShiftMode::outside_in, 0.0), std::invalid_argument);
}

TEST_CASE("outside-in crossing on an entangled line") {
    const DensityMatrix bell(pure(phi_plus(2)), 2, 2);
    const DensityMatrix mixed(CMat::identity(4) * cplx(0.25), 2, 2);
    const auto rep = find_witness_crossing(ShiftFamily(bell, mixed), ShiftMode::outside_in, 1e-6, quick());
    // Werner line: entangled iff the Bell weight exceeds 1/3.
    CHECK(rep.witness_above);
    CHECK(rep.upper - rep.lower <= 1e-6);
    CHECK(rep.lambda_star == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
    CHECK(rep.iterations <= 80);
    CHECK(rep.probes.size() == rep.iterations + 2);
}
