#include "gew/simplex3.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "gew/bloch.hpp"
#include "gew/parallel.hpp"

namespace gew::simplex3 {

namespace {

const double kSqrt3 = std::sqrt(3.0);
constexpr double kInf = std::numeric_limits<double>::infinity();

const std::array<CMat, 9>& bell_matrices() {
    static const std::array<CMat, 9> cache = [] {
        std::array<CMat, 9> out;
        for (std::size_t n = 0; n < 3; ++n)
            for (std::size_t m = 0; m < 3; ++m) out[n * 3 + m] = bell_state(3, n, m).mat();
        return out;
    }();
    return cache;
}

FamilyPoint add(const FamilyPoint& p, const FamilyPoint& d, double t) {
    return {p.alpha + t * d.alpha, p.beta + t * d.beta, p.gamma + t * d.gamma};
}

double abg_norm(const FamilyPoint& d) { return std::sqrt(d.alpha * d.alpha + d.beta * d.beta + d.gamma * d.gamma); }

EuclidPoint cross(const EuclidPoint& u, const EuclidPoint& v) {
    return {u.b * v.c - u.c * v.b, u.c * v.a - u.a * v.c, u.a * v.b - u.b * v.a};
}

EuclidPoint sub(const EuclidPoint& u, const EuclidPoint& v) { return {u.a - v.a, u.b - v.b, u.c - v.c}; }

double dot(const EuclidPoint& u, const EuclidPoint& v) { return u.a * v.a + u.b * v.b + u.c * v.c; }

// Square root that turns negative arguments into negative results, so the
// root gap of a quadratic with no real roots is negative.
double signed_sqrt(double x) { return x >= 0.0 ? std::sqrt(x) : -std::sqrt(-x); }

bool all_nonneg(std::span<const double> m, double tol) {
    return std::all_of(m.begin(), m.end(), [tol](double x) { return x >= -tol; });
}

CMat weyl_pair(long n, long m) { return kron(weyl_operator(3, n, m), weyl_operator(3, -n, m)); }

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", x == 0.0 ? 0.0 : x);
    return buf;
}

}  // namespace

DensityMatrix bell_state(std::size_t d, std::size_t n, std::size_t m) {
    if (d < 2 || n >= d || m >= d) throw std::invalid_argument("bell_state: indices must lie in [0, d)");
    std::vector<cplx> phi(d * d);
    for (std::size_t j = 0; j < d; ++j) phi[j * d + j] = 1.0 / std::sqrt(static_cast<double>(d));
    const CMat u = kron(weyl_operator(d, static_cast<long>(n), static_cast<long>(m)), CMat::identity(d));
    const auto v = u * std::span<const cplx>(phi);
    return DensityMatrix(CMat::outer(v), Dims{d, d});
}

CMat family_matrix(const FamilyPoint& p) {
    const auto& pb = bell_matrices();
    CMat rho = CMat::identity(9) * cplx((1.0 - p.alpha - p.beta - p.gamma) / 9.0);
    rho += cplx(p.alpha) * pb[0];
    rho += cplx(p.beta / 2.0) * (pb[3] + pb[6]);
    rho += cplx(p.gamma / 3.0) * (pb[1] + pb[4] + pb[7]);
    return rho;
}

DensityMatrix family_state(const FamilyPoint& p) { return DensityMatrix(family_matrix(p), kDims); }

EuclidPoint to_euclid(const FamilyPoint& p) {
    return {p.alpha - p.beta / 8.0 - p.gamma / 8.0, kSqrt3 / 8.0 * (3.0 * p.beta - p.gamma), kSqrt3 / 4.0 * p.gamma};
}

FamilyPoint from_euclid(const EuclidPoint& e) {
    const double gamma = 4.0 * e.c / kSqrt3;
    const double beta = (8.0 * e.b / kSqrt3 + gamma) / 3.0;
    return {e.a + beta / 8.0 + gamma / 8.0, beta, gamma};
}

FamilyPoint project_to_family(const CMat& sigma) {
    if (!sigma.is_square() || sigma.rows() != 9)
        throw std::invalid_argument("project_to_family: expected a 9x9 operator");
    const auto& pb = bell_matrices();
    std::array<double, 9> q{};
    for (std::size_t k = 0; k < 9; ++k) q[k] = hs_inner(pb[k], sigma).real();
    // q indexed n*3+m
    const double k0 = (q[2] + q[5] + q[8]) / 3.0;
    return {q[0] - k0, q[3] + q[6] - 2.0 * k0, q[1] + q[4] + q[7] - 3.0 * k0};
}

CMat weyl_u1() {
    CMat u(9, 9);
    for (long n = 0; n < 3; ++n)
        for (long m = 1; m < 3; ++m) u += weyl_pair(n, m);
    return u;
}

CMat weyl_u2_i() { return weyl_pair(1, 0); }
CMat weyl_u2_ii() { return weyl_pair(2, 0); }

bool PositivityMargins::satisfied(double tol) const { return all_nonneg(margins, tol); }
bool PptMargins::satisfied(double tol) const { return all_nonneg(margins, tol); }
bool RealignMargins::satisfied(double tol) const { return all_nonneg(margins, tol); }

double delta_ppt(double beta, double gamma) {
    return 4.0 + 9.0 * beta * beta + 4.0 * gamma - 7.0 * gamma * gamma - 6.0 * beta * (2.0 + gamma);
}

namespace {

double delta1_sq(double beta, double gamma) {
    return 4.0 + 36.0 * beta + 81.0 * beta * beta - 12.0 * gamma - 54.0 * beta * gamma + 33.0 * gamma * gamma;
}

double delta2_sq(double beta, double gamma) {
    return 4.0 - 36.0 * beta + 81.0 * beta * beta + 12.0 * gamma - 54.0 * beta * gamma + 33.0 * gamma * gamma;
}

}  // namespace

double delta1(double beta, double gamma) {
    const double arg = delta1_sq(beta, gamma);
    if (arg < 0.0) throw std::domain_error("delta1: negative radicand");
    return std::sqrt(arg);
}

double delta2(double beta, double gamma) {
    const double arg = delta2_sq(beta, gamma);
    if (arg < 0.0) throw std::domain_error("delta2: negative radicand");
    return std::sqrt(arg);
}

double realign_surface_alpha(double beta, double gamma) {
    return (6.0 + 11.0 * beta - gamma - delta1(beta, gamma)) / 16.0;
}

PositivityMargins positivity_closed_form(const FamilyPoint& p) {
    const auto [a, b, g] = p;
    return {{3.5 * b + 1.0 - g - a, -b + 1.0 - g - a, -b + 1.0 + 2.0 * g - a, a - (b - 1.0 + g) / 8.0}};
}

PptMargins ppt_closed_form(const FamilyPoint& p) {
    const auto [a, b, g] = p;
    PptMargins m;
    m.discriminant = delta_ppt(b, g);
    const double root = 3.0 * signed_sqrt(m.discriminant);
    m.margins = {a + b + 0.5 - 0.5 * g, (-2.0 + 11.0 * b - g + root) / 16.0 - a,
                 a - (-2.0 + 11.0 * b - g - root) / 16.0, 2.0 - 2.0 * a - 2.0 * b + g};
    return m;
}

RealignMargins realign_closed_form(const FamilyPoint& p) {
    const auto [a, b, g] = p;
    RealignMargins m;
    m.delta1 = signed_sqrt(delta1_sq(b, g));
    m.delta2 = signed_sqrt(delta2_sq(b, g));
    m.margins = {(6.0 + 11.0 * b - g - m.delta1) / 16.0 - a, (6.0 + 11.0 * b - g + m.delta1) / 16.0 - a,
                 a - (-6.0 + 11.0 * b - g - m.delta2) / 16.0, a - (-6.0 + 11.0 * b - g + m.delta2) / 16.0};
    return m;
}

bool bound_region(const FamilyPoint& p) {
    const auto pos = positivity_closed_form(p);
    const auto ppt = ppt_closed_form(p);
    const auto re = realign_closed_form(p);
    return pos.margins[0] >= 0.0 && ppt.margins[1] >= 0.0 && re.margins[0] <= 0.0;
}

ConstraintReport constraint_report(const FamilyPoint& p) {
    return {positivity_closed_form(p), ppt_closed_form(p), realign_closed_form(p), bound_region(p)};
}

NumericMargins numeric_margins(const FamilyPoint& p) {
    const CMat rho = family_matrix(p);
    return {min_eigenvalue(rho), ppt_margin(rho, kDims), realignment_sum(rho, kDims)};
}

namespace {

using Expr = std::function<double(const FamilyPoint&)>;

struct ConstraintSet {
    std::string text;
    std::vector<Expr> exprs;
};

// Mismatches of the conjunction of sign_k * e_k >= -tol against the oracle.
std::size_t score(const ConstraintSet& set, const std::vector<bool>& dirs, const std::vector<FamilyPoint>& pts,
                  const std::vector<bool>& oracle) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool ok = true;
        for (std::size_t k = 0; k < set.exprs.size() && ok; ++k) {
            const double v = set.exprs[k](pts[i]);
            ok = dirs[k] ? v >= -kAgreementTol : v <= kAgreementTol;  // NaN fails both
        }
        bad += ok != oracle[i];
    }
    return bad;
}

ReconciliationEntry reconcile(const std::string& criterion, const ConstraintSet& printed,
                              const std::vector<bool>& printed_dirs, const ConstraintSet& built_in,
                              const std::vector<FamilyPoint>& pts, const std::vector<bool>& oracle) {
    ReconciliationEntry e;
    e.criterion = criterion;
    e.printed = printed.text;
    e.reconciled = built_in.text;
    e.printed_mismatches = score(printed, printed_dirs, pts, oracle);
    const std::size_t k = built_in.exprs.size();
    std::size_t best = std::numeric_limits<std::size_t>::max();
    // Enumerate from all-true downwards so the built-in assignment wins ties.
    for (std::size_t mask = (std::size_t{1} << k); mask-- > 0;) {
        std::vector<bool> dirs(k);
        for (std::size_t j = 0; j < k; ++j) dirs[j] = (mask >> (k - 1 - j)) & 1u;
        const std::size_t s = score(built_in, dirs, pts, oracle);
        if (s < best) {
            best = s;
            e.chosen_directions = dirs;
        }
    }
    e.reconciled_mismatches = best;
    e.matches_built_in = std::all_of(e.chosen_directions.begin(), e.chosen_directions.end(), [](bool b) { return b; });
    return e;
}

Expr margin_of(std::function<std::array<double, 4>(const FamilyPoint&)> f, std::size_t k) {
    return [f = std::move(f), k](const FamilyPoint& p) { return f(p)[k]; };
}

}  // namespace

ReconciliationLog reconcile_constraints(std::size_t samples, std::uint64_t seed) {
    ReconciliationLog log;
    log.samples = samples;
    log.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<FamilyPoint> pts(samples);
    for (auto& p : pts) {
        p.alpha = u(rng);
        p.beta = u(rng);
        p.gamma = u(rng);
    }
    std::vector<bool> pos_oracle, ppt_oracle, re_oracle;
    for (const auto& p : pts) {
        const auto n = numeric_margins(p);
        pos_oracle.push_back(n.positivity >= -kAgreementTol);
        ppt_oracle.push_back(n.ppt >= -kAgreementTol);
        re_oracle.push_back(n.realign_sum <= 1.0 + kAgreementTol);
    }

    auto pos = [](const FamilyPoint& p) { return positivity_closed_form(p).margins; };
    auto ppt = [](const FamilyPoint& p) { return ppt_closed_form(p).margins; };
    auto re = [](const FamilyPoint& p) { return realign_closed_form(p).margins; };

    const ConstraintSet pos_set{"a <= 7/2 b + 1 - g; a <= -b + 1 - g; a <= -b + 1 + 2g; a >= b/8 - 1/8 + g/8",
                                {margin_of(pos, 0), margin_of(pos, 1), margin_of(pos, 2), margin_of(pos, 3)}};
    log.entries.push_back(reconcile("positivity", pos_set, {true, true, true, true}, pos_set, pts, pos_oracle));

    const ConstraintSet ppt_printed{
        "a <= -b - 1/2 + g/2; a <= (-2 + 11b + 3 sqrt(D))/16; a >= (-2 + 11b - 3 sqrt(D))/16",
        {[](const FamilyPoint& p) { return -p.beta - 0.5 + 0.5 * p.gamma - p.alpha; },
         [](const FamilyPoint& p) {
             return (-2.0 + 11.0 * p.beta + 3.0 * std::sqrt(delta_ppt(p.beta, p.gamma))) / 16.0 - p.alpha;
         },
         [](const FamilyPoint& p) {
             return p.alpha - (-2.0 + 11.0 * p.beta - 3.0 * std::sqrt(delta_ppt(p.beta, p.gamma))) / 16.0;
         }}};
    const ConstraintSet ppt_set{
        "a >= -b - 1/2 + g/2; a <= (-2 + 11b - g + 3 sqrt(D))/16; a >= (-2 + 11b - g - 3 sqrt(D))/16; "
        "2 - 2a - 2b + g >= 0",
        {margin_of(ppt, 0), margin_of(ppt, 1), margin_of(ppt, 2), margin_of(ppt, 3)}};
    log.entries.push_back(reconcile("ppt", ppt_printed, {true, true, true}, ppt_set, pts, ppt_oracle));

    const ConstraintSet re_set{
        "a <= (6 + 11b - g - D1)/16; a <= (6 + 11b - g + D1)/16; a >= (-6 + 11b - g - D2)/16; "
        "a >= (-6 + 11b - g + D2)/16",
        {margin_of(re, 0), margin_of(re, 1), margin_of(re, 2), margin_of(re, 3)}};
    log.entries.push_back(reconcile("realignment", re_set, {true, true, true, true}, re_set, pts, re_oracle));
    return log;
}

void print(std::ostream& os, const ReconciliationLog& log) {
    os << "constraint reconciliation: " << log.samples << " points, seed " << log.seed << "\n";
    for (const auto& e : log.entries) {
        os << "  " << e.criterion << ": printed mismatches " << e.printed_mismatches << ", reconciled mismatches "
           << e.reconciled_mismatches << ", directions";
        for (bool b : e.chosen_directions) os << (b ? " +" : " -");
        os << (e.matches_built_in ? "" : " (differs from built-in)") << "\n";
        os << "    printed:    " << e.printed << "\n";
        os << "    reconciled: " << e.reconciled << "\n";
    }
}

namespace {

struct GReParts {
    FamilyPoint tangent;
    double a;
    cplx c;
};

GReParts g_re_parts(double beta_t, double gamma_t, double dc) {
    const double s = 2.0 + 9.0 * beta_t;
    const double den = s * s - 6.0 * s * gamma_t + 36.0 * gamma_t * gamma_t;
    if (den <= 1e-12) throw std::domain_error("g_re: singular tangent point (beta_t, gamma_t) = (-2/9, 0)");
    const double a = (-2.0 - 9.0 * beta_t + 3.0 * gamma_t + 3.0 * dc) / 36.0;
    const cplx c((9.0 * gamma_t * gamma_t + (-2.0 - 9.0 * beta_t + 3.0 * gamma_t) * dc) / den,
                 kSqrt3 * gamma_t * (2.0 + 9.0 * beta_t - 3.0 * gamma_t + 3.0 * dc) / den);
    const FamilyPoint t{realign_surface_alpha(beta_t, gamma_t), beta_t, gamma_t};
    return {t, a, c};
}

CMat weyl_combination(double a, double u1_sign, cplx c_u2i, cplx c_u2ii) {
    static const CMat u1 = weyl_u1(), u2i = weyl_u2_i(), u2ii = weyl_u2_ii();
    CMat g = CMat::identity(9) * cplx(2.0);
    g += cplx(u1_sign) * u1;
    g += c_u2i * u2i;
    g += c_u2ii * u2ii;
    g *= cplx(a);
    return g;
}

}  // namespace

GRe g_re(double beta_t, double gamma_t) {
    const auto parts = g_re_parts(beta_t, gamma_t, delta1(beta_t, gamma_t));
    const std::string defect = DensityMatrix::defect(family_matrix(parts.tangent), kDims);
    if (!defect.empty()) throw std::domain_error("g_re: tangent point is not a state (" + defect + ")");
    if (parts.a <= 0.0) throw std::domain_error("g_re: non-positive prefactor");
    // With U_nm as defined here, Tr(U2I rho) carries exp(-2 pi i/3) on gamma,
    // so c multiplies U2II for the plane to touch the surface.
    return {parts.tangent, parts.a, parts.c, weyl_combination(parts.a, -1.0, std::conj(parts.c), parts.c)};
}

std::vector<GReVariant> g_re_variants(double beta_t, double gamma_t) {
    const double b = beta_t, g = gamma_t;
    const double printed_arg = 4.0 + 36.0 + 81.0 * b * b - 12.0 * g - 54.0 * b * g + 33.0 * g * g;
    const std::array<std::pair<std::string, double>, 2> constants{
        {{"printed constant", std::sqrt(std::max(0.0, printed_arg))}, {"delta1", delta1(b, g)}}};
    std::vector<GReVariant> out;
    for (const auto& [label, dc] : constants) {
        const auto parts = g_re_parts(b, g, dc);
        const CMat rho_t = family_matrix(parts.tangent);
        for (bool on_u2ii : {false, true}) {
            const CMat op = on_u2ii ? weyl_combination(parts.a, -1.0, std::conj(parts.c), parts.c)
                                    : weyl_combination(parts.a, -1.0, parts.c, std::conj(parts.c));
            out.push_back({label + (on_u2ii ? ", c on U2II" : ", c on U2I"), std::abs(parts.c),
                           hs_inner(op, rho_t).real()});
        }
    }
    return out;
}

std::vector<std::pair<double, double>> g_re_lattice(std::size_t n) {
    if (n < 2) throw std::invalid_argument("g_re_lattice: n must be >= 2");
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double b = -0.4 + 0.6 * static_cast<double>(i) / static_cast<double>(n - 1);
            const double g = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n - 1);
            try {
                (void)g_re(b, g);
                out.emplace_back(b, g);
            } catch (const std::domain_error&) {
            }
        }
    return out;
}

std::array<FamilyPoint, 5> kernel_vertices() {
    return {{{0.0, 0.0, 1.0},
             {-1.0 / 12.0, 1.0 / 3.0, 0.0},
             {1.0 / 3.0, 2.0 / 3.0, 0.0},
             {2.0 / 9.0, -2.0 / 9.0, 0.0},
             {-1.0 / 3.0, -2.0 / 3.0, -1.0}}};
}

FamilyPoint kernel_interior_corner() { return {-1.0 / 6.0, -1.0 / 3.0, 0.0}; }

std::array<PolygonOp, 4> polygon_ops() {
    const cplx plus(-1.0, kSqrt3), minus(-1.0, -kSqrt3);
    const double a = 1.0 / 63.0;
    // c (printed) multiplies U2II, its conjugate U2I; see g_re.
    return {{{"G^u+", {1, 3, 4}, weyl_combination(a, -1.0, std::conj(plus), plus)},
             {"G^u-", {3, 4, 5}, weyl_combination(a, -1.0, std::conj(minus), minus)},
             {"G^d+", {1, 2, 3}, weyl_combination(a, +1.0, std::conj(plus), plus)},
             {"G^d-", {2, 3, 5}, weyl_combination(a, +1.0, std::conj(minus), minus)}}};
}

namespace {

// Unit outward normal (Euclidean) of the plane through three points.
EuclidPoint outward_normal(const FamilyPoint& p1, const FamilyPoint& p2, const FamilyPoint& p3,
                           const FamilyPoint& inside) {
    const EuclidPoint e1 = to_euclid(p1);
    EuclidPoint n = cross(sub(to_euclid(p2), e1), sub(to_euclid(p3), e1));
    const double len = std::sqrt(dot(n, n));
    if (len < 1e-14) throw std::invalid_argument("plane through collinear points");
    n = {n.a / len, n.b / len, n.c / len};
    const double side = dot(n, sub(to_euclid(inside), e1));
    if (std::abs(side) < 1e-14) throw std::invalid_argument("reference point lies on the plane");
    if (side > 0.0) n = {-n.a, -n.b, -n.c};
    return n;
}

FamilyPoint kernel_centroid() {
    FamilyPoint c;
    for (const auto& v : kernel_vertices()) c = add(c, v, 0.2);
    return c;
}

}  // namespace

CMat plane_operator(const FamilyPoint& p1, const FamilyPoint& p2, const FamilyPoint& p3,
                    const FamilyPoint& inside) {
    const EuclidPoint n = outward_normal(p1, p2, p3, inside);
    const EuclidPoint e1 = to_euclid(p1);
    const CMat rho_a = family_matrix(p1);
    const CMat rho_b = family_matrix(from_euclid({e1.a + 0.1 * n.a, e1.b + 0.1 * n.b, e1.c + 0.1 * n.c}));
    const CMat diff = rho_a - rho_b;
    CMat g = diff - CMat::identity(9) * hs_inner(rho_a, diff);
    const double e = g.trace().real() / 9.0;
    if (e <= 0.0) throw std::invalid_argument("plane_operator: maximally mixed state is not on the inner side");
    g *= cplx((2.0 / 63.0) / e);
    return g;
}

FamilyPoint horodecki_point(double b) {
    if (!(b >= 0.0 && b <= 5.0)) throw std::invalid_argument("horodecki: b must lie in [0, 5]");
    return {(6.0 - b) / 21.0, -2.0 * b / 21.0, (5.0 - 2.0 * b) / 7.0};
}

DensityMatrix horodecki(double b) { return family_state(horodecki_point(b)); }

double pyramid_exit(const FamilyPoint& p, const FamilyPoint& dir) {
    const auto m0 = positivity_closed_form(p).margins;
    const auto m1 = positivity_closed_form(add(p, dir, 1.0)).margins;
    double t = kInf;
    for (std::size_t k = 0; k < 4; ++k) {
        const double slope = m1[k] - m0[k];
        if (slope < 0.0) t = std::min(t, std::max(0.0, -m0[k] / slope));
    }
    return t;
}

double criteria_exit(const FamilyPoint& p, const FamilyPoint& dir, double max_t, double tol) {
    auto inside = [&](double t) {
        const auto n = numeric_margins(add(p, dir, t));
        return n.ppt >= -kCriterionTol && n.realign_sum <= 1.0 + kCriterionTol;
    };
    const bool start_inside = inside(0.0);
    // Search forward from an inside point, backward from an outside one.
    const double sign = start_inside ? 1.0 : -1.0;
    double lo = 0.0, hi = max_t;
    if (inside(sign * hi) == start_inside) return sign * kInf;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (inside(sign * mid) == start_inside ? lo : hi) = mid;
    }
    return sign * 0.5 * (lo + hi);
}

FaceFamily inside_out_family(const PolygonOp& op) {
    const auto v = kernel_vertices();
    const FamilyPoint& p1 = v[op.vertices[0] - 1];
    const FamilyPoint& p2 = v[op.vertices[1] - 1];
    const FamilyPoint& p3 = v[op.vertices[2] - 1];
    FamilyPoint inner;
    for (const auto* p : {&p1, &p2, &p3}) inner = add(inner, *p, 1.0 / 3.0);
    const EuclidPoint n = outward_normal(p1, p2, p3, kernel_centroid());
    FamilyPoint dir = from_euclid(n);
    const double len = abg_norm(dir);
    dir = {dir.alpha / len, dir.beta / len, dir.gamma / len};
    const double t = pyramid_exit(inner, dir);
    if (!std::isfinite(t) || t <= 0.0) throw std::runtime_error("inside_out_family: ray does not leave the pyramid");
    const FamilyPoint outer = add(inner, dir, t);
    return {inner, outer, dir, ShiftFamily(family_state(outer), family_state(inner))};
}

TangencyReport inside_out_tangency(const PolygonOp& op, double tol, const SeeSawOptions& options) {
    const auto face = inside_out_family(op);
    TangencyReport rep{op.name, find_witness_crossing(face.family, ShiftMode::inside_out, tol, options), {}, 0, 0, 0};
    const auto v = kron(std::span<const cplx>(rep.crossing.optimum.psi), std::span<const cplx>(rep.crossing.optimum.phi));
    rep.tangent = project_to_family(CMat::outer(v));
    const auto n = numeric_margins(rep.tangent);
    rep.ppt_margin = n.ppt;
    rep.realign_sum = n.realign_sum;
    rep.boundary_distance = criteria_exit(rep.tangent, face.normal, 0.5);
    return rep;
}

namespace {

ScanRow scan_point(const FamilyPoint& p) {
    ScanRow row;
    row.p = p;
    row.e = to_euclid(p);
    const CMat rho = family_matrix(p);
    const Verdict v = classify(rho, kDims);
    row.label = v.label;
    row.pos_margin = v.min_eigenvalue;
    row.ppt_margin = v.ppt_margin;
    row.realign_sum = v.realignment_sum;
    const auto c = constraint_report(p);
    row.closed_form_agrees = c.positivity.satisfied(kAgreementTol) == (row.pos_margin >= -kAgreementTol) &&
                             c.ppt.satisfied(kAgreementTol) == (row.ppt_margin >= -kAgreementTol) &&
                             c.realign.satisfied(kAgreementTol) == (row.realign_sum <= 1.0 + kAgreementTol);
    return row;
}

double grid_value(double lo, double hi, std::size_t i, std::size_t n) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

void check_grid(std::size_t n, double lo, double hi) {
    if (n < 2) throw std::invalid_argument("scan: grid resolution must be >= 2");
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("scan: empty box");
}

}  // namespace

std::vector<ScanRow> scan(std::size_t n, double lo, double hi, std::size_t jobs) {
    check_grid(n, lo, hi);
    std::vector<ScanRow> rows(n * n * n);
    parallel_for(rows.size(), jobs, [&](std::size_t idx) {
        const std::size_t i = idx / (n * n), j = (idx / n) % n, k = idx % n;
        rows[idx] = scan_point({grid_value(lo, hi, i, n), grid_value(lo, hi, j, n), grid_value(lo, hi, k, n)});
    });
    return rows;
}

std::vector<ScanRow> scan_slice(std::size_t n, double lo, double hi, double gamma, std::size_t jobs) {
    check_grid(n, lo, hi);
    std::vector<ScanRow> rows(n * n);
    parallel_for(rows.size(), jobs, [&](std::size_t idx) {
        rows[idx] = scan_point({grid_value(lo, hi, idx / n, n), grid_value(lo, hi, idx % n, n), gamma});
    });
    return rows;
}

void write_obj(std::ostream& os, std::size_t n) {
    if (n < 2) throw std::invalid_argument("write_obj: grid resolution must be >= 2");
    std::size_t next_index = 1;
    auto vertex = [&](const FamilyPoint& p) {
        const auto e = to_euclid(p);
        os << "v " << fmt(e.a) << ' ' << fmt(e.b) << ' ' << fmt(e.c) << "\n";
        return next_index++;
    };

    // Pyramid: planes n_k . (a, b, g) = r_k, one per positivity constraint.
    const std::array<std::array<double, 4>, 4> planes{{{1.0, -3.5, 1.0, 1.0},
                                                       {1.0, 1.0, 1.0, 1.0},
                                                       {1.0, 1.0, -2.0, 1.0},
                                                       {1.0, -0.125, -0.125, -0.125}}};
    auto solve3 = [](const std::array<std::array<double, 4>, 3>& r) {
        auto det = [](double a, double b, double c, double d, double e, double f, double g, double h, double i) {
            return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
        };
        const double d = det(r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2]);
        const double x = det(r[0][3], r[0][1], r[0][2], r[1][3], r[1][1], r[1][2], r[2][3], r[2][1], r[2][2]) / d;
        const double y = det(r[0][0], r[0][3], r[0][2], r[1][0], r[1][3], r[1][2], r[2][0], r[2][3], r[2][2]) / d;
        const double z = det(r[0][0], r[0][1], r[0][3], r[1][0], r[1][1], r[1][3], r[2][0], r[2][1], r[2][3]) / d;
        return FamilyPoint{x, y, z};
    };
    os << "o pyramid\n";
    std::array<std::size_t, 4> apex{};  // apex[k]: vertex opposite face k
    for (std::size_t k = 0; k < 4; ++k) {
        std::array<std::array<double, 4>, 3> rows{};
        for (std::size_t j = 0, r = 0; j < 4; ++j)
            if (j != k) rows[r++] = planes[j];
        apex[k] = vertex(solve3(rows));
    }
    for (std::size_t k = 0; k < 4; ++k) {
        os << 'f';
        for (std::size_t j = 0; j < 4; ++j)
            if (j != k) os << ' ' << apex[j];
        os << "\n";
    }

    // Height fields alpha = f(beta, gamma), kept where inside the pyramid.
    auto surface = [&](const std::string& name, const std::function<double(double, double)>& f) {
        os << "o " << name << "\n";
        std::vector<std::size_t> idx(n * n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double b = grid_value(-1.0, 1.0, i, n), g = grid_value(-1.0, 1.0, j, n);
                const double a = f(b, g);
                if (!std::isfinite(a)) continue;
                const FamilyPoint p{a, b, g};
                if (positivity_closed_form(p).satisfied(1e-9)) idx[i * n + j] = vertex(p);
            }
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = 0; j + 1 < n; ++j) {
                const std::size_t v00 = idx[i * n + j], v01 = idx[i * n + j + 1];
                const std::size_t v10 = idx[(i + 1) * n + j], v11 = idx[(i + 1) * n + j + 1];
                if (v00 && v01 && v10 && v11) os << "f " << v00 << ' ' << v10 << ' ' << v11 << ' ' << v01 << "\n";
            }
    };
    auto ppt_root = [](double sign) {
        return [sign](double b, double g) {
            const double d = delta_ppt(b, g);
            if (d < 0.0) return std::numeric_limits<double>::quiet_NaN();
            return (-2.0 + 11.0 * b - g + sign * 3.0 * std::sqrt(d)) / 16.0;
        };
    };
    surface("ppt_upper", ppt_root(+1.0));
    surface("ppt_lower", ppt_root(-1.0));
    surface("realignment", [](double b, double g) { return realign_surface_alpha(b, g); });
}

}  // namespace gew::simplex3
