#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gew/criteria.hpp"
#include "gew/matrix.hpp"
#include "gew/witness.hpp"

namespace gew::simplex3 {

inline constexpr Dims kDims{3, 3};

/// P_nm = (U_nm x 1)|phi+><phi+|(U_nm^dagger x 1). Throws for n, m outside [0, d).
DensityMatrix bell_state(std::size_t d, std::size_t n, std::size_t m);

struct FamilyPoint {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

struct EuclidPoint {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// (1-a-b-g)/9 1 + a P00 + b/2 (P10 + P20) + g/3 (P01 + P11 + P21).
/// Hermitian with unit trace; positive only inside the pyramid.
CMat family_matrix(const FamilyPoint& p);
/// Throws std::invalid_argument outside the positivity pyramid.
DensityMatrix family_state(const FamilyPoint& p);

EuclidPoint to_euclid(const FamilyPoint& p);
FamilyPoint from_euclid(const EuclidPoint& e);
/// ||rho(p) - rho(q)||_HS = kHsPerEuclid |E(p) - E(q)|.
inline constexpr double kHsPerEuclid = 0.94280904158206336587;  // sqrt(8/9)

/// Bell-state weights q_nm = Tr(sigma P_nm) averaged over the family's
/// symmetry classes. Maps separable states to separable family states and
/// preserves Tr(sigma X) for every X in the span of the family.
FamilyPoint project_to_family(const CMat& sigma);

/// Sums of Weyl-operator products spanning the family's correlations:
/// U1 = sum over (n,m) with m != 0 of U_nm x U_{-n,m}, U2I = U_10 x U_{-1,0},
/// U2II = U_20 x U_{-2,0}.
CMat weyl_u1();
CMat weyl_u2_i();
CMat weyl_u2_ii();

// Closed-form constraints. Every margin is >= 0 when the constraint holds.

struct PositivityMargins {
    /// 7/2 b + 1 - g - a;  -b + 1 - g - a;  -b + 1 + 2g - a;  a - (b - 1 + g)/8
    std::array<double, 4> margins{};
    bool satisfied(double tol = 0.0) const;
};

struct PptMargins {
    /// a + b + 1/2 - g/2;  upper root - a;  a - lower root;  2 - 2a - 2b + g.
    /// Roots (-2 + 11b - g -+ 3 sqrt(D))/16 with D = 4 + 9b^2 + 4g - 7g^2 - 6b(2+g);
    /// for D < 0 the root gap is taken as -3 sqrt(-D) so both cannot hold.
    std::array<double, 4> margins{};
    double discriminant = 0.0;
    bool satisfied(double tol = 0.0) const;
};

struct RealignMargins {
    /// (6 + 11b - g - D1)/16 - a;  (6 + 11b - g + D1)/16 - a;
    /// a - (-6 + 11b - g - D2)/16;  a - (-6 + 11b - g + D2)/16.
    /// A negative radicand gives a negative D, as for the PPT roots.
    std::array<double, 4> margins{};
    double delta1 = 0.0;
    double delta2 = 0.0;
    bool satisfied(double tol = 0.0) const;
};

PositivityMargins positivity_closed_form(const FamilyPoint& p);
PptMargins ppt_closed_form(const FamilyPoint& p);
RealignMargins realign_closed_form(const FamilyPoint& p);
/// On or below the boundary plane, inside the PPT upper root, and at or
/// beyond the realignment surface.
bool bound_region(const FamilyPoint& p);

double delta_ppt(double beta, double gamma);
/// Throw std::domain_error for a negative radicand.
double delta1(double beta, double gamma);
double delta2(double beta, double gamma);
/// The realignment surface a = (6 + 11b - g - D1)/16.
double realign_surface_alpha(double beta, double gamma);

struct ConstraintReport {
    PositivityMargins positivity;
    PptMargins ppt;
    RealignMargins realign;
    bool in_bound_region = false;
};

ConstraintReport constraint_report(const FamilyPoint& p);

/// Matrix-side values for the same point: smallest eigenvalue of rho,
/// smallest eigenvalue of rho^Gamma, realignment sum.
struct NumericMargins {
    double positivity;
    double ppt;
    double realign_sum;
};
NumericMargins numeric_margins(const FamilyPoint& p);

/// Comparison of the printed constraint sets with the reconciled ones used
/// above. For each criterion every direction assignment of the candidate
/// inequalities is scored against the matrix-side verdict at `samples`
/// random points of [-1, 1]^3; the best assignment must equal the one in
/// use, and its mismatch count is reported next to that of the printed set.
struct ReconciliationEntry {
    std::string criterion;
    std::string printed;
    std::string reconciled;
    std::size_t printed_mismatches = 0;
    std::size_t reconciled_mismatches = 0;
    /// Direction bit per inequality (true: ">= 0" as stored).
    std::vector<bool> chosen_directions;
    bool matches_built_in = false;
};

struct ReconciliationLog {
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<ReconciliationEntry> entries;
};

ReconciliationLog reconcile_constraints(std::size_t samples = 100, std::uint64_t seed = 42);
void print(std::ostream& os, const ReconciliationLog& log);

/// Tangent-plane witness on the realignment surface at (beta_t, gamma_t):
/// G = a (2 1 - U1 + conj(c) U2I + c U2II) with
/// a = (-2 - 9b + 3g + 3 D1)/36 and c built from D1.
/// Throws std::domain_error at the singular point (beta_t, gamma_t) = (-2/9, 0),
/// where D1 vanishes and the constant c is undefined, where a <= 0, or where
/// the tangent point is not a state.
struct GRe {
    FamilyPoint tangent;
    double a = 0.0;
    cplx c;
    CMat op;
};
GRe g_re(double beta_t, double gamma_t);

/// |c| and the tangency residual Tr(G rho_t) for the printed and corrected
/// constants under both placements of c.
struct GReVariant {
    std::string name;
    double abs_c;
    double tangency_residual;
};
std::vector<GReVariant> g_re_variants(double beta_t, double gamma_t);

/// Tangent points (beta_t, gamma_t) of the default lattice beta in [-0.4, 0.2],
/// gamma in [-1, 1] (21 x 21) that lie in the g_re domain.
std::vector<std::pair<double, double>> g_re_lattice(std::size_t n = 21);

/// G^u+, G^u-, G^d+, G^d-.
struct PolygonOp {
    std::string name;
    std::array<int, 3> vertices;  // 1-based kernel vertex labels
    CMat op;
};
std::array<PolygonOp, 4> polygon_ops();

/// Kernel polygon vertices 1..5 (index 0..4), asserted separable.
std::array<FamilyPoint, 5> kernel_vertices();
/// Unused corner of the gamma = 0 PPT region; strictly inside the polygon.
FamilyPoint kernel_interior_corner();

/// Geometric operator of the plane through three family points, oriented to
/// be positive on `inside` and scaled to identity coefficient 2/63.
CMat plane_operator(const FamilyPoint& p1, const FamilyPoint& p2, const FamilyPoint& p3,
                    const FamilyPoint& inside);

/// Horodecki line: a = (6-b)/21, b' = -2b/21, g = (5-2b)/7. Throws for b outside [0, 5].
FamilyPoint horodecki_point(double b);
DensityMatrix horodecki(double b);

/// Largest t >= 0 with p + t dir inside the positivity pyramid (exact, the
/// constraints are linear). Returns +inf if the ray never leaves.
double pyramid_exit(const FamilyPoint& p, const FamilyPoint& dir);

/// Distance along dir from p to where the matrix-side PPT and realignment
/// criteria first fail, found by bisection to `tol`; `max_t` bounds the search.
double criteria_exit(const FamilyPoint& p, const FamilyPoint& dir, double max_t, double tol = 1e-9);

/// Inside-out family of a polygon face: rho~ is the centroid of the face's
/// vertices, rho the point where the outward normal ray through rho~ leaves
/// the pyramid.
struct FaceFamily {
    FamilyPoint inner;
    FamilyPoint outer;
    FamilyPoint normal;  // unit outward normal, in (alpha, beta, gamma) components
    ShiftFamily family;
};
FaceFamily inside_out_family(const PolygonOp& op);

struct TangencyReport {
    std::string name;
    CrossingReport crossing;
    FamilyPoint tangent;
    double ppt_margin;
    double realign_sum;
    /// Distance along the outward normal from the tangent point to where
    /// the PPT or realignment criterion fails.
    double boundary_distance;
};
TangencyReport inside_out_tangency(const PolygonOp& op, double tol = 1e-6, const SeeSawOptions& options = {});

struct ScanRow {
    FamilyPoint p;
    EuclidPoint e;
    double pos_margin;
    double ppt_margin;
    double realign_sum;
    Label label;
    /// Closed-form verdicts (positivity, PPT, realignment) agree with the matrix side.
    bool closed_form_agrees;
};

/// Grid of n^3 points over [lo, hi]^3, in alpha-major order. Throws
/// std::invalid_argument for n < 2 or an empty box.
std::vector<ScanRow> scan(std::size_t n, double lo, double hi, std::size_t jobs = 1);
/// Same over the gamma = `gamma` slice, n^2 points.
std::vector<ScanRow> scan_slice(std::size_t n, double lo, double hi, double gamma, std::size_t jobs = 1);
/// Tolerance used to compare closed-form and matrix-side verdicts.
inline constexpr double kAgreementTol = 1e-8;

/// OBJ text: the positivity pyramid, the PPT cone and the realignment
/// surface in Euclidean coordinates, sampled on an n x n (beta, gamma) grid.
void write_obj(std::ostream& os, std::size_t n = 41);

}  // namespace gew::simplex3
