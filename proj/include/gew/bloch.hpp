#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gew/matrix.hpp"

namespace gew {

/// Orthogonal operator basis {1, A_i} of a d-dimensional system: the d^2-1
/// traceless units satisfy Tr A_i^dagger A_j = N delta_ij. The identity is
/// kept implicit.
struct OperatorBasis {
    std::size_t dim = 0;
    std::vector<CMat> units;
    double norm = 0.0;  // N

    /// Validates tracelessness and orthogonality (1e-10) and infers N.
    static OperatorBasis from_units(std::vector<CMat> units);

    /// f = sqrt(d(d-1)/N), the Bloch-vector scale of a single-party state.
    double scale() const;
};

/// U_nm = sum_k exp(2 pi i k n / d) |k><(k+m) mod d|. Indices are taken mod d.
CMat weyl_operator(std::size_t d, long n, long m);

/// The d^2-1 Weyl operators U_nm, (n,m) != (0,0), ordered by n*d+m; N = d.
OperatorBasis weyl_basis(std::size_t d);

/// Position of U_nm in weyl_basis(d).units.
std::size_t weyl_index(std::size_t d, long n, long m);

/// O = e 1 + sum a_i A_i x 1 + sum b_j 1 x B_j + sum c_ij A_i x B_j.
struct OpDecomp {
    cplx e = 0.0;
    std::vector<cplx> a;
    std::vector<cplx> b;
    CMat c;
    OperatorBasis basis_a;
    OperatorBasis basis_b;

    Dims dims() const { return {basis_a.dim, basis_b.dim}; }
};

/// Coefficients by Hilbert-Schmidt projection, e.g. a_i = Tr[(A_i x 1)^dagger O] / (N_A d_B).
OpDecomp decompose_op(const CMat& op, const OperatorBasis& basis_a, const OperatorBasis& basis_b);
CMat reconstruct(const OpDecomp& dec);

/// Singular-value-optimized decomposition. Rotated bases D^A_i = sum_j u*_ij A_j,
/// D^B_i = sum_j v_ij B_j keep the orthogonality of the originals.
struct SvoForm {
    cplx e = 0.0;
    std::vector<cplx> r;
    std::vector<cplx> t;
    std::vector<double> s;  // descending
    OperatorBasis rotated_a;
    OperatorBasis rotated_b;
};

/// Requires equal subsystem dimensions.
SvoForm svo(const OpDecomp& dec);
CMat reconstruct(const SvoForm& form);

/// C = delta (mu 1 + sum a~_i A_i x 1 + sum b~_j 1 x B_j + sum c~_ij A_i x B_j),
/// mu = sqrt((d_A-1)(d_B-1)), delta > 0. `normalized` holds the tilde
/// coefficients (its e equals mu). If the source has a negative identity
/// part the operator is negated first and `negated` is set.
struct WitnessForm {
    double delta = 0.0;
    double mu = 0.0;
    bool negated = false;
    OpDecomp normalized;
};

/// Throws std::invalid_argument for a non-real or vanishing identity coefficient.
WitnessForm witness_form(const OpDecomp& dec);
SvoForm witness_svo(const WitnessForm& w);

/// Prefactors of S for the local-A, local-B and correlation sums. They
/// make Tr(sigma_p C) = delta mu (1 + S) exact for any normalization N; for
/// N = d they reduce to 1/sqrt(d_B-1), 1/sqrt(d_A-1) and 1.
struct SCoefficients {
    double local_a;
    double local_b;
    double correlation;
};
SCoefficients s_coefficients(const OperatorBasis& basis_a, const OperatorBasis& basis_b);

/// S for Bloch vectors n (party A) and m (party B) in the bases of `w`.
double s_value(const WitnessForm& w, std::span<const cplx> n, std::span<const cplx> m);
/// S in SVO form; n, m must be Bloch vectors in the rotated bases.
double s_value(const SvoForm& normalized, std::span<const cplx> n, std::span<const cplx> m);

/// Bloch vector n of a single-party state: rho = (1 + f sum n_i A_i) / d.
std::vector<cplx> bloch_vector(const CMat& rho, const OperatorBasis& basis);
CMat state_from_bloch(std::span<const cplx> n, const OperatorBasis& basis);

/// Sufficient witness test for operators without local parts: every
/// (effective) singular value at most 1. `normalized` is the SVO form of a
/// WitnessForm. Throws std::invalid_argument if r~ or t~ do not vanish
/// (1e-10) or the dimensions differ.
bool lemma1_check(const SvoForm& normalized);

}  // namespace gew
