#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gew {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major, value semantics.
class CMat {
public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols);
    CMat(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
    CMat(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMat identity(std::size_t n);
    static CMat zeros(std::size_t rows, std::size_t cols) { return CMat(rows, cols); }
    static CMat diag(std::span<const double> values);
    static CMat diag(std::span<const cplx> values);
    /// |v><v|
    static CMat outer(std::span<const cplx> v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    std::span<const cplx> data() const { return entries_; }

    cplx& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    CMat adjoint() const;
    CMat transpose() const;
    CMat conj() const;
    cplx trace() const;
    /// Frobenius (Hilbert-Schmidt) norm.
    double norm() const;
    double max_abs() const;
    bool all_finite() const;
    std::vector<cplx> column(std::size_t j) const;

    CMat& operator+=(const CMat& other);
    CMat& operator-=(const CMat& other);
    CMat& operator*=(cplx scalar);

    friend bool operator==(const CMat&, const CMat&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> entries_;
};

CMat operator+(CMat a, const CMat& b);
CMat operator-(CMat a, const CMat& b);
CMat operator-(CMat a);
CMat operator*(const CMat& a, const CMat& b);
CMat operator*(CMat a, cplx s);
CMat operator*(cplx s, CMat a);
std::vector<cplx> operator*(const CMat& a, std::span<const cplx> v);

/// Max |A - B| entrywise; dims must agree.
double max_abs_diff(const CMat& a, const CMat& b);

CMat kron(const CMat& a, const CMat& b);
std::vector<cplx> kron(std::span<const cplx> a, std::span<const cplx> b);

/// Tr A^dagger B.
cplx hs_inner(const CMat& a, const CMat& b);
double hs_distance(const CMat& a, const CMat& b);

double hermiticity_defect(const CMat& a);
bool is_hermitian(const CMat& a, double tol = 1e-10);

struct EigResult {
    std::vector<double> eigenvalues;  // ascending
    CMat eigenvectors;                // columns
};

/// Full spectrum of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Throws std::invalid_argument when `a` is not Hermitian within 1e-10 (scaled).
EigResult herm_eig(const CMat& a);
double min_eigenvalue(const CMat& a);

struct SvdResult {
    std::vector<double> singular_values;  // descending, min(rows, cols) entries
    CMat u;                               // rows x rows, unitary
    CMat v;                               // cols x cols, unitary
};

/// A = U diag(s) V^dagger, computed by one-sided complex Jacobi.
SvdResult svd(const CMat& a);
std::vector<double> singular_values(const CMat& a);

/// Subsystem dimensions of a bipartite operator.
struct Dims {
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t total() const { return a * b; }
    friend bool operator==(const Dims&, const Dims&) = default;
};

/// rho^Gamma_{ij,kl} = rho_{il,kj}: transpose on the second factor.
CMat partial_transpose(const CMat& rho, Dims dims);
/// (rho_{ij,kl})_R = rho_{ik,jl}; result is dA^2 x dB^2.
CMat realign(const CMat& rho, Dims dims);
/// Sum of singular values of the realigned matrix.
double realignment_sum(const CMat& rho, Dims dims);
/// Smallest eigenvalue of the partial transpose.
double ppt_margin(const CMat& rho, Dims dims);
/// Partial trace over the second (trace_second) or first subsystem.
CMat partial_trace(const CMat& rho, Dims dims, bool trace_second = true);

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPositivityTol = 1e-10;

/// A validated bipartite quantum state: Hermitian, unit trace, positive
/// semidefinite (eigenvalues >= -1e-10). dims.b == 1 for a single system.
class DensityMatrix {
public:
    /// Throws std::invalid_argument on any violated invariant.
    DensityMatrix(CMat mat, Dims dims);
    DensityMatrix(CMat mat, std::size_t dim_a, std::size_t dim_b)
        : DensityMatrix(std::move(mat), Dims{dim_a, dim_b}) {}

    const CMat& mat() const { return mat_; }
    Dims dims() const { return dims_; }
    std::size_t dim() const { return dims_.total(); }

    /// Empty string if `mat` would be a valid state for `dims`, else the reason.
    static std::string defect(const CMat& mat, Dims dims);

private:
    CMat mat_;
    Dims dims_;
};

CMat partial_transpose(const DensityMatrix& rho);
CMat realign(const DensityMatrix& rho);

}  // namespace gew
