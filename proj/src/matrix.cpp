#include "gew/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gew {

namespace {

void require_same_shape(const CMat& a, const CMat& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()) + ")");
    }
}

void require_factorable(const CMat& rho, Dims dims, const char* what) {
    if (!rho.is_square() || dims.a == 0 || dims.b == 0 || dims.total() != rho.rows()) {
        throw std::invalid_argument(std::string(what) + ": dims " + std::to_string(dims.a) + "x" +
                                    std::to_string(dims.b) + " do not factor a " +
                                    std::to_string(rho.rows()) + "x" +
                                    std::to_string(rho.cols()) + " matrix");
    }
}

// 2x2 unitary V = [[v00, v01], [v10, v11]] with V^dagger [[a, b], [b*, d]] V diagonal.
struct Rotation {
    cplx v00, v01, v10, v11;
    double shift;  // t*|b|: new a = a - shift, new d = d + shift
};

Rotation jacobi_rotation(double a, cplx b, double d) {
    const double mag = std::abs(b);
    const cplx phase = b / mag;  // e^{i phi}
    const double tau = (d - a) / (2.0 * mag);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const cplx ph = std::conj(phase);
    return {c, s, -s * ph, c * ph, t * mag};
}

}  // namespace

// ---------------------------------------------------------------- CMat

CMat::CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

CMat::CMat(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols) {
        throw std::invalid_argument("CMat: entry count " + std::to_string(entries_.size()) +
                                    " != rows*cols");
    }
    if (!all_finite()) throw std::invalid_argument("CMat: non-finite entry");
}

CMat::CMat(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("CMat: ragged initializer");
        entries_.insert(entries_.end(), r.begin(), r.end());
    }
}

CMat CMat::identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMat CMat::diag(std::span<const double> values) {
    CMat m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

CMat CMat::diag(std::span<const cplx> values) {
    CMat m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

CMat CMat::outer(std::span<const cplx> v) {
    CMat m(v.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
}

CMat CMat::adjoint() const {
    CMat m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

CMat CMat::transpose() const {
    CMat m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

CMat CMat::conj() const {
    CMat m = *this;
    for (auto& x : m.entries_) x = std::conj(x);
    return m;
}

cplx CMat::trace() const {
    if (!is_square()) throw std::invalid_argument("trace: matrix is not square");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double CMat::norm() const {
    double s = 0.0;
    for (const auto& x : entries_) s += std::norm(x);
    return std::sqrt(s);
}

double CMat::max_abs() const {
    double m = 0.0;
    for (const auto& x : entries_) m = std::max(m, std::abs(x));
    return m;
}

bool CMat::all_finite() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const cplx& x) {
        return std::isfinite(x.real()) && std::isfinite(x.imag());
    });
}

std::vector<cplx> CMat::column(std::size_t j) const {
    std::vector<cplx> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

CMat& CMat::operator+=(const CMat& other) {
    require_same_shape(*this, other, "operator+");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += other.entries_[k];
    return *this;
}

CMat& CMat::operator-=(const CMat& other) {
    require_same_shape(*this, other, "operator-");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= other.entries_[k];
    return *this;
}

CMat& CMat::operator*=(cplx scalar) {
    for (auto& x : entries_) x *= scalar;
    return *this;
}

CMat operator+(CMat a, const CMat& b) { return a += b; }
CMat operator-(CMat a, const CMat& b) { return a -= b; }
CMat operator-(CMat a) { return a *= -1.0; }
CMat operator*(CMat a, cplx s) { return a *= s; }
CMat operator*(cplx s, CMat a) { return a *= s; }

CMat operator*(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("operator*: inner dimension mismatch");
    CMat m(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) += aik * b(k, j);
        }
    return m;
}

std::vector<cplx> operator*(const CMat& a, std::span<const cplx> v) {
    if (a.cols() != v.size()) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<cplx> r(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r[i] += a(i, j) * v[j];
    return r;
}

double max_abs_diff(const CMat& a, const CMat& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k)
        m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    return m;
}

CMat kron(const CMat& a, const CMat& b) {
    const std::size_t rb = b.rows(), cb = b.cols();
    CMat m(a.rows() * rb, a.cols() * cb);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            for (std::size_t k = 0; k < rb; ++k)
                for (std::size_t l = 0; l < cb; ++l) m(i * rb + k, j * cb + l) = aij * b(k, l);
        }
    return m;
}

std::vector<cplx> kron(std::span<const cplx> a, std::span<const cplx> b) {
    std::vector<cplx> r;
    r.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b) r.push_back(x * y);
    return r;
}

cplx hs_inner(const CMat& a, const CMat& b) {
    require_same_shape(a, b, "hs_inner");
    cplx s = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) s += std::conj(a.data()[k]) * b.data()[k];
    return s;
}

double hs_distance(const CMat& a, const CMat& b) {
    require_same_shape(a, b, "hs_distance");
    return (a - b).norm();
}

double hermiticity_defect(const CMat& a) {
    if (!a.is_square()) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
    return m;
}

bool is_hermitian(const CMat& a, double tol) {
    return hermiticity_defect(a) <= tol * std::max(1.0, a.max_abs());
}

// ---------------------------------------------------------------- eigen

EigResult herm_eig(const CMat& input) {
    if (!input.is_square()) throw std::invalid_argument("herm_eig: matrix is not square");
    if (!is_hermitian(input, 1e-10)) {
        throw std::invalid_argument("herm_eig: matrix is not Hermitian (defect " +
                                    std::to_string(hermiticity_defect(input)) + ")");
    }
    const std::size_t n = input.rows();
    // Work on the exactly Hermitian part.
    CMat a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = input(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            a(i, j) = 0.5 * (input(i, j) + std::conj(input(j, i)));
            a(j, i) = std::conj(a(i, j));
        }
    }
    CMat vecs = CMat::identity(n);
    const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
    constexpr int kMaxSweeps = 100;

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * std::norm(a(i, j));
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < kMaxSweeps && off_norm() > 1e-15 * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const auto r = jacobi_rotation(a(p, p).real(), apq, a(q, q).real());
                // A <- A V on columns p, q
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * r.v00 + akq * r.v10;
                    a(k, q) = akp * r.v01 + akq * r.v11;
                }
                // A <- V^dagger A on rows p, q
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(r.v00) * apk + std::conj(r.v10) * aqk;
                    a(q, k) = std::conj(r.v01) * apk + std::conj(r.v11) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = vecs(k, p), vkq = vecs(k, q);
                    vecs(k, p) = vkp * r.v00 + vkq * r.v10;
                    vecs(k, q) = vkp * r.v01 + vkq * r.v11;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
    EigResult res;
    res.eigenvalues.resize(n);
    res.eigenvectors = CMat(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        res.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) res.eigenvectors(i, k) = vecs(i, order[k]);
    }
    return res;
}

double min_eigenvalue(const CMat& a) { return herm_eig(a).eigenvalues.front(); }

// ---------------------------------------------------------------- svd

namespace {

// Orthonormalize columns in order; columns whose residual collapses are
// replaced by the first standard basis vector that survives projection.
void orthonormalize_columns(CMat& u, std::size_t from_col) {
    const std::size_t m = u.rows();
    auto project_out = [&](std::vector<cplx>& v, std::size_t upto) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t k = 0; k < upto; ++k) {
                cplx dot = 0.0;
                for (std::size_t i = 0; i < m; ++i) dot += std::conj(u(i, k)) * v[i];
                for (std::size_t i = 0; i < m; ++i) v[i] -= dot * u(i, k);
            }
    };
    auto vnorm = [](const std::vector<cplx>& v) {
        double s = 0.0;
        for (const auto& x : v) s += std::norm(x);
        return std::sqrt(s);
    };
    std::size_t next_unit = 0;
    for (std::size_t j = from_col; j < u.cols(); ++j) {
        std::vector<cplx> v = u.column(j);
        project_out(v, j);
        double nv = vnorm(v);
        while (nv < 0.5) {
            if (next_unit >= m) throw std::logic_error("svd: cannot complete unitary basis");
            v.assign(m, 0.0);
            v[next_unit++] = 1.0;
            project_out(v, j);
            nv = vnorm(v);
        }
        for (std::size_t i = 0; i < m; ++i) u(i, j) = v[i] / nv;
    }
}

SvdResult svd_tall(const CMat& a) {
    // rows >= cols
    const std::size_t m = a.rows(), n = a.cols();
    CMat w = a;
    CMat v = CMat::identity(n);
    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0;
                cplx gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += std::norm(w(i, p));
                    beta += std::norm(w(i, q));
                    gamma += std::conj(w(i, p)) * w(i, q);
                }
                if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || std::abs(gamma) <= 1e-300)
                    continue;
                rotated = true;
                const auto r = jacobi_rotation(alpha, gamma, beta);
                for (std::size_t i = 0; i < m; ++i) {
                    const cplx wp = w(i, p), wq = w(i, q);
                    w(i, p) = wp * r.v00 + wq * r.v10;
                    w(i, q) = wp * r.v01 + wq * r.v11;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx vp = v(i, p), vq = v(i, q);
                    v(i, p) = vp * r.v00 + vq * r.v10;
                    v(i, q) = vp * r.v01 + vq * r.v11;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += std::norm(w(i, j));
        norms[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    SvdResult res;
    res.singular_values.resize(n);
    res.u = CMat(m, m);
    res.v = CMat(n, n);
    const double smax = n > 0 ? norms[order[0]] : 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        res.singular_values[k] = norms[j];
        for (std::size_t i = 0; i < n; ++i) res.v(i, k) = v(i, j);
        if (norms[j] > 1e-300 && norms[j] > 1e-13 * smax) {
            for (std::size_t i = 0; i < m; ++i) res.u(i, k) = w(i, j) / norms[j];
        }
    }
    orthonormalize_columns(res.u, 0);
    return res;
}

}  // namespace

SvdResult svd(const CMat& a) {
    if (a.rows() >= a.cols()) return svd_tall(a);
    // A^dagger = U' S V'^dagger  =>  A = V' S U'^dagger
    SvdResult t = svd_tall(a.adjoint());
    return {std::move(t.singular_values), std::move(t.v), std::move(t.u)};
}

std::vector<double> singular_values(const CMat& a) { return svd(a).singular_values; }

// ---------------------------------------------------------------- bipartite

CMat partial_transpose(const CMat& rho, Dims dims) {
    require_factorable(rho, dims, "partial_transpose");
    const std::size_t da = dims.a, db = dims.b;
    CMat out(rho.rows(), rho.cols());
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < db; ++j)
            for (std::size_t k = 0; k < da; ++k)
                for (std::size_t l = 0; l < db; ++l)
                    out(i * db + j, k * db + l) = rho(i * db + l, k * db + j);
    return out;
}

CMat realign(const CMat& rho, Dims dims) {
    require_factorable(rho, dims, "realign");
    const std::size_t da = dims.a, db = dims.b;
    CMat out(da * da, db * db);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < db; ++j)
            for (std::size_t k = 0; k < da; ++k)
                for (std::size_t l = 0; l < db; ++l)
                    out(i * da + k, j * db + l) = rho(i * db + j, k * db + l);
    return out;
}

double realignment_sum(const CMat& rho, Dims dims) {
    const auto s = singular_values(realign(rho, dims));
    return std::accumulate(s.begin(), s.end(), 0.0);
}

double ppt_margin(const CMat& rho, Dims dims) { return min_eigenvalue(partial_transpose(rho, dims)); }

CMat partial_trace(const CMat& rho, Dims dims, bool trace_second) {
    require_factorable(rho, dims, "partial_trace");
    const std::size_t da = dims.a, db = dims.b;
    if (trace_second) {
        CMat out(da, da);
        for (std::size_t i = 0; i < da; ++i)
            for (std::size_t k = 0; k < da; ++k)
                for (std::size_t j = 0; j < db; ++j) out(i, k) += rho(i * db + j, k * db + j);
        return out;
    }
    CMat out(db, db);
    for (std::size_t j = 0; j < db; ++j)
        for (std::size_t l = 0; l < db; ++l)
            for (std::size_t i = 0; i < da; ++i) out(j, l) += rho(i * db + j, i * db + l);
    return out;
}

// ---------------------------------------------------------------- states

std::string DensityMatrix::defect(const CMat& mat, Dims dims) {
    if (!mat.is_square() || dims.a == 0 || dims.b == 0 || dims.total() != mat.rows())
        return "dimensions do not factor the matrix";
    if (!mat.all_finite()) return "non-finite entry";
    if (const double h = hermiticity_defect(mat); h > kHermitianTol)
        return "not Hermitian (defect " + std::to_string(h) + ")";
    if (const double t = std::abs(mat.trace() - 1.0); t > kTraceTol)
        return "trace differs from 1 by " + std::to_string(t);
    if (const double e = min_eigenvalue(mat); e < -kPositivityTol)
        return "not positive semidefinite (min eigenvalue " + std::to_string(e) + ")";
    return {};
}

DensityMatrix::DensityMatrix(CMat mat, Dims dims) : mat_(std::move(mat)), dims_(dims) {
    if (auto why = defect(mat_, dims_); !why.empty())
        throw std::invalid_argument("DensityMatrix: " + why);
}

CMat partial_transpose(const DensityMatrix& rho) { return partial_transpose(rho.mat(), rho.dims()); }
CMat realign(const DensityMatrix& rho) { return realign(rho.mat(), rho.dims()); }

}  // namespace gew
