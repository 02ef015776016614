#pragma once

// Dense complex linear algebra for small Hermitian problems.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qitp/errors.hpp"

namespace qitp {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw Error(ErrorKind::DimensionMismatch, "matrix data size does not match shape");
        }
    }
    /// Row-major nested initializer, e.g. {{0, 1}, {1, 0}}.
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto &r : rows) {
            if (r.size() != cols_) {
                throw Error(ErrorKind::DimensionMismatch, "ragged matrix initializer");
            }
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static ComplexMatrix diagonal(std::span<const double> d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }
    static ComplexMatrix diagonal(std::span<const cplx> d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    cplx &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const cplx> data() const noexcept { return data_; }
    std::span<cplx> data() noexcept { return data_; }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(),
                           [](const cplx &z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
        return out;
    }
    ComplexMatrix transpose() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
        return out;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    /// Largest absolute entry.
    double max_abs() const {
        double m = 0.0;
        for (const auto &z : data_) m = std::max(m, std::abs(z));
        return m;
    }
    double frobenius() const {
        double s = 0.0;
        for (const auto &z : data_) s += std::norm(z);
        return std::sqrt(s);
    }

    /// Copy of the block starting at (r0, c0).
    ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        ComplexMatrix out(nr, nc);
        for (std::size_t r = 0; r < nr; ++r)
            for (std::size_t c = 0; c < nc; ++c) out(r, c) = (*this)(r0 + r, c0 + c);
        return out;
    }
    void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix &b) {
        for (std::size_t r = 0; r < b.rows(); ++r)
            for (std::size_t c = 0; c < b.cols(); ++c) (*this)(r0 + r, c0 + c) = b(r, c);
    }

    ComplexMatrix &operator+=(const ComplexMatrix &o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    ComplexMatrix &operator-=(const ComplexMatrix &o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    ComplexMatrix &operator*=(cplx s) {
        for (auto &z : data_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.cols_ != b.rows_) throw Error(ErrorKind::DimensionMismatch, "matrix product shape mismatch");
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    friend CVector operator*(const ComplexMatrix &a, std::span<const cplx> v) {
        if (a.cols_ != v.size()) throw Error(ErrorKind::DimensionMismatch, "matrix-vector shape mismatch");
        CVector out(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < a.cols_; ++k) s += a(i, k) * v[k];
            out[i] = s;
        }
        return out;
    }
    friend CVector operator*(const ComplexMatrix &a, const CVector &v) { return a * std::span<const cplx>(v); }

    friend bool operator==(const ComplexMatrix &, const ComplexMatrix &) = default;

  private:
    void check_same_shape(const ComplexMatrix &o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw Error(ErrorKind::DimensionMismatch, "matrix shapes differ");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) { return (a - b).max_abs(); }

/// ‖m − m†‖_max.
inline double hermiticity_error(const ComplexMatrix &m) {
    if (!m.is_square()) return INFINITY;
    double e = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j) e = std::max(e, std::abs(m(i, j) - std::conj(m(j, i))));
    return e;
}

/// ‖m†m − I‖_max.
inline double unitarity_error(const ComplexMatrix &m) {
    if (!m.is_square()) return INFINITY;
    return max_abs_diff(m.adjoint() * m, ComplexMatrix::identity(m.rows()));
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

inline ComplexMatrix commutator(const ComplexMatrix &a, const ComplexMatrix &b) { return a * b - b * a; }

inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "inner product size mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm2(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto &z : v) s += std::norm(z);
    return std::sqrt(s);
}

inline CVector column(const ComplexMatrix &m, std::size_t c) {
    CVector v(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) v[r] = m(r, c);
    return v;
}

namespace pauli {
inline ComplexMatrix I() { return ComplexMatrix::identity(2); }
inline ComplexMatrix X() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix Y() { return {{0.0, cplx(0, -1)}, {cplx(0, 1), 0.0}}; }
inline ComplexMatrix Z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
}  // namespace pauli

// ---------------------------------------------------------------------------
// Hermitian eigensolver

struct EighOptions {
    double hermitian_tol = 1e-10;
    /// Sweeps stop when the off-diagonal Frobenius mass drops below
    /// convergence_tol * max(1, ‖A‖_F).
    double convergence_tol = 1e-14;
    int max_sweeps = 100;
    /// Relative gap below which eigenvalues are treated as one cluster.
    double degeneracy_tol = 1e-9;
    std::size_t max_dim = 64;
};

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns are eigenvectors
};

namespace detail {

inline double off_diagonal_mass(const ComplexMatrix &a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Rotates columns p, q of `m` by the 2x2 unitary g (m <- m * G).
inline void rotate_columns(ComplexMatrix &m, std::size_t p, std::size_t q, const cplx g[2][2]) {
    for (std::size_t k = 0; k < m.rows(); ++k) {
        const cplx mp = m(k, p), mq = m(k, q);
        m(k, p) = mp * g[0][0] + mq * g[1][0];
        m(k, q) = mp * g[0][1] + mq * g[1][1];
    }
}

// m <- G† * m on rows p, q.
inline void rotate_rows_adjoint(ComplexMatrix &m, std::size_t p, std::size_t q, const cplx g[2][2]) {
    for (std::size_t k = 0; k < m.cols(); ++k) {
        const cplx mp = m(p, k), mq = m(q, k);
        m(p, k) = std::conj(g[0][0]) * mp + std::conj(g[1][0]) * mq;
        m(q, k) = std::conj(g[0][1]) * mp + std::conj(g[1][1]) * mq;
    }
}

// Multiplies v by a unit phase so that its first entry of (near-)maximal
// magnitude is real and positive.
inline void fix_phase(CVector &v) {
    double best = 0.0;
    for (const auto &z : v) best = std::max(best, std::abs(z));
    if (best == 0.0) return;
    for (const auto &z : v) {
        if (std::abs(z) >= best * (1.0 - 1e-8)) {
            const cplx ph = std::conj(z) / std::abs(z);
            for (auto &w : v) w *= ph;
            return;
        }
    }
}

inline bool lexicographic_less(const CVector &a, const CVector &b) {
    auto rnd = [](double x) { return std::round(x * 1e8) / 1e8; };
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ar = rnd(a[i].real()), br = rnd(b[i].real());
        if (ar != br) return ar > br;
        const double ai = rnd(a[i].imag()), bi = rnd(b[i].imag());
        if (ai != bi) return ai > bi;
    }
    return false;
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Eigenvalues come back ascending; inside a degenerate cluster
/// the vectors are phase-fixed, ordered, and re-orthonormalized so the
/// output is deterministic.
inline EigenDecomposition eigh(const ComplexMatrix &m, const EighOptions &opt = {}) {
    if (!m.is_square() || m.rows() == 0) throw Error(ErrorKind::DimensionError, "eigh needs a non-empty square matrix");
    if (m.rows() > opt.max_dim) throw Error(ErrorKind::DimensionError, "eigh dimension exceeds design bound");
    if (!m.all_finite()) throw Error(ErrorKind::NonHermitianInput, "matrix has non-finite entries");
    if (hermiticity_error(m) > opt.hermitian_tol) {
        throw Error(ErrorKind::NonHermitianInput, "matrix is not Hermitian within tolerance");
    }
    const std::size_t n = m.rows();
    ComplexMatrix a = m;
    for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double threshold = opt.convergence_tol * std::max(1.0, m.frobenius());

    bool converged = detail::off_diagonal_mass(a) < threshold;
    for (int sweep = 0; sweep < opt.max_sweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx b = a(p, q);
                const double mag = std::abs(b);
                if (mag < 1e-300) continue;
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const cplx phase = b / mag;  // e^{iφ}
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                const cplx g[2][2] = {{c, s}, {-s * std::conj(phase), c * std::conj(phase)}};
                detail::rotate_columns(a, p, q, g);
                detail::rotate_rows_adjoint(a, p, q, g);
                a(p, q) = a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                detail::rotate_columns(v, p, q, g);
            }
        }
        converged = detail::off_diagonal_mass(a) < threshold;
    }
    if (!converged) throw Error(ErrorKind::NoConvergence, "Jacobi sweeps exceeded the iteration cap");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenDecomposition out;
    out.values.resize(n);
    std::vector<CVector> vecs(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        vecs[k] = column(v, order[k]);
        detail::fix_phase(vecs[k]);
    }

    // Degenerate clusters: deterministic order, then Gram-Schmidt.
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && std::abs(out.values[end] - out.values[start]) <
                              opt.degeneracy_tol * std::max(1.0, std::abs(out.values[start]))) {
            ++end;
        }
        if (end - start > 1) {
            std::sort(vecs.begin() + static_cast<std::ptrdiff_t>(start), vecs.begin() + static_cast<std::ptrdiff_t>(end),
                      detail::lexicographic_less);
            for (std::size_t i = start; i < end; ++i) {
                for (std::size_t j = start; j < i; ++j) {
                    const cplx proj = inner(vecs[j], vecs[i]);
                    for (std::size_t k = 0; k < n; ++k) vecs[i][k] -= proj * vecs[j][k];
                }
                const double nv = norm2(vecs[i]);
                for (auto &z : vecs[i]) z /= nv;
                detail::fix_phase(vecs[i]);
            }
        }
        start = end;
    }

    out.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = vecs[k][r];
    return out;
}

// ---------------------------------------------------------------------------
// HermitianOperator

enum class Units { Hartree, MeV, Dimensionless };

inline std::string to_string(Units u) {
    switch (u) {
        case Units::Hartree: return "hartree";
        case Units::MeV: return "mev";
        case Units::Dimensionless: return "dimensionless";
    }
    return "dimensionless";
}

inline Units units_from_string(const std::string &s) {
    if (s == "hartree") return Units::Hartree;
    if (s == "mev") return Units::MeV;
    if (s == "dimensionless") return Units::Dimensionless;
    throw Error(ErrorKind::ParseError, "unknown units tag '" + s + "'");
}

/// A Hamiltonian together with its cached spectral decomposition.
class HermitianOperator {
  public:
    explicit HermitianOperator(ComplexMatrix matrix, Units units = Units::Dimensionless,
                               const EighOptions &opt = {})
        : matrix_(std::move(matrix)), units_(units) {
        auto eig = eigh(matrix_, opt);
        spectrum_ = std::move(eig.values);
        eigenbasis_ = std::move(eig.vectors);
    }

    std::size_t dim() const noexcept { return matrix_.rows(); }
    const ComplexMatrix &matrix() const noexcept { return matrix_; }
    std::span<const double> spectrum() const noexcept { return spectrum_; }
    const ComplexMatrix &eigenbasis() const noexcept { return eigenbasis_; }
    Units units() const noexcept { return units_; }

    double ground_energy() const { return spectrum_.front(); }
    CVector eigenvector(std::size_t k) const { return column(eigenbasis_, k); }
    CVector ground_state() const { return eigenvector(0); }

    /// Smallest eigenvalue strictly above the ground cluster, or the ground
    /// energy itself when the spectrum is fully degenerate.
    double first_excited_energy(double degeneracy_tol = 1e-9) const {
        const double e0 = spectrum_.front();
        for (double e : spectrum_)
            if (e - e0 >= degeneracy_tol * std::max(1.0, std::abs(e0))) return e;
        return e0;
    }

  private:
    ComplexMatrix matrix_;
    Units units_;
    std::vector<double> spectrum_;
    ComplexMatrix eigenbasis_;
};

/// V · diag(f(E_n)) · V†, for a real scalar map f.
template <class F>
ComplexMatrix matrix_function(const HermitianOperator &h, F &&f) {
    const std::size_t n = h.dim();
    std::vector<double> fv(n);
    for (std::size_t k = 0; k < n; ++k) {
        fv[k] = static_cast<double>(f(h.spectrum()[k]));
        if (!std::isfinite(fv[k])) {
            throw Error(ErrorKind::NonFiniteFunctionValue,
                        "function is not finite at eigenvalue " + std::to_string(h.spectrum()[k]));
        }
    }
    const ComplexMatrix &v = h.eigenbasis();
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += v(i, k) * fv[k] * std::conj(v(j, k));
            out(i, j) = s;
        }
    return out;
}

}  // namespace qitp
