#pragma once

// Two-qubit synthesis into {RX, RZ, CZ}.
//
// Qubit 0 is the most significant bit of the matrix index, so for the
// dilation unitary qubit 0 is the reservoir and qubit 1 the system. Rotations
// follow the usual convention R_P(θ) = exp(-iθP/2).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "qitp/errors.hpp"
#include "qitp/numcore.hpp"

namespace qitp {

enum class GateKind { RX, RZ, CZ };

struct Gate {
    GateKind kind = GateKind::RZ;
    std::size_t q0 = 0;
    std::size_t q1 = 0;  // CZ only
    double angle = 0.0;  // RX/RZ only

    static Gate rx(std::size_t q, double theta) { return {GateKind::RX, q, 0, theta}; }
    static Gate rz(std::size_t q, double theta) { return {GateKind::RZ, q, 0, theta}; }
    static Gate cz(std::size_t a, std::size_t b) { return {GateKind::CZ, a, b, 0.0}; }

    friend bool operator==(const Gate &, const Gate &) = default;
};

struct Circuit {
    std::size_t qubit_count = 0;
    std::vector<Gate> gates;
    double global_phase = 0.0;

    std::size_t count(GateKind k) const {
        return static_cast<std::size_t>(
            std::count_if(gates.begin(), gates.end(), [k](const Gate &g) { return g.kind == k; }));
    }

    void validate() const {
        for (const auto &g : gates) {
            if (g.q0 >= qubit_count || (g.kind == GateKind::CZ && (g.q1 >= qubit_count || g.q1 == g.q0))) {
                throw Error(ErrorKind::InvalidArgument, "gate qubit index out of range");
            }
            if (g.kind != GateKind::CZ && !std::isfinite(g.angle)) {
                throw Error(ErrorKind::InvalidArgument, "non-finite rotation angle");
            }
        }
        if (!std::isfinite(global_phase)) throw Error(ErrorKind::InvalidArgument, "non-finite global phase");
    }
};

namespace gates {

inline ComplexMatrix rx(double t) {
    const double c = std::cos(t / 2), s = std::sin(t / 2);
    return {{c, cplx(0, -s)}, {cplx(0, -s), c}};
}
inline ComplexMatrix ry(double t) {
    const double c = std::cos(t / 2), s = std::sin(t / 2);
    return {{c, -s}, {s, c}};
}
inline ComplexMatrix rz(double t) { return {{std::polar(1.0, -t / 2), 0.0}, {0.0, std::polar(1.0, t / 2)}}; }
inline ComplexMatrix hadamard() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {{r, r}, {r, -r}};
}
inline ComplexMatrix cz() {
    ComplexMatrix m = ComplexMatrix::identity(4);
    m(3, 3) = -1.0;
    return m;
}
/// exp(iθP) for a Pauli string P (any P with P² = I).
inline ComplexMatrix pauli_exp(const ComplexMatrix &p, double theta) {
    return ComplexMatrix::identity(p.rows()) * cplx(std::cos(theta)) + p * cplx(0, std::sin(theta));
}

}  // namespace gates

/// Wraps an angle into (-π, π].
inline double wrap_angle(double a) {
    constexpr double two_pi = 2 * std::numbers::pi;
    a = std::remainder(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    return a;
}

// ---------------------------------------------------------------------------
// Circuit simulation

namespace detail {

inline void apply_1q(ComplexMatrix &m, const ComplexMatrix &g, std::size_t q, std::size_t n) {
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    for (std::size_t c = 0; c < m.cols(); ++c)
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r & bit) continue;
            const cplx a0 = m(r, c), a1 = m(r | bit, c);
            m(r, c) = g(0, 0) * a0 + g(0, 1) * a1;
            m(r | bit, c) = g(1, 0) * a0 + g(1, 1) * a1;
        }
}

inline void apply_cz(ComplexMatrix &m, std::size_t a, std::size_t b, std::size_t n) {
    const std::size_t mask = (std::size_t{1} << (n - 1 - a)) | (std::size_t{1} << (n - 1 - b));
    for (std::size_t r = 0; r < m.rows(); ++r)
        if ((r & mask) == mask)
            for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = -m(r, c);
}

}  // namespace detail

inline ComplexMatrix circuit_unitary(const Circuit &c) {
    c.validate();
    if (c.qubit_count > 10) throw Error(ErrorKind::DimensionError, "circuit too wide to simulate densely");
    const std::size_t n = c.qubit_count;
    ComplexMatrix m = ComplexMatrix::identity(std::size_t{1} << n);
    for (const auto &g : c.gates) {
        switch (g.kind) {
            case GateKind::RX: detail::apply_1q(m, gates::rx(g.angle), g.q0, n); break;
            case GateKind::RZ: detail::apply_1q(m, gates::rz(g.angle), g.q0, n); break;
            case GateKind::CZ: detail::apply_cz(m, g.q0, g.q1, n); break;
        }
    }
    return m * std::polar(1.0, c.global_phase);
}

/// |tr(V† U)| / d.
inline double process_fidelity(const ComplexMatrix &v, const ComplexMatrix &u) {
    return std::abs((v.adjoint() * u).trace()) / static_cast<double>(u.rows());
}

// ---------------------------------------------------------------------------
// Single-qubit ZXZ Euler decomposition

/// u = e^{i·phase} · Rz(gamma) · Rx(beta) · Rz(alpha); alpha is applied first.
struct EulerZXZ {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double phase = 0.0;

    ComplexMatrix matrix() const {
        return gates::rz(gamma) * gates::rx(beta) * gates::rz(alpha) * std::polar(1.0, phase);
    }
    /// Gates in time order; zero angles are skipped.
    std::vector<Gate> gates_on(std::size_t q) const {
        std::vector<Gate> out;
        if (alpha != 0.0) out.push_back(Gate::rz(q, alpha));
        if (beta != 0.0) out.push_back(Gate::rx(q, beta));
        if (gamma != 0.0) out.push_back(Gate::rz(q, gamma));
        return out;
    }
};

inline EulerZXZ decompose_1q(const ComplexMatrix &u, double tol = 1e-10) {
    if (u.rows() != 2 || u.cols() != 2 || !(unitarity_error(u) < tol)) {
        throw Error(ErrorKind::NotUnitary, "decompose_1q needs a 2x2 unitary");
    }
    const cplx det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    const ComplexMatrix v = u * std::polar(1.0, -std::arg(det) / 2);
    const double c = std::abs(v(0, 0)), s = std::abs(v(1, 0));
    constexpr double eps = 1e-14;
    EulerZXZ e;
    e.beta = 2 * std::atan2(s, c);
    if (s < eps) {
        e.beta = 0.0;
        e.gamma = 2 * std::arg(v(1, 1));
    } else if (c < eps) {
        e.beta = std::numbers::pi;
        e.gamma = -2 * (std::arg(v(0, 1)) + std::numbers::pi / 2);
    } else {
        const double sum = 2 * std::arg(v(1, 1));
        const double diff = 2 * (std::arg(v(0, 1)) + std::numbers::pi / 2);
        e.alpha = (sum + diff) / 2;
        e.gamma = (sum - diff) / 2;
    }
    e.alpha = wrap_angle(e.alpha);
    e.beta = wrap_angle(e.beta);
    e.gamma = wrap_angle(e.gamma);
    // Flush rounding noise so exact inputs give exact zero angles.
    for (double *a : {&e.alpha, &e.beta, &e.gamma})
        if (std::abs(*a) < 1e-15) *a = 0.0;
    const ComplexMatrix r = gates::rz(e.gamma) * gates::rx(e.beta) * gates::rz(e.alpha);
    e.phase = std::arg((r.adjoint() * u).trace());
    if (std::abs(e.phase) < 1e-15) e.phase = 0.0;
    return e;
}

// ---------------------------------------------------------------------------
// Two-qubit KAK

/// u = e^{i·phase} · (after0 ⊗ after1) · Can(coeffs) · (before0 ⊗ before1), with
/// Can(a, b, c) = exp(i(a XX + b YY + c ZZ)) and coeffs in the Weyl chamber
/// π/4 ≥ a ≥ b ≥ |c| (c ≥ 0 when a = π/4).
struct KakDecomposition {
    double phase = 0.0;
    ComplexMatrix after0, after1, before0, before1;
    std::array<double, 3> coeffs{};
};

namespace detail {

inline ComplexMatrix magic_basis() {
    const double r = 1.0 / std::numbers::sqrt2;
    const cplx i(0, r);
    return {{r, 0.0, 0.0, i}, {0.0, i, r, 0.0}, {0.0, i, -r, 0.0}, {r, 0.0, 0.0, -i}};
}

inline cplx determinant(ComplexMatrix a) {
    const std::size_t n = a.rows();
    cplx det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) == 0.0) return 0.0;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
            det = -det;
        }
        det *= a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx f = a(r, col) / a(col, col);
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
        }
    }
    return det;
}

/// Real orthogonal P (det +1) with P^T M P diagonal, for complex symmetric
/// unitary M. Re M and Im M commute, so a generic real combination of the two
/// shares their eigenvectors.
inline ComplexMatrix simultaneous_real_diagonalizer(const ComplexMatrix &m) {
    constexpr double mix[] = {0.5772156649015329, 1.6180339887498949, 2.718281828459045,
                              0.3183098861837907, 7.38905609893065,  0.1414213562373095};
    const std::size_t n = m.rows();
    for (double r : mix) {
        ComplexMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double x = 0.5 * ((m(i, j).real() + m(j, i).real()) + r * (m(i, j).imag() + m(j, i).imag()));
                a(i, j) = x;
            }
        ComplexMatrix p = eigh(a).vectors;
        for (auto &z : p.data()) z = z.real();
        const ComplexMatrix d = p.transpose() * m * p;
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) off = std::max(off, std::abs(d(i, j)));
        if (off < 1e-10) {
            if (determinant(p).real() < 0)
                for (std::size_t i = 0; i < n; ++i) p(i, 0) = -p(i, 0);
            return p;
        }
    }
    throw Error(ErrorKind::NoConvergence, "could not diagonalize the magic-basis Gram matrix");
}

/// Splits a 4x4 tensor product into its 2x2 factors (each special unitary up
/// to a shared phase folded into the first factor).
inline std::pair<ComplexMatrix, ComplexMatrix> kron_factor(const ComplexMatrix &m) {
    std::size_t bi = 0, bj = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const double f = m.block(2 * i, 2 * j, 2, 2).frobenius();
            if (f > best) { best = f; bi = i; bj = j; }
        }
    ComplexMatrix b = m.block(2 * bi, 2 * bj, 2, 2);
    const cplx det = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
    b *= 1.0 / std::sqrt(det);
    ComplexMatrix a(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) a(i, j) = (b.adjoint() * m.block(2 * i, 2 * j, 2, 2)).trace() / 2.0;
    return {a, b};
}

inline ComplexMatrix pauli_pair(int axis) {
    switch (axis) {
        case 0: return kron(pauli::X(), pauli::X());
        case 1: return kron(pauli::Y(), pauli::Y());
        default: return kron(pauli::Z(), pauli::Z());
    }
}

// Bookkeeping for u = g · L1 · Can(c) · L2 while c is moved into the chamber.
struct KakState {
    cplx g;
    ComplexMatrix l1, l2;
    std::array<double, 3> c;

    // Can(c) = Can(c - s·π/2·e_k) · (i·s·P_kP_k).
    void shift(int k, int s) {
        c[k] -= s * std::numbers::pi / 2;
        l2 = pauli_pair(k) * l2;
        g *= cplx(0, s);
    }
    // Can(c) = V† Can(c') V for the local V that maps c to c'.
    void conjugate(const ComplexMatrix &v) {
        l1 = l1 * v.adjoint();
        l2 = v * l2;
    }
    void swap(int i, int j) {
        static const ComplexMatrix s = ComplexMatrix{{1.0, 0.0}, {0.0, cplx(0, 1)}};
        const int other = 3 - i - j;
        if (other == 2) conjugate(kron(s, s));
        else if (other == 1) conjugate(kron(gates::hadamard(), gates::hadamard()));
        else conjugate(kron(gates::rx(std::numbers::pi / 2), gates::rx(std::numbers::pi / 2)));
        std::swap(c[i], c[j]);
    }
    // Negates the two coefficients other than `keep`.
    void negate_pair(int keep) {
        const ComplexMatrix p = keep == 0 ? pauli::X() : keep == 1 ? pauli::Y() : pauli::Z();
        conjugate(kron(p, ComplexMatrix::identity(2)));
        for (int k = 0; k < 3; ++k)
            if (k != keep) c[k] = -c[k];
    }
};

}  // namespace detail

/// Can(a, b, c) = exp(i(a XX + b YY + c ZZ)).
inline ComplexMatrix canonical_gate(const std::array<double, 3> &c) {
    const auto b = detail::magic_basis();
    const double a = c[0], bb = c[1], cc = c[2];
    const std::array<cplx, 4> d = {std::polar(1.0, a - bb + cc), std::polar(1.0, a + bb - cc),
                                   std::polar(1.0, -a - bb - cc), std::polar(1.0, -a + bb + cc)};
    return b * ComplexMatrix::diagonal(std::span<const cplx>(d)) * b.adjoint();
}

inline KakDecomposition kak(const ComplexMatrix &u, double tol = 1e-10) {
    if (u.rows() != 4 || u.cols() != 4 || !(unitarity_error(u) < tol)) {
        throw Error(ErrorKind::NotUnitary, "kak needs a 4x4 unitary");
    }
    const ComplexMatrix mb = detail::magic_basis();
    const double det_phase = std::arg(detail::determinant(u)) / 4;
    const ComplexMatrix up = mb.adjoint() * (u * std::polar(1.0, -det_phase)) * mb;
    const ComplexMatrix gram = up.transpose() * up;
    const ComplexMatrix p = detail::simultaneous_real_diagonalizer(gram);
    const ComplexMatrix d = p.transpose() * gram * p;

    std::array<double, 4> theta{};
    for (std::size_t k = 0; k < 4; ++k) theta[k] = std::arg(d(k, k)) / 2;
    ComplexMatrix k1 = up * p;
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t r = 0; r < 4; ++r) k1(r, k) *= std::polar(1.0, -theta[k]);
    if (detail::determinant(k1).real() < 0) {
        theta[0] += std::numbers::pi;
        for (std::size_t r = 0; r < 4; ++r) k1(r, 0) = -k1(r, 0);
    }
    const double mean = (theta[0] + theta[1] + theta[2] + theta[3]) / 4;
    std::array<double, 4> lam{};
    for (std::size_t k = 0; k < 4; ++k) lam[k] = theta[k] - mean;

    detail::KakState st{std::polar(1.0, det_phase + mean), mb * k1 * mb.adjoint(), mb * p.transpose() * mb.adjoint(),
                        {(lam[0] + lam[1]) / 2, (lam[1] + lam[3]) / 2, (lam[0] + lam[3]) / 2}};

    // Into the chamber: reduce mod π/2, sort by magnitude, fix signs.
    constexpr double quarter = std::numbers::pi / 4;
    constexpr double edge = 1e-12;
    for (int k = 0; k < 3; ++k) {
        const long n = std::lround(st.c[k] / (2 * quarter));
        for (long t = 0; t < std::abs(n); ++t) st.shift(k, n > 0 ? 1 : -1);
        if (st.c[k] <= -quarter + edge) st.shift(k, -1);
    }
    for (int pass = 0; pass < 2; ++pass)
        for (int k = 0; k < 2; ++k)
            if (std::abs(st.c[k]) < std::abs(st.c[k + 1])) st.swap(k, k + 1);
    if (st.c[0] < 0 && st.c[1] < 0) st.negate_pair(2);
    else if (st.c[0] < 0) st.negate_pair(1);
    else if (st.c[1] < 0) st.negate_pair(0);
    if (st.c[0] >= quarter - edge && st.c[2] < 0) {
        st.shift(0, 1);
        st.negate_pair(1);
    }

    KakDecomposition out;
    out.coeffs = st.c;
    std::tie(out.after0, out.after1) = detail::kron_factor(st.l1);
    std::tie(out.before0, out.before1) = detail::kron_factor(st.l2);
    // Absorb whatever phase the factorization left behind.
    const ComplexMatrix rebuilt =
        kron(out.after0, out.after1) * canonical_gate(out.coeffs) * kron(out.before0, out.before1);
    out.phase = std::arg((rebuilt.adjoint() * u).trace());
    return out;
}

/// Number of CZ gates needed for the class of the canonical coefficients.
inline int cz_count_for(const std::array<double, 3> &c, double tol = 1e-9) {
    constexpr double quarter = std::numbers::pi / 4;
    if (std::abs(c[0]) < tol && std::abs(c[1]) < tol && std::abs(c[2]) < tol) return 0;
    if (std::abs(c[0] - quarter) < tol && std::abs(c[1]) < tol && std::abs(c[2]) < tol) return 1;
    if (std::abs(c[2]) < tol) return 2;
    return 3;
}

namespace detail {

// A two-qubit layer: either a local pair (on qubit 0, on qubit 1) or a CZ.
struct Layer {
    bool is_cz = false;
    ComplexMatrix on0, on1;
};

inline Layer local(ComplexMatrix a, ComplexMatrix b) { return {false, std::move(a), std::move(b)}; }
inline Layer cz_layer() { return {true, {}, {}}; }

// Time-ordered layers whose product equals Can(c) up to global phase.
inline std::vector<Layer> canonical_core(const std::array<double, 3> &c, int n_cz) {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    const ComplexMatrix h = gates::hadamard();
    const double half_pi = std::numbers::pi / 2;
    std::vector<Layer> out;
    // CNOT with target on qubit t: H_t · CZ · H_t.
    auto cnot = [&](int target) {
        out.push_back(target == 1 ? local(i2, h) : local(h, i2));
        out.push_back(cz_layer());
        out.push_back(target == 1 ? local(i2, h) : local(h, i2));
    };
    switch (n_cz) {
        case 0: break;
        case 1: {
            // Can(π/4,0,0) ∝ (H⊗H)(E⊗E)·CZ·(H⊗H), E = exp(iπ/4 Z).
            const ComplexMatrix e = gates::pauli_exp(pauli::Z(), std::numbers::pi / 4);
            out.push_back(local(h, h));
            out.push_back(cz_layer());
            out.push_back(local(h * e, h * e));
            break;
        }
        case 2: {
            // Can(a,b,0) = V·CNOT₀₁·(e^{iaX}⊗e^{ibZ})·CNOT₀₁·V†, V = Rx(π/2)⊗Rx(π/2).
            const ComplexMatrix v = gates::rx(half_pi);
            out.push_back(local(v.adjoint(), v.adjoint()));
            cnot(1);
            out.push_back(local(gates::pauli_exp(pauli::X(), c[0]), gates::pauli_exp(pauli::Z(), c[1])));
            cnot(1);
            out.push_back(local(v, v));
            break;
        }
        default: {
            // Three-CNOT realization of the canonical gate (Vatan-Williams form).
            out.push_back(local(i2, gates::rz(-half_pi)));
            cnot(0);
            out.push_back(local(gates::rz(half_pi - 2 * c[2]), gates::ry(2 * c[0] - half_pi)));
            cnot(1);
            out.push_back(local(i2, gates::ry(half_pi - 2 * c[1])));
            cnot(0);
            out.push_back(local(gates::rz(half_pi), i2));
            break;
        }
    }
    return out;
}

inline void push_rotation(Circuit &circ, Gate g) {
    if (g.angle == 0.0) return;
    // Merge with the previous gate on the same qubit when it has the same axis.
    for (auto it = circ.gates.rbegin(); it != circ.gates.rend(); ++it) {
        const bool touches = it->q0 == g.q0 || (it->kind == GateKind::CZ && it->q1 == g.q0);
        if (!touches) continue;
        if (it->kind == g.kind) {
            const double merged = it->angle + g.angle;
            const double wrapped = wrap_angle(merged);
            // Rz(θ + 2π) = -Rz(θ), likewise for Rx.
            if (std::abs(std::remainder((merged - wrapped) / (2 * std::numbers::pi), 2.0)) > 0.5) {
                circ.global_phase += std::numbers::pi;
            }
            if (std::abs(wrapped) < 1e-15) circ.gates.erase(std::next(it).base());
            else it->angle = wrapped;
            return;
        }
        break;
    }
    circ.gates.push_back(g);
}

}  // namespace detail

/// Compiles a two-qubit unitary into RX/RZ/CZ with at most three CZ gates.
inline Circuit kak_decompose(const ComplexMatrix &u, double tol = 1e-10) {
    const KakDecomposition k = kak(u, tol);
    const int n_cz = cz_count_for(k.coeffs);

    std::vector<detail::Layer> layers;
    layers.push_back(detail::local(k.before0, k.before1));
    for (auto &l : detail::canonical_core(k.coeffs, n_cz)) layers.push_back(std::move(l));
    layers.push_back(detail::local(k.after0, k.after1));

    // Merge consecutive local layers.
    std::vector<detail::Layer> merged;
    for (auto &l : layers) {
        if (!l.is_cz && !merged.empty() && !merged.back().is_cz) {
            merged.back().on0 = l.on0 * merged.back().on0;
            merged.back().on1 = l.on1 * merged.back().on1;
        } else {
            merged.push_back(std::move(l));
        }
    }

    Circuit circ;
    circ.qubit_count = 2;
    for (const auto &l : merged) {
        if (l.is_cz) {
            circ.gates.push_back(Gate::cz(0, 1));
            continue;
        }
        for (std::size_t q = 0; q < 2; ++q) {
            const ComplexMatrix &m = q == 0 ? l.on0 : l.on1;
            // Strip the determinant phase; the global phase is fixed below.
            const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
            const EulerZXZ e = decompose_1q(m * (1.0 / std::sqrt(det)), 1e-8);
            for (const auto &g : e.gates_on(q)) detail::push_rotation(circ, g);
        }
    }
    circ.global_phase = 0.0;
    const ComplexMatrix raw = circuit_unitary(circ);
    circ.global_phase = std::arg((raw.adjoint() * u).trace());
    if (std::abs(circ.global_phase) < 1e-15) circ.global_phase = 0.0;

    const double fid = process_fidelity(circuit_unitary(circ), u);
    if (!(fid >= 1.0 - 1e-8)) {
        throw Error(ErrorKind::FidelityShortfall, "synthesized circuit fidelity " + std::to_string(fid));
    }
    return circ;
}

// ---------------------------------------------------------------------------
// OpenQASM 2.0 subset

inline std::string format_angle(double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", a);
    return buf;
}

inline std::string emit_circuit_text(const Circuit &c) {
    c.validate();
    std::ostringstream out;
    out << "OPENQASM 2.0;\n";
    out << "include \"qelib1.inc\";\n";
    out << "// global_phase: " << format_angle(c.global_phase) << "\n";
    out << "qreg q[" << c.qubit_count << "];\n";
    for (const auto &g : c.gates) {
        switch (g.kind) {
            case GateKind::RX: out << "rx(" << format_angle(g.angle) << ") q[" << g.q0 << "];\n"; break;
            case GateKind::RZ: out << "rz(" << format_angle(g.angle) << ") q[" << g.q0 << "];\n"; break;
            case GateKind::CZ: out << "cz q[" << g.q0 << "],q[" << g.q1 << "];\n"; break;
        }
    }
    return out.str();
}

namespace detail {

inline std::size_t parse_qubit(const std::string &s, std::size_t &pos) {
    if (s.compare(pos, 2, "q[") != 0) throw Error(ErrorKind::ParseError, "expected q[ in '" + s + "'");
    pos += 2;
    const std::size_t close = s.find(']', pos);
    if (close == std::string::npos) throw Error(ErrorKind::ParseError, "unterminated qubit index");
    const std::string digits = s.substr(pos, close - pos);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
        throw Error(ErrorKind::ParseError, "bad qubit index '" + digits + "'");
    }
    pos = close + 1;
    return std::stoul(digits);
}

inline double parse_number(const std::string &s) {
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::ParseError, "bad number '" + s + "'");
    }
    return v;
}

}  // namespace detail

/// Reads the subset written by emit_circuit_text.
inline Circuit parse_circuit_text(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    Circuit c;
    bool have_header = false, have_qreg = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line == "OPENQASM 2.0;") { have_header = true; continue; }
        if (line == "include \"qelib1.inc\";") continue;
        const std::string phase_tag = "// global_phase: ";
        if (line.rfind(phase_tag, 0) == 0) {
            c.global_phase = detail::parse_number(line.substr(phase_tag.size()));
            continue;
        }
        if (line.rfind("//", 0) == 0) continue;
        if (!have_header) throw Error(ErrorKind::ParseError, "missing OPENQASM 2.0 header");
        if (line.rfind("qreg ", 0) == 0) {
            std::size_t pos = 5;
            if (line.back() != ';') throw Error(ErrorKind::ParseError, "missing ';'");
            c.qubit_count = detail::parse_qubit(line, pos);
            have_qreg = true;
            continue;
        }
        if (!have_qreg) throw Error(ErrorKind::ParseError, "gate before qreg declaration");
        if (line.back() != ';') throw Error(ErrorKind::ParseError, "missing ';' in '" + line + "'");
        if (line.rfind("cz ", 0) == 0) {
            std::size_t pos = 3;
            const std::size_t a = detail::parse_qubit(line, pos);
            if (line.compare(pos, 1, ",") != 0) throw Error(ErrorKind::ParseError, "expected ',' in cz");
            ++pos;
            const std::size_t b = detail::parse_qubit(line, pos);
            if (pos + 1 != line.size()) throw Error(ErrorKind::ParseError, "trailing text in '" + line + "'");
            c.gates.push_back(Gate::cz(a, b));
            continue;
        }
        const bool is_rx = line.rfind("rx(", 0) == 0;
        const bool is_rz = line.rfind("rz(", 0) == 0;
        if (!is_rx && !is_rz) throw Error(ErrorKind::ParseError, "unsupported statement '" + line + "'");
        const std::size_t close = line.find(") ", 3);
        if (close == std::string::npos) throw Error(ErrorKind::ParseError, "malformed rotation '" + line + "'");
        const double angle = detail::parse_number(line.substr(3, close - 3));
        std::size_t pos = close + 2;
        const std::size_t q = detail::parse_qubit(line, pos);
        if (pos + 1 != line.size()) throw Error(ErrorKind::ParseError, "trailing text in '" + line + "'");
        c.gates.push_back(is_rx ? Gate::rx(q, angle) : Gate::rz(q, angle));
    }
    if (!have_header || !have_qreg) throw Error(ErrorKind::ParseError, "incomplete circuit text");
    c.validate();
    return c;
}

}  // namespace qitp
