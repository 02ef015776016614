#pragma once

// State-vector and density-matrix simulation of the ancilla-assisted
// imaginary-time step: extend, apply U(τ), post-select the ancilla on 0,
// repeat.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qitp/dilation.hpp"
#include "qitp/errors.hpp"
#include "qitp/numcore.hpp"
#include "qitp/rng.hpp"

namespace qitp {

class PureState {
  public:
    /// Takes amplitudes that are already normalized (within 1e-12).
    explicit PureState(CVector amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.empty()) throw Error(ErrorKind::DimensionError, "empty state");
        const double n = norm2(amps_);
        if (std::abs(n - 1.0) > 1e-12) {
            throw Error(ErrorKind::InvalidArgument, "state is not normalized (norm " + std::to_string(n) + ")");
        }
    }

    /// Normalizes arbitrary non-zero amplitudes.
    static PureState normalized(CVector amplitudes) {
        const double n = norm2(amplitudes);
        if (!(n >= 1e-300) || !std::isfinite(n)) throw Error(ErrorKind::ZeroVector, "cannot normalize zero vector");
        for (auto &z : amplitudes) z /= n;
        return PureState(std::move(amplitudes));
    }
    static PureState basis(std::size_t dim, std::size_t k) {
        if (k >= dim) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
        CVector v(dim);
        v[k] = 1.0;
        return PureState(std::move(v));
    }
    static PureState uniform(std::size_t dim) { return normalized(CVector(dim, cplx(1.0))); }

    std::size_t dim() const noexcept { return amps_.size(); }
    std::span<const cplx> amplitudes() const noexcept { return amps_; }
    const cplx &operator[](std::size_t i) const { return amps_[i]; }

    std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
        return p;
    }

  private:
    CVector amps_;
};

class DensityMatrix {
  public:
    explicit DensityMatrix(ComplexMatrix m, double tol = 1e-10) : m_(std::move(m)) {
        if (!m_.is_square() || m_.rows() == 0) throw Error(ErrorKind::DimensionError, "density matrix must be square");
        if (hermiticity_error(m_) > tol) throw Error(ErrorKind::NonHermitianInput, "density matrix not Hermitian");
        if (std::abs(m_.trace() - 1.0) > tol) throw Error(ErrorKind::InvalidArgument, "density matrix trace != 1");
        const auto eig = eigh(m_, EighOptions{.hermitian_tol = tol, .max_dim = 1024});
        if (eig.values.front() < -tol) throw Error(ErrorKind::InvalidArgument, "density matrix not positive");
    }

    static DensityMatrix from_pure(const PureState &psi) {
        const std::size_t n = psi.dim();
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = psi[i] * std::conj(psi[j]);
        return DensityMatrix(std::move(m));
    }

    std::size_t dim() const noexcept { return m_.rows(); }
    const ComplexMatrix &matrix() const noexcept { return m_; }

    std::vector<double> diagonal() const {
        std::vector<double> d(dim());
        for (std::size_t i = 0; i < dim(); ++i) d[i] = m_(i, i).real();
        return d;
    }

  private:
    ComplexMatrix m_;
};

struct NoiseParams {
    double amplitude_damping = 0.0;  // γ per step
    double dephasing = 0.0;          // λ per step
    double readout_flip = 0.0;       // ε per measured bit

    void validate() const {
        auto in = [](double x, double lo, double hi) { return x >= lo && x <= hi; };
        if (!in(amplitude_damping, 0.0, 1.0) || !in(dephasing, 0.0, 1.0) || !in(readout_flip, 0.0, 0.5)) {
            throw Error(ErrorKind::InvalidArgument, "noise parameters out of range");
        }
    }
};

struct ExperimentRecord {
    std::size_t system_dim = 0;
    double trial_energy = 0.0;
    std::vector<double> extended_probs;    // index a·N + β
    double postselect_prob = 0.0;          // p0
    std::vector<double> normalized_probs;  // p_β = p_{0β} / p0
    double energy = 0.0;
    double ground_fidelity = 0.0;  // weight of the post-selected state on the ground eigenspace
    std::vector<std::uint64_t> shot_counts;
    std::size_t repetitions_completed = 0;
    std::uint64_t shots = 0;
};

// ---------------------------------------------------------------------------

/// |0⟩ ⊗ |ψ⟩.
inline PureState extend_with_ancilla(const PureState &psi) {
    CVector v(2 * psi.dim());
    std::copy(psi.amplitudes().begin(), psi.amplitudes().end(), v.begin());
    return PureState(std::move(v));
}

inline PureState apply_step(const PureState &state, const ComplexMatrix &u) {
    if (u.rows() != state.dim() || u.cols() != state.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "unitary and state dimensions differ");
    }
    return PureState(u * state.amplitudes());
}

inline PureState apply_step(const PureState &state, const DilationUnitary &u) { return apply_step(state, u.u()); }

struct PostselectResult {
    PureState system;
    double p0;
};

/// Conditions on the ancilla reading 0. `repetition` only labels the error.
inline PostselectResult postselect_ancilla0(const PureState &state, std::size_t repetition = 0,
                                            double min_probability = 1e-14) {
    if (state.dim() % 2 != 0) throw Error(ErrorKind::DimensionMismatch, "extended state dimension must be even");
    const std::size_t n = state.dim() / 2;
    CVector sys(state.amplitudes().begin(), state.amplitudes().begin() + static_cast<std::ptrdiff_t>(n));
    double p0 = 0.0;
    for (const auto &z : sys) p0 += std::norm(z);
    if (!(p0 >= min_probability)) throw PostselectionImpossible(p0, repetition);
    const double c = 1.0 / std::sqrt(p0);
    for (auto &z : sys) z *= c;
    return {PureState::normalized(std::move(sys)), p0};
}

inline double energy_expectation(std::span<const cplx> psi, const ComplexMatrix &h) {
    if (psi.size() != h.rows()) throw Error(ErrorKind::DimensionMismatch, "state and Hamiltonian dimensions differ");
    const cplx e = inner(psi, h * psi);
    if (std::abs(e.imag()) >= 1e-8) throw Error(ErrorKind::NonRealExpectation, "⟨ψ|H|ψ⟩ has imaginary part");
    return e.real();
}
inline double energy_expectation(const PureState &psi, const HermitianOperator &h) {
    return energy_expectation(psi.amplitudes(), h.matrix());
}
inline double energy_expectation(const DensityMatrix &rho, const HermitianOperator &h) {
    const cplx e = (rho.matrix() * h.matrix()).trace();
    if (std::abs(e.imag()) >= 1e-8) throw Error(ErrorKind::NonRealExpectation, "tr(ρH) has imaginary part");
    return e.real();
}

/// Number of eigenvectors spanning the ground eigenspace.
inline std::size_t ground_cluster_size(const HermitianOperator &h, double degeneracy_tol = 1e-9) {
    const auto e = h.spectrum();
    std::size_t k = 1;
    while (k < e.size() && e[k] - e[0] < degeneracy_tol * std::max(1.0, std::abs(e[0]))) ++k;
    return k;
}

inline double ground_fidelity(const PureState &psi, const HermitianOperator &h) {
    double f = 0.0;
    for (std::size_t k = 0; k < ground_cluster_size(h); ++k) f += std::norm(inner(h.eigenvector(k), psi.amplitudes()));
    return f;
}

inline double ground_fidelity(const DensityMatrix &rho, const HermitianOperator &h) {
    double f = 0.0;
    for (std::size_t k = 0; k < ground_cluster_size(h); ++k) {
        const CVector v = h.eigenvector(k);
        f += inner(v, rho.matrix() * v).real();
    }
    return f;
}

/// Multinomial sample by inverse CDF.
inline std::vector<std::uint64_t> sample_shots(std::span<const double> probs, std::uint64_t shots, std::uint64_t seed) {
    if (probs.empty()) throw Error(ErrorKind::InvalidDistribution, "empty distribution");
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!std::isfinite(probs[i]) || probs[i] < -1e-12) {
            throw Error(ErrorKind::InvalidDistribution, "probabilities must be finite and non-negative");
        }
        acc += std::max(probs[i], 0.0);
        cdf[i] = acc;
    }
    if (std::abs(acc - 1.0) > 1e-9) throw Error(ErrorKind::InvalidDistribution, "probabilities do not sum to 1");
    std::vector<std::uint64_t> counts(probs.size(), 0);
    SplitMix64 rng(seed);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double x = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
        std::size_t idx = it == cdf.end() ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
        while (probs[idx] <= 0.0 && idx > 0) --idx;  // guard the top edge
        ++counts[idx];
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Noise

namespace detail {

// m <- (K on qubit q) · m, qubit 0 being the most significant bit of n.
inline void apply_1q_left(ComplexMatrix &m, const ComplexMatrix &k, std::size_t q, std::size_t n) {
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    for (std::size_t c = 0; c < m.cols(); ++c)
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r & bit) continue;
            const cplx a0 = m(r, c), a1 = m(r | bit, c);
            m(r, c) = k(0, 0) * a0 + k(0, 1) * a1;
            m(r | bit, c) = k(1, 0) * a0 + k(1, 1) * a1;
        }
}

// m <- m · (K on qubit q)†.
inline void apply_1q_right_adjoint(ComplexMatrix &m, const ComplexMatrix &k, std::size_t q, std::size_t n) {
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c & bit) continue;
            const cplx a0 = m(r, c), a1 = m(r, c | bit);
            m(r, c) = a0 * std::conj(k(0, 0)) + a1 * std::conj(k(0, 1));
            m(r, c | bit) = a0 * std::conj(k(1, 0)) + a1 * std::conj(k(1, 1));
        }
}

inline ComplexMatrix apply_kraus_1q(const ComplexMatrix &rho, const std::vector<ComplexMatrix> &ks, std::size_t q,
                                    std::size_t n) {
    ComplexMatrix out(rho.rows(), rho.cols());
    for (const auto &k : ks) {
        ComplexMatrix t = rho;
        apply_1q_left(t, k, q, n);
        apply_1q_right_adjoint(t, k, q, n);
        out += t;
    }
    return out;
}

}  // namespace detail

inline std::vector<ComplexMatrix> amplitude_damping_kraus(double gamma) {
    return {ComplexMatrix{{1.0, 0.0}, {0.0, std::sqrt(1.0 - gamma)}},
            ComplexMatrix{{0.0, std::sqrt(gamma)}, {0.0, 0.0}}};
}

inline std::vector<ComplexMatrix> dephasing_kraus(double lambda) {
    return {ComplexMatrix::identity(2) * std::sqrt(1.0 - lambda), pauli::Z() * std::sqrt(lambda)};
}

/// Smallest n with 2^n >= dim.
inline std::size_t embedding_qubits(std::size_t dim) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    return n;
}

/// Amplitude damping then dephasing on every qubit of an n-qubit register.
/// A dimension below 2^n is embedded in the low indices; both channels map
/// that subspace into itself.
inline DensityMatrix apply_channel(const DensityMatrix &rho, const NoiseParams &noise, std::size_t n_qubits) {
    noise.validate();
    if (n_qubits == 0 || n_qubits > 10 || rho.dim() > (std::size_t{1} << n_qubits) ||
        rho.dim() <= (std::size_t{1} << (n_qubits - 1))) {
        throw Error(ErrorKind::InvalidFactorization,
                    "dimension " + std::to_string(rho.dim()) + " does not fit " + std::to_string(n_qubits) + " qubits");
    }
    const std::size_t full = std::size_t{1} << n_qubits;
    ComplexMatrix m(full, full);
    m.set_block(0, 0, rho.matrix());
    const auto ad = amplitude_damping_kraus(noise.amplitude_damping);
    const auto dp = dephasing_kraus(noise.dephasing);
    for (std::size_t q = 0; q < n_qubits; ++q) {
        if (noise.amplitude_damping > 0.0) m = detail::apply_kraus_1q(m, ad, q, n_qubits);
        if (noise.dephasing > 0.0) m = detail::apply_kraus_1q(m, dp, q, n_qubits);
    }
    return DensityMatrix(m.block(0, 0, rho.dim(), rho.dim()));
}

/// Symmetric bit-flip readout error on an extended distribution (index a·N+β).
/// The ancilla bit is always flipped; system bits only when N is a power of two.
inline std::vector<double> apply_readout_error(std::span<const double> probs, double epsilon) {
    std::vector<double> p(probs.begin(), probs.end());
    if (epsilon == 0.0) return p;
    const std::size_t total = p.size();
    const std::size_t n = total / 2;
    auto flip = [&](auto partner) {
        std::vector<double> q(total);
        for (std::size_t i = 0; i < total; ++i) q[i] = (1.0 - epsilon) * p[i] + epsilon * p[partner(i)];
        p = std::move(q);
    };
    flip([n](std::size_t i) { return i < n ? i + n : i - n; });
    if ((n & (n - 1)) == 0) {
        for (std::size_t bit = 1; bit < n; bit <<= 1) flip([bit](std::size_t i) { return i ^ bit; });
    }
    return p;
}

// ---------------------------------------------------------------------------

struct RunOptions {
    std::size_t repetitions = 1;
    std::uint64_t shots = 0;
    std::uint64_t seed = 42;
    std::optional<NoiseParams> noise;
};

namespace detail {

inline void finish_record(ExperimentRecord &rec, const RunOptions &opt) {
    const std::size_t n = rec.system_dim;
    rec.postselect_prob = 0.0;
    for (std::size_t b = 0; b < n; ++b) rec.postselect_prob += rec.extended_probs[b];
    rec.normalized_probs.assign(n, 0.0);
    if (rec.postselect_prob > 0.0)
        for (std::size_t b = 0; b < n; ++b) rec.normalized_probs[b] = rec.extended_probs[b] / rec.postselect_prob;
    rec.shots = opt.shots;
    rec.shot_counts = sample_shots(rec.extended_probs, opt.shots, opt.seed);
}

}  // namespace detail

/// Runs `repetitions` rounds of extend → U(τ) → post-select. Probabilities in
/// the record describe the final round; shots are drawn from its extended
/// distribution.
inline ExperimentRecord run_itp(const HermitianOperator &h, const ItpParams &p, const PureState &psi0,
                                const RunOptions &opt = {}) {
    if (psi0.dim() != h.dim()) throw Error(ErrorKind::DimensionMismatch, "initial state and Hamiltonian dimensions differ");
    if (opt.repetitions < 1) throw Error(ErrorKind::InvalidArgument, "repetitions must be >= 1");
    const DilationUnitary u = build_dilation(h, p);
    const std::size_t n = h.dim();

    ExperimentRecord rec;
    rec.system_dim = n;
    rec.trial_energy = u.trial_energy();

    if (!opt.noise) {
        PureState state = psi0;
        for (std::size_t rep = 0; rep < opt.repetitions; ++rep) {
            const PureState out = apply_step(extend_with_ancilla(state), u);
            if (rep + 1 == opt.repetitions) rec.extended_probs = out.probabilities();
            state = postselect_ancilla0(out, rep).system;
            rec.repetitions_completed = rep + 1;
        }
        rec.energy = energy_expectation(state, h);
        rec.ground_fidelity = ground_fidelity(state, h);
        detail::finish_record(rec, opt);
        // Exact conditioning; identical to the ratio form up to rounding.
        rec.normalized_probs = state.probabilities();
        return rec;
    }

    const NoiseParams &noise = *opt.noise;
    noise.validate();
    const std::size_t nq = embedding_qubits(2 * n);
    const ComplexMatrix &um = u.u();
    const ComplexMatrix ud = um.adjoint();
    DensityMatrix rho = DensityMatrix::from_pure(psi0);
    for (std::size_t rep = 0; rep < opt.repetitions; ++rep) {
        ComplexMatrix ext(2 * n, 2 * n);
        ext.set_block(0, 0, rho.matrix());
        DensityMatrix evolved(um * ext * ud);
        evolved = apply_channel(evolved, noise, nq);
        if (rep + 1 == opt.repetitions) {
            rec.extended_probs = apply_readout_error(evolved.diagonal(), noise.readout_flip);
        }
        ComplexMatrix top = evolved.matrix().block(0, 0, n, n);
        const double p0 = top.trace().real();
        if (!(p0 >= 1e-14)) throw PostselectionImpossible(p0, rep);
        rho = DensityMatrix(top * cplx(1.0 / p0));
        rec.repetitions_completed = rep + 1;
    }
    rec.energy = energy_expectation(rho, h);
    rec.ground_fidelity = ground_fidelity(rho, h);
    detail::finish_record(rec, opt);
    return rec;
}

}  // namespace qitp
