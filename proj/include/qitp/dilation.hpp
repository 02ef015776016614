#pragma once

// Unitary dilation of the imaginary-time filter.
//
//   U(τ) = [[ Q,  R ],
//           [ R, -Q ]]
//
// with Q = (1 + e^{-2(H-E_T)τ})^{-1/2} e^{-(H-E_T)τ} and
// R = (1 + e^{-2(H-E_T)τ})^{-1/2}. Extended-space index is a·N + β, where a is
// the reservoir (ancilla) bit and β the system index.

#include <cmath>
#include <cstddef>
#include <utility>

#include "qitp/errors.hpp"
#include "qitp/numcore.hpp"

namespace qitp {

enum class TrialMode { Absolute, GroundStateExact, FractionOfGround };

struct ItpParams {
    double tau = 0.0;
    TrialMode trial_mode = TrialMode::GroundStateExact;
    /// Absolute trial energy (Absolute mode) or the fraction f (FractionOfGround).
    double trial_value = 0.0;

    static ItpParams absolute(double tau, double et) { return {tau, TrialMode::Absolute, et}; }
    static ItpParams ground(double tau) { return {tau, TrialMode::GroundStateExact, 0.0}; }
    static ItpParams fraction(double tau, double f) { return {tau, TrialMode::FractionOfGround, f}; }

    void validate() const {
        if (!(tau >= 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::InvalidArgument, "tau must be finite and >= 0");
        if (!std::isfinite(trial_value)) throw Error(ErrorKind::InvalidArgument, "trial energy must be finite");
        if (trial_mode == TrialMode::FractionOfGround && !(trial_value > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "trial-energy fraction must be > 0");
        }
    }

    /// Resolves E_T against the spectrum of h.
    double trial_energy(const HermitianOperator &h) const {
        switch (trial_mode) {
            case TrialMode::Absolute: return trial_value;
            case TrialMode::GroundStateExact: return h.ground_energy();
            case TrialMode::FractionOfGround: return trial_value * h.ground_energy();
        }
        return trial_value;
    }
};

namespace filter {

/// h(E) = 1/sqrt(1 + e^{2(E-E_T)τ}), the eigenvalue of Q at energy E.
inline double q_value(double energy, double trial_energy, double tau) {
    const double x = 2.0 * (energy - trial_energy) * tau;
    if (x > 700.0) return std::exp(-(energy - trial_energy) * tau);
    if (x < -700.0) return 1.0;
    return 1.0 / std::sqrt(1.0 + std::exp(x));
}

/// r(E) = 1/sqrt(1 + e^{-2(E-E_T)τ}), the eigenvalue of R at energy E.
inline double r_value(double energy, double trial_energy, double tau) {
    return q_value(trial_energy, energy, tau);
}

}  // namespace filter

inline ComplexMatrix q_itp(const HermitianOperator &h, const ItpParams &p) {
    p.validate();
    const double et = p.trial_energy(h);
    return matrix_function(h, [&](double e) { return filter::q_value(e, et, p.tau); });
}

inline ComplexMatrix r_itp(const HermitianOperator &h, const ItpParams &p) {
    p.validate();
    const double et = p.trial_energy(h);
    return matrix_function(h, [&](double e) { return filter::r_value(e, et, p.tau); });
}

class DilationUnitary {
  public:
    std::size_t system_dim() const noexcept { return q_.rows(); }
    const ComplexMatrix &u() const noexcept { return u_; }
    const ComplexMatrix &q_block() const noexcept { return q_; }
    const ComplexMatrix &r_block() const noexcept { return r_; }
    const ItpParams &params() const noexcept { return params_; }
    double trial_energy() const noexcept { return trial_energy_; }

  private:
    friend DilationUnitary build_dilation(const HermitianOperator &, const ItpParams &, double);
    ComplexMatrix u_, q_, r_;
    ItpParams params_;
    double trial_energy_ = 0.0;
};

inline DilationUnitary build_dilation(const HermitianOperator &h, const ItpParams &p,
                                      double unitarity_tol = 1e-10) {
    p.validate();
    DilationUnitary d;
    d.params_ = p;
    d.trial_energy_ = p.trial_energy(h);
    d.q_ = matrix_function(h, [&](double e) { return filter::q_value(e, d.trial_energy_, p.tau); });
    d.r_ = matrix_function(h, [&](double e) { return filter::r_value(e, d.trial_energy_, p.tau); });
    const std::size_t n = h.dim();
    d.u_ = ComplexMatrix(2 * n, 2 * n);
    d.u_.set_block(0, 0, d.q_);
    d.u_.set_block(0, n, d.r_);
    d.u_.set_block(n, 0, d.r_);
    d.u_.set_block(n, n, -d.q_);
    const double err = unitarity_error(d.u_);
    if (!(err < unitarity_tol)) {
        throw Error(ErrorKind::UnitarityCheckFailed, "‖U†U - I‖_max = " + std::to_string(err));
    }
    return d;
}

struct ClassicalItpResult {
    CVector unnormalized;
    CVector normalized;
};

/// Plain imaginary-time propagation e^{-(H-E_T)τ}|ψ⟩.
inline ClassicalItpResult classical_itp(const HermitianOperator &h, const ItpParams &p, std::span<const cplx> psi) {
    p.validate();
    if (psi.size() != h.dim()) throw Error(ErrorKind::DimensionMismatch, "state and Hamiltonian dimensions differ");
    const double et = p.trial_energy(h);
    const ComplexMatrix prop = matrix_function(h, [&](double e) { return std::exp(-(e - et) * p.tau); });
    ClassicalItpResult out;
    out.unnormalized = prop * psi;
    const double nrm = norm2(out.unnormalized);
    if (!(nrm >= 1e-300)) throw Error(ErrorKind::ZeroVector, "propagated vector has vanishing norm");
    out.normalized = out.unnormalized;
    for (auto &z : out.normalized) z /= nrm;
    return out;
}

}  // namespace qitp
