#pragma once

// Benchmark Hamiltonians: hydrogen in a two-primitive STO-2G space and the
// spin-dependent interaction of two neutrons at fixed separation. Also the
// JSON reader/writer for arbitrary Hermitian matrices.

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "qitp/errors.hpp"
#include "qitp/numcore.hpp"

namespace qitp {

// ---------------------------------------------------------------------------
// Normalized s-type Gaussian integrals, g_a(r) = (2a/π)^{3/4} e^{-a r²}, all
// centred on the nucleus.

inline double gaussian_overlap(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::InvalidArgument, "Gaussian exponents must be positive");
    return std::pow(2.0 * std::sqrt(a * b) / (a + b), 1.5);
}

/// ⟨g_a| -½∇² |g_b⟩ in Hartree.
inline double gaussian_kinetic(double a, double b) { return 3.0 * a * b / (a + b) * gaussian_overlap(a, b); }

/// ⟨g_a| -z/r |g_b⟩ in Hartree.
inline double gaussian_nuclear(double a, double b, double z) {
    if (!(z > 0.0)) throw Error(ErrorKind::InvalidArgument, "nuclear charge must be positive");
    return -z * 2.0 * std::sqrt((a + b) / std::numbers::pi) * gaussian_overlap(a, b);
}

enum class Orthogonalization {
    /// X = U s^{-1/2}, columns in ascending overlap-eigenvalue order.
    Canonical,
    /// X = S^{-1/2} (Löwdin).
    Symmetric,
};

inline Orthogonalization orthogonalization_from_string(const std::string &s) {
    if (s == "canonical") return Orthogonalization::Canonical;
    if (s == "symmetric" || s == "lowdin") return Orthogonalization::Symmetric;
    throw Error(ErrorKind::ParseError, "unknown orthogonalization '" + s + "'");
}

inline std::string to_string(Orthogonalization o) {
    return o == Orthogonalization::Canonical ? "canonical" : "symmetric";
}

struct GaussianBasis {
    std::array<double, 2> exponents{};     // unscaled, for ζ = 1
    std::array<double, 2> coefficients{};  // contraction of the STO-2G orbital
    double slater_zeta = 1.0;
    double nuclear_charge = 1.0;
    Orthogonalization orthogonalization = Orthogonalization::Canonical;

    void validate() const {
        for (double a : exponents)
            if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorKind::InvalidArgument, "exponents must be > 0");
        if (coefficients[0] == 0.0 && coefficients[1] == 0.0) {
            throw Error(ErrorKind::InvalidArgument, "at least one contraction coefficient must be non-zero");
        }
        if (!(slater_zeta > 0.0)) throw Error(ErrorKind::InvalidArgument, "slater zeta must be > 0");
        if (!(nuclear_charge > 0.0)) throw Error(ErrorKind::InvalidArgument, "nuclear charge must be > 0");
    }

    /// Exponents after the ζ² scaling rule.
    std::array<double, 2> scaled_exponents() const {
        return {exponents[0] * slater_zeta * slater_zeta, exponents[1] * slater_zeta * slater_zeta};
    }
};

inline GaussianBasis gaussian_basis_from_json(const nlohmann::json &j) {
    try {
        GaussianBasis b;
        const auto e = j.at("exponents").get<std::vector<double>>();
        const auto c = j.at("coefficients").get<std::vector<double>>();
        if (e.size() != 2 || c.size() != 2) throw Error(ErrorKind::ParseError, "basis needs exactly two primitives");
        b.exponents = {e[0], e[1]};
        b.coefficients = {c[0], c[1]};
        b.slater_zeta = j.value("zeta", 1.0);
        b.nuclear_charge = j.value("nuclear_charge", 1.0);
        b.orthogonalization = orthogonalization_from_string(j.value("orthogonalization", std::string("canonical")));
        b.validate();
        return b;
    } catch (const nlohmann::json::exception &ex) {
        throw Error(ErrorKind::ParseError, ex.what());
    }
}

inline nlohmann::json to_json(const GaussianBasis &b) {
    return {{"exponents", b.exponents},
            {"coefficients", b.coefficients},
            {"zeta", b.slater_zeta},
            {"nuclear_charge", b.nuclear_charge},
            {"orthogonalization", to_string(b.orthogonalization)}};
}

struct HydrogenModel {
    HermitianOperator h_orth;
    ComplexMatrix overlap;    // S
    ComplexMatrix raw;        // H in the primitive basis
    ComplexMatrix transform;  // X, with X† S X = I and h_orth = X† H X
};

namespace detail {

inline ComplexMatrix real_symmetric(const std::array<double, 2> &alpha, auto &&integral) {
    ComplexMatrix m(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) m(i, j) = integral(alpha[i], alpha[j]);
    return m;
}

}  // namespace detail

/// Orthonormalizing transform for an overlap matrix. Canonical columns are
/// signed so their last non-negligible entry is positive.
inline ComplexMatrix orthonormalizing_transform(const ComplexMatrix &s, Orthogonalization kind,
                                                double min_eigenvalue = 1e-10) {
    const auto eig = eigh(s);
    if (eig.values.front() < min_eigenvalue) {
        throw Error(ErrorKind::SingularOverlap, "overlap eigenvalue " + std::to_string(eig.values.front()));
    }
    const std::size_t n = s.rows();
    ComplexMatrix u = eig.vectors;
    if (kind == Orthogonalization::Canonical) {
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t last = n;
            for (std::size_t r = n; r-- > 0;)
                if (std::abs(u(r, k)) > 1e-12) { last = r; break; }
            if (last < n) {
                const cplx ph = std::conj(u(last, k)) / std::abs(u(last, k));
                for (std::size_t r = 0; r < n; ++r) u(r, k) *= ph;
            }
        }
    }
    ComplexMatrix scaled = u;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t r = 0; r < n; ++r) scaled(r, k) /= std::sqrt(eig.values[k]);
    return kind == Orthogonalization::Canonical ? scaled : scaled * u.adjoint();
}

inline HydrogenModel hydrogen_sto2g(const GaussianBasis &basis) {
    basis.validate();
    const auto alpha = basis.scaled_exponents();
    const double z = basis.nuclear_charge;
    ComplexMatrix s = detail::real_symmetric(alpha, gaussian_overlap);
    ComplexMatrix h = detail::real_symmetric(
        alpha, [z](double a, double b) { return gaussian_kinetic(a, b) + gaussian_nuclear(a, b, z); });
    ComplexMatrix x = orthonormalizing_transform(s, basis.orthogonalization);
    ComplexMatrix ho = x.adjoint() * h * x;
    // Symmetrize away rounding so the operator is exactly Hermitian.
    ho = (ho + ho.adjoint()) * cplx(0.5);
    return {HermitianOperator(std::move(ho), Units::Hartree), std::move(s), std::move(h), std::move(x)};
}

/// Energy of the contracted STO-2G orbital, ⟨φ|H|φ⟩/⟨φ|φ⟩ with φ = Σ d_i g_i.
inline double contracted_energy(const GaussianBasis &basis) {
    basis.validate();
    const auto alpha = basis.scaled_exponents();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const double d = basis.coefficients[i] * basis.coefficients[j];
            num += d * (gaussian_kinetic(alpha[i], alpha[j]) + gaussian_nuclear(alpha[i], alpha[j], basis.nuclear_charge));
            den += d * gaussian_overlap(alpha[i], alpha[j]);
        }
    return num / den;
}

// ---------------------------------------------------------------------------
// Two neutrons

struct SpinCouplings {
    double a1 = 0.0;                                  // MeV
    std::array<std::array<double, 3>, 3> a2{};        // MeV, symmetric

    void validate() const {
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                if (!std::isfinite(a2[i][j])) throw Error(ErrorKind::InvalidArgument, "non-finite coupling");
                if (std::abs(a2[i][j] - a2[j][i]) > 1e-12) {
                    throw Error(ErrorKind::InvalidArgument, "tensor coupling must be symmetric");
                }
            }
        if (!std::isfinite(a1)) throw Error(ErrorKind::InvalidArgument, "non-finite coupling");
    }
};

inline SpinCouplings spin_couplings_from_json(const nlohmann::json &j) {
    try {
        SpinCouplings c;
        c.a1 = j.value("a1", 0.0);
        if (j.contains("a2")) {
            const auto rows = j.at("a2").get<std::vector<std::vector<double>>>();
            if (rows.size() != 3) throw Error(ErrorKind::ParseError, "a2 must be 3x3");
            for (std::size_t i = 0; i < 3; ++i) {
                if (rows[i].size() != 3) throw Error(ErrorKind::ParseError, "a2 must be 3x3");
                for (std::size_t k = 0; k < 3; ++k) c.a2[i][k] = rows[i][k];
            }
        }
        c.validate();
        return c;
    } catch (const nlohmann::json::exception &ex) {
        throw Error(ErrorKind::ParseError, ex.what());
    }
}

inline nlohmann::json to_json(const SpinCouplings &c) { return {{"a1", c.a1}, {"a2", c.a2}}; }

/// Pauli matrices in the single-spin basis (|↓⟩, |↑⟩).
inline std::array<ComplexMatrix, 3> spin_paulis() {
    return {ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}}, ComplexMatrix{{0.0, cplx(0, 1)}, {cplx(0, -1), 0.0}},
            ComplexMatrix{{-1.0, 0.0}, {0.0, 1.0}}};
}

/// V = A₁ Σ_α σ¹_α σ²_α + Σ_{αβ} σ¹_α A₂^{αβ} σ²_β on |↓↓⟩, |↓↑⟩, |↑↓⟩, |↑↑⟩.
inline HermitianOperator two_neutron_sd(const SpinCouplings &c) {
    c.validate();
    const auto s = spin_paulis();
    ComplexMatrix v(4, 4);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            const double coeff = c.a2[a][b] + (a == b ? c.a1 : 0.0);
            if (coeff != 0.0) v += kron(s[a], s[b]) * cplx(coeff);
        }
    return HermitianOperator(std::move(v), Units::MeV);
}

// ---------------------------------------------------------------------------
// Hamiltonian JSON documents:
//   { "dim": n, "units": "hartree"|"mev"|"dimensionless",
//     "matrix": [[[re, im], ...], ...], "provenance": {...} (optional) }

inline nlohmann::json hamiltonian_to_json(const ComplexMatrix &m, Units units,
                                          const nlohmann::json &provenance = nullptr) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    nlohmann::json doc = {{"dim", m.rows()}, {"units", to_string(units)}, {"matrix", std::move(rows)}};
    if (!provenance.is_null()) doc["provenance"] = provenance;
    return doc;
}

inline nlohmann::json hamiltonian_to_json(const HermitianOperator &h, const nlohmann::json &provenance = nullptr) {
    return hamiltonian_to_json(h.matrix(), h.units(), provenance);
}

inline HermitianOperator load_hamiltonian(const nlohmann::json &doc, double hermitian_tol = 1e-10) {
    ComplexMatrix m;
    Units units = Units::Dimensionless;
    try {
        const auto dim = doc.at("dim").get<long long>();
        if (dim < 1 || dim > 64) throw Error(ErrorKind::DimensionError, "dim must be in [1, 64]");
        units = units_from_string(doc.at("units").get<std::string>());
        const auto &rows = doc.at("matrix");
        const auto n = static_cast<std::size_t>(dim);
        if (!rows.is_array() || rows.size() != n) throw Error(ErrorKind::DimensionError, "matrix row count != dim");
        m = ComplexMatrix(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto &row = rows[i];
            if (!row.is_array() || row.size() != n) throw Error(ErrorKind::DimensionError, "matrix column count != dim");
            for (std::size_t j = 0; j < n; ++j) {
                const auto &e = row[j];
                if (!e.is_array() || e.size() != 2) throw Error(ErrorKind::ParseError, "entries must be [re, im]");
                m(i, j) = cplx(e[0].get<double>(), e[1].get<double>());
            }
        }
    } catch (const nlohmann::json::exception &ex) {
        throw Error(ErrorKind::ParseError, ex.what());
    }
    if (!m.all_finite()) throw Error(ErrorKind::ParseError, "matrix has non-finite entries");
    if (hermiticity_error(m) > hermitian_tol) throw Error(ErrorKind::NonHermitianInput, "matrix is not Hermitian");
    return HermitianOperator(std::move(m), units);
}

inline nlohmann::json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &ex) {
        throw Error(ErrorKind::ParseError, path + ": " + ex.what());
    }
}

/// Accepts a file path or an inline JSON document (anything starting with '{').
inline HermitianOperator load_hamiltonian(const std::string &source) {
    std::size_t k = source.find_first_not_of(" \t\r\n");
    if (k != std::string::npos && source[k] == '{') {
        try {
            return load_hamiltonian(nlohmann::json::parse(source));
        } catch (const nlohmann::json::exception &ex) {
            throw Error(ErrorKind::ParseError, ex.what());
        }
    }
    return load_hamiltonian(read_json_file(source));
}

inline HermitianOperator load_hamiltonian(const char *source) { return load_hamiltonian(std::string(source)); }

}  // namespace qitp
