#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

#include "qitp/hamiltonians.hpp"
#include "test_support.hpp"

using namespace qitp;

namespace {

constexpr double kPi = std::numbers::pi;

GaussianBasis default_basis() {
    GaussianBasis b;
    b.exponents = {0.151623, 0.851819};
    b.coefficients = {0.678914, 0.430129};
    return b;
}

// Adaptive Simpson on [lo, hi]; test-side quadrature oracle.
double simpson(const std::function<double(double)> &f, double lo, double hi, double tol) {
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double a, double b, double fa, double fm, double fb, double whole, int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
            return rec(a, m, fa, flm, fm, left, depth - 1) + rec(m, b, fm, frm, fb, right, depth - 1);
        };
    const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    return rec(lo, hi, fa, fm, fb, (hi - lo) / 6.0 * (fa + 4.0 * fm + fb), 50);
}

double norm_const(double a) { return std::pow(2.0 * a / kPi, 0.75); }

// Radial integrals of nucleus-centred normalized s Gaussians.
double quad_overlap(double a, double b) {
    const double c = norm_const(a) * norm_const(b);
    return 4.0 * kPi * simpson([&](double r) { return c * r * r * std::exp(-(a + b) * r * r); }, 0.0,
                               std::sqrt(60.0 / (a + b)), 1e-15);
}

// ½∫∇g_a·∇g_b d³r, the integrated-by-parts kinetic form.
double quad_kinetic(double a, double b) {
    const double c = norm_const(a) * norm_const(b);
    return 0.5 * 4.0 * kPi *
           simpson([&](double r) { return c * 4.0 * a * b * r * r * r * r * std::exp(-(a + b) * r * r); }, 0.0,
                   std::sqrt(60.0 / (a + b)), 1e-15);
}

double quad_nuclear(double a, double b, double z) {
    const double c = norm_const(a) * norm_const(b);
    return -z * 4.0 * kPi *
           simpson([&](double r) { return c * r * std::exp(-(a + b) * r * r); }, 0.0, std::sqrt(60.0 / (a + b)), 1e-15);
}

// Generalized eigenvalues of (H, S) by Cholesky reduction L⁻¹ H L⁻†.
std::vector<double> generalized_eigenvalues(const ComplexMatrix &h, const ComplexMatrix &s) {
    const std::size_t n = s.rows();
    ComplexMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = s(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx v = s(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * std::conj(l(j, k));
            l(i, j) = v / l(j, j);
        }
    }
    // Forward substitution for L⁻¹.
    ComplexMatrix inv(n, n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t i = 0; i < n; ++i) {
            cplx v = i == c ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * inv(k, c);
            inv(i, c) = v / l(i, i);
        }
    ComplexMatrix a = inv * h * inv.adjoint();
    a = (a + a.adjoint()) * cplx(0.5);
    return eigh(a).values;
}

}  // namespace

TEST(integrals, overlap) {
    EXPECT_DOUBLE_EQ(gaussian_overlap(0.37, 0.37), 1.0);
    EXPECT_NEAR(gaussian_overlap(1.0, 4.0), std::pow(0.8, 1.5), 1e-15);
    EXPECT_NEAR(gaussian_overlap(1.0, 4.0), 0.71554, 1e-5);
    EXPECT_NEAR(quad_overlap(1.0, 4.0), gaussian_overlap(1.0, 4.0), 1e-10);
    EXPECT_DOUBLE_EQ(gaussian_overlap(0.2, 3.0), gaussian_overlap(3.0, 0.2));
}

TEST(integrals, kinetic) {
    EXPECT_NEAR(gaussian_kinetic(0.8, 0.8), 1.2, 1e-15);
    EXPECT_NEAR(gaussian_kinetic(1.0, 4.0), 2.4 * std::pow(0.8, 1.5), 1e-15);
    EXPECT_NEAR(gaussian_kinetic(1.0, 4.0), 1.7173, 1e-4);
    EXPECT_NEAR(quad_kinetic(1.0, 4.0), gaussian_kinetic(1.0, 4.0), 1e-10);
    EXPECT_DOUBLE_EQ(gaussian_kinetic(0.2, 3.0), gaussian_kinetic(3.0, 0.2));
}

TEST(integrals, nuclear) {
    EXPECT_NEAR(gaussian_nuclear(kPi, kPi, 1.0), -2.0 * std::sqrt(2.0), 1e-14);
    // −2·√(5/π)·(4/5)^{3/2}
    EXPECT_NEAR(gaussian_nuclear(1.0, 4.0, 1.0), -2.0 * std::sqrt(5.0 / kPi) * std::pow(0.8, 1.5), 1e-15);
    EXPECT_NEAR(gaussian_nuclear(1.0, 4.0, 1.0), -1.80541, 1e-5);
    EXPECT_NEAR(quad_nuclear(1.0, 4.0, 1.0), gaussian_nuclear(1.0, 4.0, 1.0), 1e-10);
    EXPECT_NEAR(gaussian_nuclear(1.0, 4.0, 3.0), 3.0 * gaussian_nuclear(1.0, 4.0, 1.0), 1e-14);
    EXPECT_LT(gaussian_nuclear(0.3, 2.0, 1.0), 0.0);
    EXPECT_THROW(gaussian_overlap(0.0, 1.0), Error);
}

TEST(integrals, closed_forms_match_quadrature_on_log_grid) {
    std::vector<double> grid;
    for (int k = 0; k <= 8; ++k) grid.push_back(0.01 * std::pow(10.0, k * 0.5));  // 0.01 .. 100
    for (double a : grid)
        for (double b : grid) {
            EXPECT_NEAR(quad_overlap(a, b) / gaussian_overlap(a, b), 1.0, 1e-8) << a << " " << b;
            EXPECT_NEAR(quad_kinetic(a, b) / gaussian_kinetic(a, b), 1.0, 1e-8) << a << " " << b;
            EXPECT_NEAR(quad_nuclear(a, b, 1.0) / gaussian_nuclear(a, b, 1.0), 1.0, 1e-8) << a << " " << b;
        }
}

TEST(hydrogen, orthonormal_input_leaves_hamiltonian) {
    const ComplexMatrix x = orthonormalizing_transform(ComplexMatrix::identity(2), Orthogonalization::Symmetric);
    EXPECT_LT(max_abs_diff(x, ComplexMatrix::identity(2)), 1e-15);
    std::mt19937_64 rng(1);
    const ComplexMatrix h = fixtures::random_hermitian(2, rng);
    EXPECT_LT(max_abs_diff(x.adjoint() * h * x, h), 1e-15);
    const ComplexMatrix xc = orthonormalizing_transform(ComplexMatrix::identity(2), Orthogonalization::Canonical);
    EXPECT_LT(max_abs_diff(xc.adjoint() * h * xc, h), 1e-15);
}

TEST(hydrogen, default_basis_spectrum_matches_generalized_problem) {
    const HydrogenModel m = hydrogen_sto2g(default_basis());
    const auto oracle = generalized_eigenvalues(m.raw, m.overlap);
    EXPECT_NEAR(m.h_orth.spectrum()[0], oracle[0], 1e-10);
    EXPECT_NEAR(m.h_orth.spectrum()[1], oracle[1], 1e-10);
    // Closed-form 2×2 oracle: det(H − λS) = 0.
    const double s01 = m.overlap(0, 1).real();
    const double h00 = m.raw(0, 0).real(), h11 = m.raw(1, 1).real(), h01 = m.raw(0, 1).real();
    const double qa = 1.0 - s01 * s01, qb = -(h00 + h11 - 2.0 * h01 * s01), qc = h00 * h11 - h01 * h01;
    const double disc = std::sqrt(qb * qb - 4.0 * qa * qc);
    EXPECT_NEAR(m.h_orth.ground_energy(), (-qb - disc) / (2.0 * qa), 1e-10);
    EXPECT_LT(m.h_orth.ground_energy(), 0.0);
    EXPECT_EQ(m.h_orth.units(), Units::Hartree);
}

TEST(hydrogen, ground_state_occupations) {
    const HydrogenModel m = hydrogen_sto2g(default_basis());
    const CVector g = m.h_orth.ground_state();
    EXPECT_NEAR(std::norm(g[0]), 0.020, 0.02);
    EXPECT_NEAR(std::norm(g[1]), 0.980, 0.02);
}

TEST(hydrogen, transform_orthonormalizes) {
    for (auto kind : {Orthogonalization::Canonical, Orthogonalization::Symmetric}) {
        GaussianBasis b = default_basis();
        b.orthogonalization = kind;
        const HydrogenModel m = hydrogen_sto2g(b);
        EXPECT_LT(max_abs_diff(m.transform.adjoint() * m.overlap * m.transform, ComplexMatrix::identity(2)), 1e-10);
        EXPECT_LT(max_abs_diff(m.h_orth.matrix(), m.transform.adjoint() * m.raw * m.transform), 1e-12);
    }
}

TEST(hydrogen, contracted_orbital_energy) {
    const GaussianBasis b = default_basis();
    const double e = contracted_energy(b);
    // Quadrature oracle on φ = Σ d_i g_i.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const double a = b.exponents[i], c = b.exponents[j], d = b.coefficients[i] * b.coefficients[j];
            num += d * (quad_kinetic(a, c) + quad_nuclear(a, c, 1.0));
            den += d * quad_overlap(a, c);
        }
    EXPECT_NEAR(e, num / den, 1e-10);
    // Variational ordering: exact −0.5 < 2×2 ground energy <= contracted energy.
    EXPECT_GT(e, -0.5);
    EXPECT_GE(e, hydrogen_sto2g(b).h_orth.ground_energy());
}

TEST(hydrogen, singular_overlap_rejected) {
    GaussianBasis b = default_basis();
    b.exponents = {0.5, 0.5};
    try {
        hydrogen_sto2g(b);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularOverlap);
    }
}

TEST(hydrogen, basis_json_round_trip) {
    const GaussianBasis b = gaussian_basis_from_json(to_json(default_basis()));
    EXPECT_EQ(b.exponents, default_basis().exponents);
    EXPECT_EQ(b.coefficients, default_basis().coefficients);
    EXPECT_THROW(gaussian_basis_from_json(nlohmann::json{{"exponents", {1.0}}}), Error);
    EXPECT_THROW(gaussian_basis_from_json(nlohmann::json{{"exponents", {1.0, -1.0}}, {"coefficients", {1.0, 1.0}}}),
                 Error);
}

TEST(hamiltonian_properties, transform_spectrum_matches_generalized) {
    std::mt19937_64 rng(50);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 5);
        // Well-conditioned S: Hermitian with spectrum in [0.3, 2].
        std::uniform_real_distribution<double> u(0.3, 2.0);
        std::vector<double> ev(n);
        for (auto &x : ev) x = u(rng);
        const ComplexMatrix s = fixtures::hermitian_with_spectrum(ev, rng);
        const ComplexMatrix h = fixtures::random_hermitian(n, rng);
        const auto oracle = generalized_eigenvalues(h, s);
        for (auto kind : {Orthogonalization::Canonical, Orthogonalization::Symmetric}) {
            const ComplexMatrix x = orthonormalizing_transform(s, kind);
            ASSERT_LT(max_abs_diff(x.adjoint() * s * x, ComplexMatrix::identity(n)), 1e-10);
            ComplexMatrix ho = x.adjoint() * h * x;
            const auto got = eigh((ho + ho.adjoint()) * cplx(0.5)).values;
            for (std::size_t k = 0; k < n; ++k) ASSERT_NEAR(got[k], oracle[k], 1e-10) << t;
        }
    }
}

TEST(two_neutron, vector_coupling_splits_singlet_triplet) {
    SpinCouplings c;
    c.a1 = 1.0;
    const HermitianOperator v = two_neutron_sd(c);
    const auto &e = v.spectrum();
    EXPECT_NEAR(e[0], -3.0, 1e-12);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(e[k], 1.0, 1e-12);
    EXPECT_EQ(v.units(), Units::MeV);
}

TEST(two_neutron, zz_tensor) {
    SpinCouplings c;
    c.a2[2][2] = 0.7;
    const HermitianOperator v = two_neutron_sd(c);
    const std::vector<double> d = {0.7, -0.7, -0.7, 0.7};
    EXPECT_LT(max_abs_diff(v.matrix(), ComplexMatrix::diagonal(std::span<const double>(d))), 1e-15);
    EXPECT_NEAR(v.spectrum()[0], -0.7, 1e-12);
    EXPECT_NEAR(v.spectrum()[3], 0.7, 1e-12);
}

TEST(two_neutron, traceless_and_hermitian) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        SpinCouplings c;
        c.a1 = n(rng);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i; j < 3; ++j) c.a2[i][j] = c.a2[j][i] = n(rng);
        const HermitianOperator v = two_neutron_sd(c);
        EXPECT_NEAR(std::abs(v.matrix().trace()), 0.0, 1e-12);
        EXPECT_LT(hermiticity_error(v.matrix()), 1e-15);
    }
}

TEST(two_neutron, diagonal_tensor_conserves_total_sz) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 1.0);
    const auto s = spin_paulis();
    const ComplexMatrix sz = kron(s[2], pauli::I()) + kron(pauli::I(), s[2]);
    for (int t = 0; t < 20; ++t) {
        SpinCouplings c;
        c.a1 = n(rng);
        c.a2[0][0] = n(rng);
        c.a2[1][1] = c.a2[0][0];  // axial symmetry about z
        c.a2[2][2] = n(rng);
        EXPECT_LT(commutator(two_neutron_sd(c).matrix(), sz).max_abs(), 1e-12);
    }
}

TEST(two_neutron, asymmetric_tensor_rejected) {
    SpinCouplings c;
    c.a2[0][1] = 1.0;
    EXPECT_THROW(two_neutron_sd(c), Error);
}

TEST(two_neutron, couplings_json) {
    const auto c = spin_couplings_from_json(nlohmann::json::parse(R"({"a1": 1.5, "a2": [[0.2,0,0.1],[0,-0.3,0],[0.1,0,0.5]]})"));
    EXPECT_DOUBLE_EQ(c.a1, 1.5);
    EXPECT_DOUBLE_EQ(c.a2[0][2], 0.1);
    EXPECT_THROW(spin_couplings_from_json(nlohmann::json::parse(R"({"a2": [[1,2],[3,4]]})")), Error);
}

TEST(load_hamiltonian, identity_document) {
    const HermitianOperator h = load_hamiltonian(
        nlohmann::json::parse(R"({"dim": 2, "units": "dimensionless", "matrix": [[[1,0],[0,0]],[[0,0],[1,0]]]})"));
    EXPECT_EQ(h.spectrum()[0], 1.0);
    EXPECT_EQ(h.spectrum()[1], 1.0);
    EXPECT_EQ(h.units(), Units::Dimensionless);
}

TEST(load_hamiltonian, non_hermitian_rejected) {
    try {
        load_hamiltonian(R"({"dim": 2, "units": "mev", "matrix": [[[0,0],[1,0]],[[2,0],[0,0]]]})");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonHermitianInput);
    }
}

TEST(load_hamiltonian, shape_and_parse_errors) {
    auto kind_of = [](const std::string &doc) {
        try {
            load_hamiltonian(doc);
        } catch (const Error &e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    EXPECT_EQ(kind_of(R"({"dim": 0, "units": "mev", "matrix": []})"), ErrorKind::DimensionError);
    EXPECT_EQ(kind_of(R"({"dim": 65, "units": "mev", "matrix": []})"), ErrorKind::DimensionError);
    EXPECT_EQ(kind_of(R"({"dim": 2, "units": "mev", "matrix": [[[1,0],[0,0]]]})"), ErrorKind::DimensionError);
    EXPECT_EQ(kind_of(R"({"dim": 1, "units": "furlongs", "matrix": [[[1,0]]]})"), ErrorKind::ParseError);
    EXPECT_EQ(kind_of(R"({"dim": 1, "units": "mev", "matrix": [[1]]})"), ErrorKind::ParseError);
    EXPECT_EQ(kind_of(R"({"dim": 1, "units": "mev")"), ErrorKind::ParseError);
    EXPECT_EQ(kind_of("/nonexistent/file.json"), ErrorKind::ParseError);
}

TEST(load_hamiltonian, hydrogen_round_trip_is_bitwise) {
    const HermitianOperator h = hydrogen_sto2g(default_basis()).h_orth;
    const std::string text = hamiltonian_to_json(h, {{"builder", "hydrogen-sto2g"}}).dump();
    const HermitianOperator back = load_hamiltonian(text);
    EXPECT_EQ(back.matrix(), h.matrix());
    EXPECT_EQ(back.units(), Units::Hartree);
}
