#include <cmath>
#include <random>

#include "gtest/gtest.h"

#include "qitp/dilation.hpp"
#include "test_support.hpp"

using namespace qitp;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ComplexMatrix diag(std::vector<double> d) { return ComplexMatrix::diagonal(std::span<const double>(d)); }

}  // namespace

TEST(q_itp, zero_tau_is_scaled_identity) {
    std::mt19937_64 rng(1);
    const HermitianOperator h(fixtures::random_hermitian(4, rng));
    const ComplexMatrix q = q_itp(h, ItpParams::absolute(0.0, 0.3));
    EXPECT_LT(max_abs_diff(q, ComplexMatrix::identity(4) * cplx(kInvSqrt2)), 1e-15);
}

TEST(q_itp, hamiltonian_at_trial_energy) {
    const HermitianOperator h(ComplexMatrix::identity(3) * cplx(-0.7));
    const ComplexMatrix q = q_itp(h, ItpParams::absolute(17.0, -0.7));
    EXPECT_LT(max_abs_diff(q, ComplexMatrix::identity(3) * cplx(kInvSqrt2)), 1e-15);
}

TEST(q_itp, two_level_large_tau) {
    const HermitianOperator h(diag({0.0, 1.0}));
    const ComplexMatrix q = q_itp(h, ItpParams::absolute(20.0, 0.0));
    // Oracle in extended precision.
    const long double small = 1.0L / std::sqrt(1.0L + std::exp(40.0L));
    EXPECT_NEAR(q(0, 0).real(), kInvSqrt2, 1e-15);
    EXPECT_NEAR(q(1, 1).real() / static_cast<double>(small), 1.0, 1e-12);
    EXPECT_NEAR(q(1, 1).real(), 2.06e-9, 0.01e-9);
    EXPECT_EQ(q(0, 1), cplx(0.0));
}

TEST(q_itp, filter_overflow_branches) {
    EXPECT_EQ(filter::q_value(-1000.0, 0.0, 1.0), 1.0);
    EXPECT_NEAR(filter::q_value(400.0, 0.0, 1.0), std::exp(-400.0), 1e-300);
    EXPECT_GT(filter::q_value(400.0, 0.0, 1.0), 0.0);
    EXPECT_NEAR(filter::r_value(-400.0, 0.0, 1.0), std::exp(-400.0), 1e-300);
    for (double e : {-3.0, -0.2, 0.0, 0.5, 2.0}) {
        const double q = filter::q_value(e, 0.1, 3.0);
        const double r = filter::r_value(e, 0.1, 3.0);
        EXPECT_NEAR(q * q + r * r, 1.0, 1e-15);
    }
}

TEST(build_dilation, scalar_hamiltonian_gives_hadamard) {
    const HermitianOperator h(ComplexMatrix{{0.25}});
    const DilationUnitary d = build_dilation(h, ItpParams::absolute(3.0, 0.25));
    const ComplexMatrix had = ComplexMatrix{{1.0, 1.0}, {1.0, -1.0}} * cplx(kInvSqrt2);
    EXPECT_LT(max_abs_diff(d.u(), had), 1e-15);
}

TEST(build_dilation, random_dim4_is_unitary) {
    std::mt19937_64 rng(4);
    const HermitianOperator h(fixtures::random_hermitian(4, rng));
    const DilationUnitary d = build_dilation(h, ItpParams::ground(5.0));
    EXPECT_LT(unitarity_error(d.u()), 1e-12);
}

TEST(build_dilation, block_layout) {
    std::mt19937_64 rng(6);
    const HermitianOperator h(fixtures::random_hermitian(3, rng));
    const DilationUnitary d = build_dilation(h, ItpParams::absolute(1.3, 0.2));
    EXPECT_EQ(d.u().block(0, 0, 3, 3), d.q_block());
    EXPECT_EQ(d.u().block(0, 3, 3, 3), d.r_block());
    EXPECT_EQ(d.u().block(3, 0, 3, 3), d.r_block());
    EXPECT_EQ(d.u().block(3, 3, 3, 3), -d.q_block());
    EXPECT_EQ(d.system_dim(), 3u);
    EXPECT_DOUBLE_EQ(d.trial_energy(), 0.2);
}

TEST(build_dilation, fraction_mode_resolves_trial_energy) {
    const HermitianOperator h(diag({-2.0, 1.0}));
    const DilationUnitary d = build_dilation(h, ItpParams::fraction(1.0, 0.5));
    EXPECT_DOUBLE_EQ(d.trial_energy(), -1.0);
}

TEST(build_dilation, invalid_params_rejected) {
    const HermitianOperator h(diag({0.0, 1.0}));
    EXPECT_THROW(build_dilation(h, ItpParams::absolute(-1.0, 0.0)), Error);
    EXPECT_THROW(build_dilation(h, ItpParams::fraction(1.0, 0.0)), Error);
    EXPECT_THROW(build_dilation(h, ItpParams::absolute(1.0, std::nan(""))), Error);
}

// Unitarity and Q² + R² = I over a seeded ensemble.
TEST(dilation_properties, unitarity_and_block_identity) {
    std::mt19937_64 rng(100);
    int count = 0;
    for (std::size_t n : {2u, 4u, 8u}) {
        for (int trial = 0; trial < 34; ++trial) {
            const HermitianOperator h(fixtures::random_hermitian(n, rng, 2.0));
            for (double tau : {0.01, 1.0, 100.0}) {
                const DilationUnitary d = build_dilation(h, ItpParams::ground(tau));
                ASSERT_LT(unitarity_error(d.u()), 1e-12);
                const ComplexMatrix sum = d.q_block() * d.q_block() + d.r_block() * d.r_block();
                ASSERT_LT(max_abs_diff(sum, ComplexMatrix::identity(n)), 1e-12);
                ASSERT_LT(hermiticity_error(d.q_block()), 1e-12);
                ASSERT_LT(max_abs_diff(commutator(d.q_block(), d.r_block()), ComplexMatrix(n, n)), 1e-12);
            }
            ++count;
        }
    }
    EXPECT_GE(count, 100);
}

TEST(dilation_properties, small_tau_second_order) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix m = fixtures::random_hermitian(4, rng);
        const HermitianOperator h(m);
        const double et = 0.1;
        const double scale = (m - ComplexMatrix::identity(4) * cplx(et)).frobenius();
        auto residual = [&](double tau) {
            const ComplexMatrix q = q_itp(h, ItpParams::absolute(tau, et));
            const ComplexMatrix ref =
                matrix_function(h, [&](double e) { return kInvSqrt2 * std::exp(-(e - et) * tau / 2.0); });
            return max_abs_diff(q, ref);
        };
        const double tau = 1e-2 / scale;
        const double ratio = residual(tau) / residual(tau / 2.0);
        EXPECT_GE(ratio, 3.5) << trial;
        EXPECT_LE(ratio, 4.5) << trial;
    }
}

TEST(dilation_properties, large_tau_projects_on_ground) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator h(fixtures::random_hermitian(5, rng));
        const double gap = h.first_excited_energy() - h.ground_energy();
        const double tau = 40.0 / gap;
        const CVector psi = fixtures::random_state(5, rng);
        const CVector got = q_itp(h, ItpParams::ground(tau)) * psi;
        const CVector phi0 = h.ground_state();
        const cplx c0 = inner(phi0, psi);
        CVector diff(5);
        for (std::size_t i = 0; i < 5; ++i) diff[i] = got[i] - c0 * kInvSqrt2 * phi0[i];
        EXPECT_LT(norm2(diff), 1e-8) << trial;
    }
}

TEST(dilation_properties, filter_strictly_decreasing) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator h(fixtures::random_hermitian(6, rng));
        const double tau = 0.5 + trial * 0.2;
        const ComplexMatrix q = q_itp(h, ItpParams::ground(tau));
        const ComplexMatrix v = h.eigenbasis();
        const ComplexMatrix qd = v.adjoint() * q * v;
        const auto &e = h.spectrum();
        for (std::size_t i = 0; i < e.size(); ++i) {
            EXPECT_NEAR(qd(i, i).real(), filter::q_value(e[i], e[0], tau), 1e-12);
            for (std::size_t j = 0; j < e.size(); ++j)
                if (e[i] < e[j] - 1e-12) {
                    EXPECT_GT(filter::q_value(e[i], e[0], tau), filter::q_value(e[j], e[0], tau));
                }
        }
    }
}

TEST(classical_itp, eigenvector_at_its_energy_is_fixed) {
    std::mt19937_64 rng(10);
    const HermitianOperator h(fixtures::random_hermitian(4, rng));
    const CVector phi = h.eigenvector(2);
    const auto out = classical_itp(h, ItpParams::absolute(3.0, h.spectrum()[2]), phi);
    EXPECT_NEAR(norm2(out.unnormalized), 1.0, 1e-12);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(std::abs(out.unnormalized[i] - phi[i]), 1e-12);
}

TEST(classical_itp, zero_tau_is_identity) {
    std::mt19937_64 rng(11);
    const HermitianOperator h(fixtures::random_hermitian(3, rng));
    const CVector psi = fixtures::random_state(3, rng);
    const auto out = classical_itp(h, ItpParams::absolute(0.0, 5.0), psi);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LT(std::abs(out.normalized[i] - psi[i]), 1e-14);
}

TEST(classical_itp, two_level_ln2) {
    const HermitianOperator h(diag({0.0, 1.0}));
    const CVector psi = {kInvSqrt2, kInvSqrt2};
    const auto out = classical_itp(h, ItpParams::absolute(std::log(2.0), 0.0), psi);
    EXPECT_NEAR(out.unnormalized[0].real(), kInvSqrt2, 1e-15);
    EXPECT_NEAR(out.unnormalized[1].real(), 1.0 / (2.0 * std::sqrt(2.0)), 1e-15);
    EXPECT_NEAR(out.normalized[0].real(), 2.0 / std::sqrt(5.0), 1e-15);
    EXPECT_NEAR(out.normalized[1].real(), 1.0 / std::sqrt(5.0), 1e-15);
}

TEST(classical_itp, vanishing_norm_rejected) {
    const HermitianOperator h(diag({0.0, 1.0}));
    try {
        classical_itp(h, ItpParams::absolute(1e4, 0.0), CVector{0.0, 1.0});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroVector);
    }
}
