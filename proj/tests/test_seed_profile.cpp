#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "common.hpp"
#include "uphill/seed_profile.hpp"

using namespace uphill;

namespace {
const ThermoParams& P() { return fixtures::params(); }
}  // namespace

TEST(Seed, BoundaryAndCentre) {
    const fixtures::Setup& e = fixtures::eps40();
    const Seed s = build_seed(P(), e.grid, e.instanton, 0.6);
    EXPECT_EQ(s.m0[e.grid.mid()], 0.0);
    EXPECT_EQ(s.m0.back(), 0.6);
    EXPECT_EQ(s.m0.front(), -0.6);
    EXPECT_EQ(antisymmetry_defect(s.m0), 0.0);
}

TEST(Seed, GlueValueNearMbeta) {
    const fixtures::Setup& e = fixtures::eps40();
    const Seed s = build_seed(P(), e.grid, e.instanton, 0.6);
    EXPECT_NEAR(s.x_glue, std::sqrt(40.0), 0.5 * e.grid.dx);
    EXPECT_LT(std::abs(s.m0.at_x(std::sqrt(40.0)) - P().m_beta), 1e-3);
    EXPECT_GT(s.delta, 0.0);
    EXPECT_LT(s.delta, 1e-3);
}

TEST(Seed, Errors) {
    const fixtures::Setup& e = fixtures::eps40();
    EXPECT_THROW(build_seed(P(), e.grid, e.instanton, 0.4), DomainError);
    EXPECT_THROW(build_seed(P(), e.grid, e.instanton, 0.72), DomainError);
    const GridSpec other = build_grid(1.0 / 40.0, 0.1);
    EXPECT_THROW(build_seed(P(), other, e.instanton, 0.6), DimensionError);
}

TEST(ApplyH, ZeroCurrent) {
    const fixtures::Setup& e = fixtures::eps40();
    const Profile h = apply_H(P(), build_seed(P(), e.grid, e.instanton, 0.6).m0, 0.0);
    EXPECT_EQ(sup_norm(h), 0.0);
}

TEST(ApplyH, ConstantProfileIsLinear) {
    const GridSpec& g = fixtures::eps40().grid;
    const double j = 0.03;
    const Profile h = apply_H(P(), Profile::constant(g, P().m_beta), j);
    const double chi = mobility(P(), P().m_beta);
    for (std::size_t i = 0; i < g.n_points; ++i) {
        ASSERT_NEAR(h[i], -j * g.epsilon * g.x(i) / chi, 1e-13);
    }
}

TEST(ApplyH, AntisymmetricAndDecreasing) {
    const fixtures::Setup& e = fixtures::eps40();
    const Seed s = build_seed(P(), e.grid, e.instanton, 0.6);
    const Profile h = apply_H(P(), s.m0, 0.03);
    EXPECT_LT(antisymmetry_defect(h), 1e-15);
    for (std::size_t i = e.grid.mid() + 1; i < e.grid.n_points; ++i) ASSERT_LT(h[i], h[i - 1]);
}

TEST(ApplyH, Lipschitz) {
    const GridSpec& g = fixtures::eps40().grid;
    std::mt19937_64 rng(23);
    const double j = 0.03;
    const double chi = mobility(P(), P().m_beta);
    const double bound = 2.0 * P().beta * j / (chi * chi);
    for (int t = 0; t < 5; ++t) {
        // admissible: |m| <= m_beta
        const Profile a = fixtures::random_antisymmetric(g, rng, P().m_beta);
        const Profile b = fixtures::random_antisymmetric(g, rng, P().m_beta);
        const double lhs = sup_distance(apply_H(P(), a, j), apply_H(P(), b, j));
        EXPECT_LE(lhs, bound * sup_distance(a, b) * (1 + 1e-6));
    }
}

TEST(ApplyH, RejectsDegenerateMobility) {
    const GridSpec& g = fixtures::eps40().grid;
    EXPECT_THROW(apply_H(P(), Profile::constant(g, 1.0), 0.01), DomainError);
}

TEST(SeedCurrent, Values) {
    EXPECT_EQ(seed_current(P(), 0.65, 0.65), 0.0);
    EXPECT_NEAR(seed_current(P(), 0.6, P().m_beta), 0.031786, 1e-6);
    EXPECT_NEAR(seed_current(P(), P().m_star * (1 + 1e-15), P().m_beta), 0.046322, 1e-5);
    EXPECT_THROW(seed_current(P(), 0.4, P().m_beta), DomainError);
}

TEST(SeedCurrent, InverseRoundTrip) {
    for (double mu : {0.5, 0.6, 0.7}) {
        const double j = seed_current(P(), mu, P().m_beta);
        EXPECT_NEAR(seed_boundary_for_current(P(), j, P().m_beta), mu, 1e-12);
    }
    EXPECT_THROW(seed_boundary_for_current(P(), 1.0, P().m_beta), DomainError);
}

TEST(Seed, ResidualScaling) {
    const auto residual = [](double eps) {
        const fixtures::Setup e = fixtures::make_setup(eps);
        const Seed s = build_seed(P(), e.grid, e.instanton, 0.6);
        const Profile h = apply_H(P(), s.m0, seed_current(P(), 0.6, s.m_glue));
        const Profile c = convolve_tracking(e.kernel, s.m0);
        double r = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) r = std::max(r, std::abs(std::tanh(P().beta * (c[i] + h[i])) - s.m0[i]));
        return r;
    };
    const double r20 = residual(1.0 / 20);
    const double r40 = residual(1.0 / 40);
    const double r80 = residual(1.0 / 80);
    // quartering epsilon halves an O(sqrt eps) quantity
    EXPECT_NEAR(r20 / r80, 2.0, 0.6);
    EXPECT_GT(r20, r40);
    EXPECT_GT(r40, r80);
}
