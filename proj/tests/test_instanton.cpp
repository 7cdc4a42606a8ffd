#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "common.hpp"
#include "uphill/instanton.hpp"

using namespace uphill;

namespace {
const ThermoParams& P() { return fixtures::params(); }

const Instanton& r20() {
    static const Instanton i = solve_instanton(P(), 20.0, 0.05, 1e-13);
    return i;
}
}  // namespace

TEST(Instanton, ZeroAtOrigin) {
    const Profile& m = r20().profile;
    EXPECT_EQ(m[m.grid.mid()], 0.0);
}

TEST(Instanton, ReachesMbetaAtEdge) { EXPECT_LT(std::abs(r20().profile.back() - 0.710412), 1e-3); }

TEST(Instanton, ResidualAndSymmetry) {
    const Instanton& i = r20();
    EXPECT_LT(i.residual, 1e-8);
    EXPECT_LT(instanton_residual(P(), i.kernel, i.profile), 1e-8);
    EXPECT_EQ(antisymmetry_defect(i.profile), 0.0);
}

TEST(Instanton, StrictlyIncreasing) {
    EXPECT_GT(min_increment(r20()), 0.0);
    // where m itself resolves the increments they agree with the gap
    const Profile& m = r20().profile;
    for (std::size_t i = m.grid.mid() + 1; m.grid.x(i) <= 6.0; ++i) {
        ASSERT_GT(m[i] - m[i - 1], 0.0);
        ASSERT_NEAR(m[i] - m[i - 1], r20().gap[i - 1] - r20().gap[i], 1e-15);
    }
}

TEST(Instanton, GapMatchesProfile) {
    const Instanton& i = r20();
    for (std::size_t n = 0; n < i.gap.size(); ++n) {
        ASSERT_NEAR(i.gap[n], fixtures::params().m_beta - std::abs(i.profile[n]), 2e-16);
    }
}

TEST(Instanton, ResidualDecreasesAfterBurnIn) {
    const std::vector<double>& r = r20().residuals;
    ASSERT_GT(r.size(), 12u);
    // the sweeps after the sup residual reaches roundoff only settle the far
    // tail of the gap; there the residual just jitters at the last bit
    const double roundoff = 100 * std::numeric_limits<double>::epsilon();
    for (std::size_t s = 11; s < r.size() && r[s - 1] > roundoff; ++s) EXPECT_LE(r[s], r[s - 1]) << "sweep " << s;
}

TEST(Instanton, IndependentOfStart) {
    InstantonOptions smooth;
    smooth.start = InstantonStart::smooth;
    const Instanton b = solve_instanton(P(), 20.0, 0.05, 1e-13, smooth);
    EXPECT_LT(sup_distance(r20().profile, b.profile), 1e-8);
}

TEST(Instanton, DampedIterationAgrees) {
    InstantonOptions damped;
    damped.omega = 0.7;
    const Instanton b = solve_instanton(P(), 20.0, 0.05, 1e-13, damped);
    EXPECT_LT(sup_distance(r20().profile, b.profile), 1e-9);
}

TEST(Instanton, LowerFreeEnergyThanStep) {
    const Instanton& i = r20();
    const Profile step = Profile::from_function(
        i.profile.grid, [&](double x) { return x > 0 ? P().m_beta : (x < 0 ? -P().m_beta : 0.0); },
        Symmetry::antisymmetric);
    const Reservoirs res{-P().m_beta, P().m_beta};
    EXPECT_LT(lp_free_energy(P(), i.kernel, i.profile, res), lp_free_energy(P(), i.kernel, step, res));
}

TEST(Instanton, TailRate) {
    const double a = tail_rate(r20());
    EXPECT_GT(a, 0.0);
    const Instanton longer = solve_instanton(P(), 25.0, 0.05, 1e-13);
    EXPECT_NEAR(tail_rate(longer), a, 0.05 * a);
    // the profile-only fit over the resolved part of the tail agrees
    EXPECT_NEAR(tail_rate(r20().profile, P()), a, 0.05 * a);
}

TEST(Instanton, TailRateRejectsConstant) {
    const GridSpec g = build_grid_half_length(20.0, 0.05);
    EXPECT_THROW(tail_rate(Profile::constant(g, P().m_beta), P()), DiagnosticError);
    EXPECT_THROW(tail_rate(Profile::constant(g, 0.0), P()), DiagnosticError);
    Instanton flat = r20();
    flat.gap = Profile::constant(flat.gap.grid, 0.0);
    EXPECT_THROW(tail_rate(flat), DiagnosticError);
}

TEST(Instanton, Errors) {
    EXPECT_THROW(solve_instanton(P(), 4.0, 0.05, 1e-10), ConfigError);
    InstantonOptions few;
    few.max_sweeps = 3;
    EXPECT_THROW(solve_instanton(P(), 20.0, 0.05, 1e-13, few), IterationLimitError);
    InstantonOptions bad;
    bad.omega = 1.5;
    EXPECT_THROW(solve_instanton(P(), 20.0, 0.05, 1e-13, bad), ConfigError);
}

TEST(Instanton, DefaultHalfLengthCoversGluePoint) {
    for (double eps : {1.0 / 20, 1.0 / 40, 1.0 / 80, 1.0 / 1000}) {
        const double r = default_instanton_half_length(eps, 0.05);
        EXPECT_GE(r, 1.0 / std::sqrt(eps) + 2.0 - 1e-12);
        EXPECT_GE(r, 20.0);
    }
}
