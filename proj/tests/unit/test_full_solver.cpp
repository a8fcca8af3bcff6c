#include "coastal/errors.hpp"
#include "coastal/full_solver.hpp"

#include "direct_form.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace coastal;

namespace {

State constant_state(const TorusGrid& g, double iota, double n1, double n2) {
    return State(ScalarField(g, iota), VectorField(ScalarField(g, n1), ScalarField(g, n2)), 0.0);
}

double state_diff(const State& a, const State& b) {
    return std::max({(a.iota - b.iota).max_abs(), (a.n.x - b.n.x).max_abs(), (a.n.y - b.n.y).max_abs()});
}

double state_max(const State& a) { return std::max({a.iota.max_abs(), a.n.x.max_abs(), a.n.y.max_abs()}); }

// Exact solution of dn/dt = -(1/eps) n_perp: rotation by -t/eps.
std::array<double, 2> rotated(double c1, double c2, double t, double eps) {
    const double a = t / eps;
    return {std::cos(a) * c1 + std::sin(a) * c2, -std::sin(a) * c1 + std::cos(a) * c2};
}

}  // namespace

TEST(Structure, PerpIsOrthogonalPointwise) {
    const TorusGrid g(32, 32);
    std::mt19937_64 rng(1);
    const State s = oracle::random_state(g, rng);
    const VectorField p = perp(s.n);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(p.x[k] * s.n.x[k] + p.y[k] * s.n.y[k], 0.0);
}

TEST(Structure, SkewSumVanishes) {
    const TorusGrid g(32, 32);
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) EXPECT_LE(std::abs(skew_sum(oracle::random_state(g, rng))), 1e-12);
}

TEST(Structure, CoefficientMatrices) {
    const TorusGrid g(16, 16);
    std::mt19937_64 rng(3);
    const State s = oracle::random_state(g, rng, 0.3);
    const Scenario sc = default_scenario();
    const GridFields f(sc, g);
    const double eps = 0.1, t = 0.2;
    const auto c = assemble_coefficients(s, t, eps, f);
    const auto h = f.sample(t, t / eps).tide_depth.value[0];
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_EQ(c.a0[0][k], 1.0 / (1.0 + eps * h[k] + eps * eps * s.iota[k]));
        EXPECT_EQ(c.a0[1][k], 1.0);
        EXPECT_GT(c.a0[0][k], 0.0);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            EXPECT_EQ(CoefficientMatrices::s1[i][j], CoefficientMatrices::s1[j][i]);
            EXPECT_EQ(CoefficientMatrices::s2[i][j], CoefficientMatrices::s2[j][i]);
        }
}

TEST(SimplifiedRhs, RestStateIsSteady) {
    const TorusGrid g(16, 16);
    const GridFields f(zero_scenario(), g);
    const State r = assemble_simplified_rhs(constant_state(g, 0.7, 0.0, 0.0), 0.3, 0.1, f);
    EXPECT_LE(state_max(r), 1e-15);
}

TEST(SimplifiedRhs, ConstantVelocityFeelsOnlyCoriolis) {
    const TorusGrid g(16, 16);
    const GridFields f(zero_scenario(), g);
    const double eps = 0.05;
    const State r = assemble_simplified_rhs(constant_state(g, 0.0, 0.3, -0.8), 0.0, eps, f);
    // -(1/eps) c_perp with c_perp = (0.8, 0.3)
    EXPECT_LE(r.iota.max_abs(), 1e-14);
    EXPECT_LE((r.n.x - ScalarField(g, -0.8 / eps)).max_abs(), 1e-12);
    EXPECT_LE((r.n.y - ScalarField(g, -0.3 / eps)).max_abs(), 1e-12);
}

TEST(SimplifiedRhs, AgreesWithDirectForm) {
    const TorusGrid g(32, 32);
    const Scenario sc = default_scenario();
    const GridFields f(sc, g);
    std::mt19937_64 rng(20240);
    std::uniform_real_distribution<double> time(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        State s = oracle::random_state(g, rng);
        const double t = time(rng);
        s.time = t;
        const double eps = trial % 2 ? 0.1 : 0.05;
        worst = std::max(worst, state_diff(assemble_simplified_rhs(s, t, eps, f), oracle::direct_rhs(s, t, eps, sc)));
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(SimplifiedRhs, NonPositiveDepthAborts) {
    const TorusGrid g(16, 16);
    const GridFields f(zero_scenario(), g);
    const double eps = 0.1;
    EXPECT_THROW(assemble_simplified_rhs(constant_state(g, -2.0 / (eps * eps), 0, 0), 0.0, eps, f), SolverAbort);
}

TEST(Rk4, ZeroRhsLeavesStateUnchanged) {
    const TorusGrid g(16, 16);
    const GridFields f(zero_scenario(), g);
    const State s = constant_state(g, 0.4, 0.0, 0.0);
    const State n = step_rk4(s, 0.01, 0.1, f);
    EXPECT_EQ(state_diff(n, s), 0.0);
    EXPECT_DOUBLE_EQ(n.time, 0.01);
}

TEST(Rk4, CoriolisRotationFourthOrder) {
    const TorusGrid g(8, 8);
    const GridFields f(zero_scenario(), g);
    const double eps = 0.1, T = 1.0;
    double prev = 0.0;
    for (int level = 0; level < 4; ++level) {
        const int steps = 50 << level;
        State s = constant_state(g, 0.0, 1.0, 0.5);
        for (int k = 0; k < steps; ++k) s = step_rk4(s, T / steps, eps, f);
        const auto want = rotated(1.0, 0.5, T, eps);
        const double err = std::hypot(s.n.x[0] - want[0], s.n.y[0] - want[1]);
        if (level > 0) EXPECT_NEAR(std::log2(prev / err), 4.0, 0.3);
        prev = err;
    }
}

TEST(Rk4, NonFiniteResultAborts) {
    const TorusGrid g(8, 8);
    const GridFields f(zero_scenario(), g);
    State s = constant_state(g, 0.0, 1e306, 1e306);
    EXPECT_THROW(step_rk4(s, 1.0, 1e-3, f), SolverAbort);
}

TEST(Cfl, TimeStepLaw) {
    const TorusGrid g(32, 16, 6.0, 2.0);
    const GridFields f(zero_scenario(), g);
    const State s = constant_state(g, 0.0, 3.0, 4.0);
    const double eps = 0.1, safety = 0.5;
    EXPECT_DOUBLE_EQ(cfl_time_step(s, eps, safety, f), safety * eps * (2.0 / 16) / (1.0 + eps * 5.0));
}

TEST(Run, ZeroEndTimeGivesInitialSnapshotOnly) {
    FullRunConfig c;
    c.eps = 0.1;
    c.end_time = 0.0;
    c.grid = TorusGrid(16, 16);
    c.scenario = default_scenario();
    std::mt19937_64 rng(5);
    c.initial = oracle::random_state(c.grid, rng);
    const FullRunResult r = run(c);
    ASSERT_EQ(r.diagnostics.size(), 1u);
    ASSERT_EQ(r.trajectory.size(), 1u);
    EXPECT_EQ(r.steps, 0);
    const std::array<ScalarField, 3> u{c.initial->iota, c.initial->n.x, c.initial->n.y};
    EXPECT_EQ(r.diagnostics[0].h4_norm, sobolev_norm(u, 4.0));
}

TEST(Run, CoriolisScenarioAtCflStep) {
    FullRunConfig c;
    c.eps = 0.1;
    c.end_time = 1.0;
    c.outputs = 4;
    c.grid = TorusGrid(64, 64);
    c.scenario = zero_scenario();
    c.initial = constant_state(c.grid, 0.0, 0.6, -0.2);
    const FullRunResult r = run(c);
    ASSERT_FALSE(r.aborted);
    ASSERT_EQ(r.trajectory.size(), 5u);
    const auto& last = r.trajectory.back();
    const auto want = rotated(0.6, -0.2, 1.0, 0.1);
    EXPECT_LE(std::hypot(last.components[1][0] - want[0], last.components[2][0] - want[1]) / std::hypot(0.6, 0.2),
              1e-6);
    EXPECT_DOUBLE_EQ(last.time, 1.0);
}

TEST(Run, AbortIsReportedWithPartialOutput) {
    FullRunConfig c;
    c.eps = 0.1;
    c.end_time = 0.5;
    c.outputs = 5;
    c.grid = TorusGrid(8, 8);
    c.scenario = zero_scenario();
    c.initial = constant_state(c.grid, -200.0, 0.0, 0.0);
    const FullRunResult r = run(c);
    EXPECT_TRUE(r.aborted);
    EXPECT_EQ(r.diagnostics.size(), 1u);
    EXPECT_FALSE(r.abort_reason.empty());
}

TEST(Run, ConfigValidation) {
    FullRunConfig c;
    c.eps = 1.5;
    EXPECT_THROW(run(c), DomainError);
    c.eps = 0.1;
    c.safety = 0.0;
    EXPECT_THROW(run(c), DomainError);
}

TEST(Run, DefaultScenarioNormsStayBounded) {
    FullRunConfig c;
    c.end_time = 0.25;
    c.outputs = 5;
    c.grid = TorusGrid(32, 32);
    c.scenario = default_scenario();
    std::mt19937_64 rng(9);
    c.initial = oracle::random_state(c.grid, rng, 0.3);
    for (double eps : {0.1, 0.05}) {
        c.eps = eps;
        const FullRunResult r = run(c);
        ASSERT_FALSE(r.aborted);
        for (const auto& d : r.diagnostics) {
            EXPECT_TRUE(std::isfinite(d.energy));
            EXPECT_LE(d.h4_norm, 3.0 * r.diagnostics.front().h4_norm);
            EXPECT_GT(d.min_depth_factor, 0.0);
        }
    }
}

TEST(Snapshots, RoundTripThroughState) {
    const TorusGrid g(16, 16);
    std::mt19937_64 rng(4);
    State s = oracle::random_state(g, rng);
    s.time = 0.3;
    const State back = State::from_snapshot(s.snapshot());
    EXPECT_EQ(state_diff(back, s), 0.0);
    EXPECT_EQ(back.time, 0.3);
}

// ---------------------------------------------------------------------------
// Regime right-hand sides

TEST(Regime, ZeroInputsGiveZeroShelfRhs) {
    const TorusGrid g(16, 16);
    const GridFields f(zero_scenario(), g);
    const Regime shelf{RegimeKind::ContinentalShelf, Weather::Calm};
    const auto groups = derive_groups(preset(shelf), shelf);
    const RegimeRhs r = regime_rhs(shelf, State(g), 0.0, groups.eps, f, groups);
    EXPECT_EQ(state_max(r.rhs), 0.0);
    for (const auto& t : r.terms) EXPECT_EQ(t.max_abs, 0.0) << t.id;
}

TEST(Regime, ReducesToSimplifiedSystem) {
    const TorusGrid g(32, 32);
    const Scenario sc = default_scenario();
    const GridFields f(sc, g);
    std::mt19937_64 rng(77);
    for (double eps : {0.1, 0.02}) {
        for (int trial = 0; trial < 5; ++trial) {
            const State s = oracle::random_state(g, rng, 0.4);
            const double t = 0.13 * (trial + 1);
            const auto w = f.sample(t, t / eps).wind;
            const VectorField wind(w.value[0], w.value[1]);
            const RegimeRhs r = regime_rhs(RegimeWeights::simplified(eps), s, t, eps, f, &wind);
            EXPECT_LE(state_diff(r.rhs, assemble_simplified_rhs(s, t, eps, f)), 1e-10);
        }
    }
}

TEST(Regime, ShelfViscosityScalesLikeEpsToTheFifth) {
    const TorusGrid g(32, 32);
    const GridFields f(default_scenario(), g);
    std::mt19937_64 rng(8);
    const State s = oracle::random_state(g, rng, 0.3);
    const Regime shelf{RegimeKind::ContinentalShelf, Weather::Calm};
    auto ratio = [&](double eps) {
        const auto w = RegimeWeights::from_table(regime_coefficients(shelf, eps));
        EXPECT_NEAR(w.viscosity, 13.0 * std::pow(eps, 5), 1e-12 * 13.0 * std::pow(eps, 5));
        const RegimeRhs r = regime_rhs(w, s, 0.0, eps, f);
        return r.term("viscosity").max_abs / r.term("tide_advection_n").max_abs;
    };
    const double q = ratio(1.0 / 100.0) / ratio(1.0 / 200.0);
    EXPECT_GE(q, 16.0);
    EXPECT_LE(q, 64.0);
}

TEST(Regime, LayerUsesAnisotropicDerivatives) {
    const TorusGrid g(16, 16);
    const GridFields f(zero_scenario(), g);
    const Regime layer{RegimeKind::CoastalLayer, Weather::Calm};
    const auto groups = derive_groups(preset(layer), layer);
    // iota varying along x2 only: the pressure term scales with r = L/l
    State s(g);
    s.iota = ScalarField::from_function(g, [](double, double y) { return std::sin(y); });
    const RegimeRhs r = regime_rhs(layer, s, 0.0, groups.eps, f, groups);
    const auto w = RegimeWeights::from_table(regime_coefficients(groups));
    EXPECT_NEAR(r.term("pressure").raw_max, w.anisotropy, 1e-9 * w.anisotropy);
}

TEST(Regime, VanishingDepthIsADomainError) {
    const TorusGrid g(16, 16);
    const GridFields f(zero_scenario(), g);
    const Regime zone{RegimeKind::CoastalZone, Weather::Calm};
    const auto groups = derive_groups(preset(zone), zone);
    const auto w = RegimeWeights::from_table(regime_coefficients(groups));
    const State s = constant_state(g, -2.0 / w.depth_pert_ratio, 0.0, 0.0);
    EXPECT_THROW(regime_rhs(zone, s, 0.0, groups.eps, f, groups), DomainError);
}

TEST(Regime, MismatchedGroupsRejected) {
    const TorusGrid g(16, 16);
    const GridFields f(zero_scenario(), g);
    const Regime zone{RegimeKind::CoastalZone, Weather::Calm};
    const Regime shelf{RegimeKind::ContinentalShelf, Weather::Calm};
    const auto groups = derive_groups(preset(shelf), shelf);
    EXPECT_THROW(regime_rhs(zone, State(g), 0.0, groups.eps, f, groups), DomainError);
}
