#include "coastal/errors.hpp"
#include "coastal/fields.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace coastal;

namespace {

constexpr double pi = std::numbers::pi;

AmplitudeTerm term(double kx, double ky, double c, double s, Envelope env = {}) { return {kx, ky, c, s, env}; }

ThetaPeriodicField scalar(std::vector<Harmonic> hs) { return ThetaPeriodicField(1, std::move(hs)); }

// A scalar field with mean, k=1 and k=3 content and a time envelope.
ThetaPeriodicField rich_scalar() {
    const Envelope env{{1.0, 0.5, -0.25}, -0.3};
    return scalar({
        Harmonic{0, {Amplitude({term(0, 0, 2.0, 0.0), term(0, 1, 1.0, 0.0)})}, {}},
        Harmonic{1, {Amplitude({term(1, 0, 0.0, 1.0, env)})}, {Amplitude({term(1, 1, 0.5, 0.2)})}},
        Harmonic{3, {Amplitude({term(2, -1, 0.3, 0.0)})}, {Amplitude({term(0, 2, 0.0, 0.7, env)})}},
    });
}

}  // namespace

TEST(Eval, ConstantHarmonic) {
    const auto f = scalar({Harmonic{0, {Amplitude::constant(1.0)}, {}}});
    for (double th : {0.0, 0.3, 7.9}) EXPECT_EQ(f.eval(0, 1.2, th, 0.4, 2.0), 1.0);
}

TEST(Eval, QuarterPeriodNode) {
    const auto f = scalar({Harmonic{1, {Amplitude::constant(1.0)}, {}}});
    EXPECT_NEAR(f.eval(0, 0.0, 0.25, 1.0, 1.0), 0.0, 1e-15);
}

TEST(Eval, SpatialAmplitudeAtZeroPhase) {
    const auto f = scalar({Harmonic{1, {Amplitude({term(1, 0, 0.0, 1.0)})}, {}}});
    for (double t : {0.0, 3.0}) EXPECT_NEAR(f.eval(0, t, 0.0, 0.7, 5.0), std::sin(0.7), 1e-15);
}

TEST(Eval, ExactlyOnePeriodicInTheta) {
    const auto f = rich_scalar();
    for (double th : {0.0, 0.25, 0.375, 0.8125, 2.5})
        EXPECT_EQ(f.eval(0, 0.4, th, 1.1, 2.2), f.eval(0, 0.4, th + 1.0, 1.1, 2.2));
    for (double th : {0.1, 0.3, 0.77}) EXPECT_NEAR(f.eval(0, 0.4, th, 1.1, 2.2), f.eval(0, 0.4, th + 1.0, 1.1, 2.2), 1e-14);
}

TEST(ThetaAverage, OscillationOnlyIsZero) {
    const auto f = scalar({Harmonic{1, {Amplitude({term(1, 0, 1.0, 0.0)})}, {Amplitude::constant(2.0)}}});
    EXPECT_EQ(f.theta_average(0, 0.3, 1.0, 2.0), 0.0);
}

TEST(ThetaAverage, MeanAmplitudeSurvives) {
    const auto f = scalar({
        Harmonic{0, {Amplitude({term(0, 0, 2.0, 0.0), term(0, 1, 1.0, 0.0)})}, {}},
        Harmonic{2, {Amplitude({term(1, 0, 5.0, 0.0)})}, {Amplitude::constant(1.0)}},
    });
    for (double y : {0.0, 1.3, 4.0}) EXPECT_NEAR(f.theta_average(0, 0.0, 0.5, y), 2.0 + std::cos(y), 1e-15);
    const auto c = scalar({Harmonic{0, {Amplitude::constant(-4.5)}, {}}});
    EXPECT_EQ(c.theta_average(0, 2.0, 1.0, 1.0), -4.5);
}

TEST(ThetaAverage, MatchesMidpointQuadrature) {
    const auto f = rich_scalar();
    for (double x : {0.2, 2.9}) {
        double q = 0.0;
        for (int m = 0; m < 64; ++m) q += f.eval(0, 0.6, (m + 0.5) / 64.0, x, 1.7);
        EXPECT_NEAR(q / 64.0, f.theta_average(0, 0.6, x, 1.7), 1e-12);
    }
}

TEST(Gradient, ClosedForms) {
    const auto c = scalar({Harmonic{0, {Amplitude::constant(3.0)}, {}}});
    const auto gc = c.spatial_gradient(0, 0.0, 0.3, 1.0, 2.0);
    EXPECT_EQ(gc[0], 0.0);
    EXPECT_EQ(gc[1], 0.0);

    const auto s = scalar({Harmonic{0, {Amplitude({term(1, 0, 0.0, 1.0)})}, {}}});
    const auto gs = s.spatial_gradient(0, 0.0, 0.0, 0.9, 2.0);
    EXPECT_NEAR(gs[0], std::cos(0.9), 1e-15);
    EXPECT_EQ(gs[1], 0.0);

    const auto k1 = scalar({Harmonic{1, {Amplitude::constant(2.0)}, {Amplitude::constant(1.0)}}});
    for (double th : {0.0, 0.1, 0.6}) {
        const auto g = k1.spatial_gradient(0, 1.0, th, 0.5, 0.5);
        EXPECT_EQ(g[0], 0.0);
        EXPECT_EQ(g[1], 0.0);
    }
}

TEST(Gradient, ConvergesLikeCentralDifferences) {
    const auto f = rich_scalar();
    const double t = 0.3, th = 0.41, x = 1.3, y = 0.8;
    const auto exact = f.spatial_gradient(0, t, th, x, y);
    double prev = 0.0;
    for (int level = 0; level < 4; ++level) {
        const double h = 0.1 / (1 << level);
        const double gx = (f.eval(0, t, th, x + h, y) - f.eval(0, t, th, x - h, y)) / (2 * h);
        const double gy = (f.eval(0, t, th, x, y + h) - f.eval(0, t, th, x, y - h)) / (2 * h);
        const double err = std::hypot(gx - exact[0], gy - exact[1]);
        if (level > 0) EXPECT_GE(std::log2(prev / err), 1.9);
        prev = err;
    }
}

TEST(CurlOfAverage, Examples) {
    const ThetaPeriodicField constant(2, {Harmonic{0, {Amplitude::constant(1.0), Amplitude::constant(-2.0)}, {}}});
    EXPECT_EQ(curl_of_average(constant, 0.0, 1.0, 2.0), 0.0);

    const ThetaPeriodicField shear(
        2, {Harmonic{0, {Amplitude({term(0, 1, 0.0, 1.0)}), Amplitude()}, {}},
            Harmonic{1, {Amplitude({term(1, 0, 3.0, 0.0)}), Amplitude({term(0, 1, 1.0, 0.0)})}, {}}});
    for (double y : {0.0, 0.8, 3.3}) EXPECT_NEAR(curl_of_average(shear, 0.0, 0.4, y), std::cos(y), 1e-15);

    // avg W = grad(sin x cos y)
    const ThetaPeriodicField gradient(
        2, {Harmonic{0,
                     {Amplitude({term(1, 1, 0.5, 0.0), term(1, -1, 0.5, 0.0)}),
                      Amplitude({term(1, 1, 0.5, 0.0), term(1, -1, -0.5, 0.0)})},
                     {}}});
    EXPECT_NEAR(curl_of_average(gradient, 0.0, 0.7, 1.9), 0.0, 1e-15);
    EXPECT_THROW(curl_of_average(rich_scalar(), 0.0, 0.0, 0.0), DomainError);
}

TEST(Periodicity, NonPeriodicWavevectorRejected) {
    const TorusGrid g(16, 16);
    const auto bad = scalar({Harmonic{0, {Amplitude({term(0.5, 0, 1.0, 0.0)})}, {}}});
    EXPECT_THROW(bad.require_periodic_on(g), DomainError);
    EXPECT_NO_THROW(bad.require_periodic_on(TorusGrid(16, 16, 4 * pi, 2 * pi)));
}

TEST(MeanDepth, FlatAndNonPositive) {
    Scenario s = zero_scenario();
    EXPECT_EQ(s.mean_depth.value(1.0, 2.0), 1.0);
    s.mean_depth.flat = false;
    s.mean_depth.depth = Amplitude({term(0, 0, 0.5, 0.0), term(1, 0, 0.8, 0.0)});
    EXPECT_THROW(s.require_periodic_on(TorusGrid(16, 16)), DomainError);
}

TEST(GridFields, SamplesMatchClosedForm) {
    const TorusGrid g(16, 16);
    const Scenario s = default_scenario();
    const GridFields gf(s, g);
    const double t = 0.37, th = 2.6;
    const auto smp = gf.sample(t, th);
    const auto avg = gf.sample_average(t);
    for (int j = 0; j < 16; j += 5) {
        for (int i = 0; i < 16; i += 3) {
            const double x = g.x(i), y = g.y(j);
            const std::size_t k = g.index(i, j);
            for (int c = 0; c < 2; ++c) {
                EXPECT_NEAR(smp.tide_velocity.value[c][k], s.tide_velocity.eval(c, t, th, x, y), 1e-14);
                EXPECT_NEAR(smp.tide_velocity.gradient[c].y[k], s.tide_velocity.spatial_gradient(c, t, th, x, y)[1], 1e-14);
                EXPECT_NEAR(avg.wind.value[c][k], s.wind.theta_average(c, t, x, y), 1e-14);
            }
            EXPECT_NEAR(smp.tide_depth.gradient[0].x[k], s.tide_depth.spatial_gradient(0, t, th, x, y)[0], 1e-14);
        }
    }
    EXPECT_TRUE(gf.flat_bottom());
}
