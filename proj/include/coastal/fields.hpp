#pragma once

// Prescribed tide, depth and wind fields.
//
// Every field is a finite harmonic sum in the fast phase theta,
//
//     f(t, theta, x) = sum_k a_k(t, x) cos(2 pi k theta) + b_k(t, x) sin(2 pi k theta),
//
// whose amplitudes a_k, b_k belong to a closed-form family: sums of
// envelope(t) * (A cos(kx x + ky y) + B sin(kx x + ky y)) with a
// polynomial-times-exponential envelope.  Values, theta averages, spatial
// gradients and Laplacians are therefore all exact.

#include "coastal/spectral.hpp"

#include <array>
#include <string>
#include <vector>

namespace coastal {

/// env(t) = (p0 + p1 t + p2 t^2 + ...) * exp(rate * t)
struct Envelope {
    std::vector<double> poly{1.0};
    double rate = 0.0;

    double value(double t) const noexcept;
};

/// env(t) * (cos_coeff * cos(kx x + ky y) + sin_coeff * sin(kx x + ky y))
struct AmplitudeTerm {
    double kx = 0.0;
    double ky = 0.0;
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
    Envelope envelope;
};

/// A closed-form amplitude function a(t, x).
class Amplitude {
public:
    Amplitude() = default;
    explicit Amplitude(std::vector<AmplitudeTerm> terms) : terms_(std::move(terms)) {}

    static Amplitude constant(double c);

    const std::vector<AmplitudeTerm>& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }

    double value(double t, double x, double y) const noexcept;
    std::array<double, 2> gradient(double t, double x, double y) const noexcept;
    double laplacian(double t, double x, double y) const noexcept;

    /// Throws DomainError unless every wavevector is periodic on the grid's box.
    void require_periodic_on(const TorusGrid& grid) const;

private:
    std::vector<AmplitudeTerm> terms_;
};

/// Amplitudes of one theta mode, one entry per field component.
struct Harmonic {
    int k = 0;
    std::vector<Amplitude> cos_amp;
    std::vector<Amplitude> sin_amp;
};

/// A 1-periodic-in-theta field with 1 (scalar) or 2 (vector) components.
class ThetaPeriodicField {
public:
    ThetaPeriodicField(int components, std::vector<Harmonic> harmonics);

    static ThetaPeriodicField zero(int components);

    int components() const noexcept { return components_; }
    const std::vector<Harmonic>& harmonics() const noexcept { return harmonics_; }

    double eval(int component, double t, double theta, double x, double y) const;
    double theta_average(int component, double t, double x, double y) const;
    std::array<double, 2> spatial_gradient(int component, double t, double theta, double x, double y) const;
    std::array<double, 2> average_gradient(int component, double t, double x, double y) const;
    double laplacian(int component, double t, double theta, double x, double y) const;

    void require_periodic_on(const TorusGrid& grid) const;

private:
    int components_;
    std::vector<Harmonic> harmonics_;
};

/// d(avg W_1)/dy - d(avg W_2)/dx, evaluated analytically.
double curl_of_average(const ThetaPeriodicField& wind, double t, double x, double y);

/// Rescaled mean depth E(x).  A flat bottom is E == 1.
struct MeanDepthField {
    bool flat = true;
    Amplitude depth;

    double value(double x, double y) const noexcept;
    std::array<double, 2> gradient(double x, double y) const noexcept;
};

/// The prescribed fields that drive both solvers.
struct Scenario {
    ThetaPeriodicField tide_velocity = ThetaPeriodicField::zero(2);  // M
    ThetaPeriodicField tide_depth = ThetaPeriodicField::zero(1);     // H
    ThetaPeriodicField wind = ThetaPeriodicField::zero(2);           // W
    MeanDepthField mean_depth;                                       // E

    void require_periodic_on(const TorusGrid& grid) const;
};

/// M, H, W identically zero over a flat bottom.
Scenario zero_scenario();

/// Tide with a dominant k=1 harmonic under a slowly decaying envelope, a
/// mean-plus-k=1 depth variation, and a wind with nonzero mean and a k=1 gust.
Scenario default_scenario();

/// Grid samples of a field's value and first derivatives, per component.
struct SampledField {
    std::vector<ScalarField> value;
    std::vector<VectorField> gradient;
};

/// Binds a ThetaPeriodicField to a grid.  The spatial factors of every
/// amplitude term are tabulated once; sampling at (t, theta) only forms the
/// weighted sums.  Immutable after construction.
class FieldSampler {
public:
    FieldSampler(const ThetaPeriodicField& field, const TorusGrid& grid);

    const TorusGrid& grid() const noexcept { return grid_; }
    int components() const noexcept { return components_; }

    SampledField sample(double t, double theta) const;
    /// theta-averaged field (the k = 0 cosine amplitudes).
    SampledField sample_average(double t) const;
    /// Maximum over nodes of the Euclidean norm across components.
    static double max_magnitude(const SampledField& s);

private:
    struct Entry {
        int component;
        int k;
        bool is_sin;
        Envelope envelope;
        ScalarField value;
        ScalarField dx;
        ScalarField dy;
    };

    SampledField accumulate(double t, double theta, bool average_only) const;

    TorusGrid grid_;
    int components_;
    std::vector<Entry> entries_;
};

/// A Scenario bound to a grid: M, H, W samplers plus the tabulated mean depth.
class GridFields {
public:
    GridFields(const Scenario& scenario, const TorusGrid& grid);

    struct Sample {
        SampledField tide_velocity;
        SampledField tide_depth;
        SampledField wind;
    };

    const TorusGrid& grid() const noexcept { return tide_velocity_.grid(); }

    /// Fields at time t and phase theta.
    Sample sample(double t, double theta) const;
    /// theta-averaged fields at time t.
    Sample sample_average(double t) const;

    const ScalarField& mean_depth() const noexcept { return depth_; }
    const VectorField& mean_depth_gradient() const noexcept { return depth_gradient_; }
    bool flat_bottom() const noexcept { return flat_; }

private:
    FieldSampler tide_velocity_;
    FieldSampler tide_depth_;
    FieldSampler wind_;
    bool flat_;
    ScalarField depth_;
    VectorField depth_gradient_;
};

}  // namespace coastal
