#include "coastal/fields.hpp"

#include "coastal/errors.hpp"

#include <cmath>
#include <string>

namespace coastal {

namespace {

// cos(2 pi k theta) and sin(2 pi k theta) with theta reduced modulo 1 first,
// so the phase factor is exactly 1-periodic in theta.
std::array<double, 2> phase_factors(int k, double theta) {
    if (k == 0) return {1.0, 0.0};
    const double frac = theta - std::floor(theta);
    const double arg = kTwoPi * k * frac;
    return {std::cos(arg), std::sin(arg)};
}

void check_component(int component, int components) {
    if (component < 0 || component >= components) {
        throw DomainError("ThetaPeriodicField: component index out of range");
    }
}

bool is_periodic_wavenumber(double k, double period) {
    const double cycles = k * period / kTwoPi;
    return std::abs(cycles - std::round(cycles)) <= 1e-9 * std::max(1.0, std::abs(cycles));
}

}  // namespace

double Envelope::value(double t) const noexcept {
    double p = 0.0;
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) p = p * t + *it;
    return rate == 0.0 ? p : p * std::exp(rate * t);
}

// ---------------------------------------------------------------------------
// Amplitude

Amplitude Amplitude::constant(double c) {
    AmplitudeTerm term;
    term.cos_coeff = c;
    return Amplitude({term});
}

double Amplitude::value(double t, double x, double y) const noexcept {
    double sum = 0.0;
    for (const auto& term : terms_) {
        const double arg = term.kx * x + term.ky * y;
        sum += term.envelope.value(t) * (term.cos_coeff * std::cos(arg) + term.sin_coeff * std::sin(arg));
    }
    return sum;
}

std::array<double, 2> Amplitude::gradient(double t, double x, double y) const noexcept {
    std::array<double, 2> g{0.0, 0.0};
    for (const auto& term : terms_) {
        const double arg = term.kx * x + term.ky * y;
        const double d = term.envelope.value(t) * (-term.cos_coeff * std::sin(arg) + term.sin_coeff * std::cos(arg));
        g[0] += term.kx * d;
        g[1] += term.ky * d;
    }
    return g;
}

double Amplitude::laplacian(double t, double x, double y) const noexcept {
    double sum = 0.0;
    for (const auto& term : terms_) {
        const double arg = term.kx * x + term.ky * y;
        const double k2 = term.kx * term.kx + term.ky * term.ky;
        sum -= k2 * term.envelope.value(t) * (term.cos_coeff * std::cos(arg) + term.sin_coeff * std::sin(arg));
    }
    return sum;
}

void Amplitude::require_periodic_on(const TorusGrid& grid) const {
    for (const auto& term : terms_) {
        if (!is_periodic_wavenumber(term.kx, grid.lx()) || !is_periodic_wavenumber(term.ky, grid.ly())) {
            throw DomainError("amplitude wavevector (" + std::to_string(term.kx) + ", " +
                              std::to_string(term.ky) + ") is not periodic on the computational box");
        }
    }
}

// ---------------------------------------------------------------------------
// ThetaPeriodicField

ThetaPeriodicField::ThetaPeriodicField(int components, std::vector<Harmonic> harmonics)
    : components_(components), harmonics_(std::move(harmonics)) {
    if (components != 1 && components != 2) {
        throw DomainError("ThetaPeriodicField: component count must be 1 or 2");
    }
    for (auto& h : harmonics_) {
        if (h.k < 0) throw DomainError("ThetaPeriodicField: harmonic index must be >= 0");
        if (h.cos_amp.empty()) h.cos_amp.resize(components);
        if (h.sin_amp.empty()) h.sin_amp.resize(components);
        if (static_cast<int>(h.cos_amp.size()) != components || static_cast<int>(h.sin_amp.size()) != components) {
            throw DomainError("ThetaPeriodicField: harmonic amplitude count does not match component count");
        }
    }
}

ThetaPeriodicField ThetaPeriodicField::zero(int components) { return ThetaPeriodicField(components, {}); }

double ThetaPeriodicField::eval(int component, double t, double theta, double x, double y) const {
    check_component(component, components_);
    double sum = 0.0;
    for (const auto& h : harmonics_) {
        const auto [c, s] = phase_factors(h.k, theta);
        sum += c * h.cos_amp[component].value(t, x, y);
        if (h.k != 0) sum += s * h.sin_amp[component].value(t, x, y);
    }
    return sum;
}

double ThetaPeriodicField::theta_average(int component, double t, double x, double y) const {
    check_component(component, components_);
    double sum = 0.0;
    for (const auto& h : harmonics_) {
        if (h.k == 0) sum += h.cos_amp[component].value(t, x, y);
    }
    return sum;
}

std::array<double, 2> ThetaPeriodicField::spatial_gradient(int component, double t, double theta, double x,
                                                           double y) const {
    check_component(component, components_);
    std::array<double, 2> g{0.0, 0.0};
    for (const auto& h : harmonics_) {
        const auto [c, s] = phase_factors(h.k, theta);
        const auto gc = h.cos_amp[component].gradient(t, x, y);
        g[0] += c * gc[0];
        g[1] += c * gc[1];
        if (h.k != 0) {
            const auto gs = h.sin_amp[component].gradient(t, x, y);
            g[0] += s * gs[0];
            g[1] += s * gs[1];
        }
    }
    return g;
}

std::array<double, 2> ThetaPeriodicField::average_gradient(int component, double t, double x, double y) const {
    check_component(component, components_);
    std::array<double, 2> g{0.0, 0.0};
    for (const auto& h : harmonics_) {
        if (h.k != 0) continue;
        const auto gc = h.cos_amp[component].gradient(t, x, y);
        g[0] += gc[0];
        g[1] += gc[1];
    }
    return g;
}

double ThetaPeriodicField::laplacian(int component, double t, double theta, double x, double y) const {
    check_component(component, components_);
    double sum = 0.0;
    for (const auto& h : harmonics_) {
        const auto [c, s] = phase_factors(h.k, theta);
        sum += c * h.cos_amp[component].laplacian(t, x, y);
        if (h.k != 0) sum += s * h.sin_amp[component].laplacian(t, x, y);
    }
    return sum;
}

void ThetaPeriodicField::require_periodic_on(const TorusGrid& grid) const {
    for (const auto& h : harmonics_) {
        for (const auto& a : h.cos_amp) a.require_periodic_on(grid);
        for (const auto& a : h.sin_amp) a.require_periodic_on(grid);
    }
}

double curl_of_average(const ThetaPeriodicField& wind, double t, double x, double y) {
    if (wind.components() != 2) throw DomainError("curl_of_average: wind must have two components");
    return wind.average_gradient(0, t, x, y)[1] - wind.average_gradient(1, t, x, y)[0];
}

// ---------------------------------------------------------------------------
// Mean depth and scenarios

double MeanDepthField::value(double x, double y) const noexcept { return flat ? 1.0 : depth.value(0.0, x, y); }

std::array<double, 2> MeanDepthField::gradient(double x, double y) const noexcept {
    return flat ? std::array<double, 2>{0.0, 0.0} : depth.gradient(0.0, x, y);
}

void Scenario::require_periodic_on(const TorusGrid& grid) const {
    if (tide_velocity.components() != 2 || wind.components() != 2 || tide_depth.components() != 1) {
        throw DomainError("Scenario: M and W must be vector fields and H a scalar field");
    }
    tide_velocity.require_periodic_on(grid);
    tide_depth.require_periodic_on(grid);
    wind.require_periodic_on(grid);
    if (!mean_depth.flat) {
        mean_depth.depth.require_periodic_on(grid);
        const ScalarField e = ScalarField::from_function(grid, [&](double x, double y) { return mean_depth.value(x, y); });
        for (double v : e.values()) {
            if (!(v > 0.0)) throw DomainError("Scenario: mean depth must be positive everywhere");
        }
    }
}

Scenario zero_scenario() { return Scenario{}; }

namespace {

AmplitudeTerm wave(double kx, double ky, double cos_coeff, double sin_coeff, Envelope env = {}) {
    AmplitudeTerm t;
    t.kx = kx;
    t.ky = ky;
    t.cos_coeff = cos_coeff;
    t.sin_coeff = sin_coeff;
    t.envelope = std::move(env);
    return t;
}

}  // namespace

Scenario default_scenario() {
    // Slow modulation of the tidal amplitude over the run.
    const Envelope modulation{{1.0, -0.2}, 0.0};

    Scenario s;
    s.tide_velocity = ThetaPeriodicField(
        2, {
               Harmonic{0,
                        {Amplitude({wave(0, 1, 0.0, 0.3), wave(1, 0, 0.1, 0.0)}),
                         Amplitude({wave(1, 0, 0.2, 0.0)})},
                        {}},
               Harmonic{1,
                        {Amplitude({wave(0, 1, 0.8, 0.0, modulation)}),
                         Amplitude({wave(1, 0, 0.0, 0.6, modulation)})},
                        {Amplitude({wave(1, -1, 0.0, 0.2, modulation)}), Amplitude()}},
           });
    s.tide_depth = ThetaPeriodicField(
        1, {
               Harmonic{0, {Amplitude({wave(1, 0, 0.2, 0.0)})}, {}},
               Harmonic{1, {Amplitude({wave(1, 1, 0.0, 0.5, modulation)})}, {}},
           });
    s.wind = ThetaPeriodicField(
        2, {
               Harmonic{0, {Amplitude({wave(0, 1, 0.0, 0.5)}), Amplitude({wave(1, 0, 0.3, 0.0)})}, {}},
               Harmonic{1, {Amplitude::constant(0.3), Amplitude({wave(1, 0, 0.0, 0.3)})}, {}},
           });
    return s;
}

// ---------------------------------------------------------------------------
// FieldSampler

FieldSampler::FieldSampler(const ThetaPeriodicField& field, const TorusGrid& grid)
    : grid_(grid), components_(field.components()) {
    field.require_periodic_on(grid);
    for (const auto& h : field.harmonics()) {
        for (int pass = 0; pass < 2; ++pass) {
            const bool is_sin = pass == 1;
            if (is_sin && h.k == 0) continue;
            const auto& amps = is_sin ? h.sin_amp : h.cos_amp;
            for (int c = 0; c < components_; ++c) {
                for (const auto& term : amps[c].terms()) {
                    Entry e{c, h.k, is_sin, term.envelope, ScalarField(grid), ScalarField(grid), ScalarField(grid)};
                    for (int j = 0; j < grid.ny(); ++j) {
                        for (int i = 0; i < grid.nx(); ++i) {
                            const double arg = term.kx * grid.x(i) + term.ky * grid.y(j);
                            const double cv = std::cos(arg);
                            const double sv = std::sin(arg);
                            const double d = -term.cos_coeff * sv + term.sin_coeff * cv;
                            e.value.at(i, j) = term.cos_coeff * cv + term.sin_coeff * sv;
                            e.dx.at(i, j) = term.kx * d;
                            e.dy.at(i, j) = term.ky * d;
                        }
                    }
                    entries_.push_back(std::move(e));
                }
            }
        }
    }
}

SampledField FieldSampler::accumulate(double t, double theta, bool average_only) const {
    SampledField out;
    for (int c = 0; c < components_; ++c) {
        out.value.emplace_back(grid_);
        out.gradient.emplace_back(grid_);
    }
    for (const auto& e : entries_) {
        if (average_only && e.k != 0) continue;
        const auto [cf, sf] = phase_factors(e.k, theta);
        const double w = e.envelope.value(t) * (e.is_sin ? sf : cf);
        if (w == 0.0) continue;
        out.value[e.component].axpy(w, e.value);
        out.gradient[e.component].x.axpy(w, e.dx);
        out.gradient[e.component].y.axpy(w, e.dy);
    }
    return out;
}

SampledField FieldSampler::sample(double t, double theta) const { return accumulate(t, theta, false); }

SampledField FieldSampler::sample_average(double t) const { return accumulate(t, 0.0, true); }

double FieldSampler::max_magnitude(const SampledField& s) {
    if (s.value.empty()) return 0.0;
    double m = 0.0;
    for (std::size_t k = 0; k < s.value.front().size(); ++k) {
        double sq = 0.0;
        for (const auto& c : s.value) sq += c[k] * c[k];
        m = std::max(m, std::sqrt(sq));
    }
    return m;
}

// ---------------------------------------------------------------------------
// GridFields

GridFields::GridFields(const Scenario& scenario, const TorusGrid& grid)
    : tide_velocity_((scenario.require_periodic_on(grid), scenario.tide_velocity), grid),
      tide_depth_(scenario.tide_depth, grid),
      wind_(scenario.wind, grid),
      flat_(scenario.mean_depth.flat),
      depth_(grid, 1.0),
      depth_gradient_(grid) {
    if (flat_) return;
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            depth_.at(i, j) = scenario.mean_depth.value(grid.x(i), grid.y(j));
            const auto g = scenario.mean_depth.gradient(grid.x(i), grid.y(j));
            depth_gradient_.x.at(i, j) = g[0];
            depth_gradient_.y.at(i, j) = g[1];
        }
    }
}

GridFields::Sample GridFields::sample(double t, double theta) const {
    return {tide_velocity_.sample(t, theta), tide_depth_.sample(t, theta), wind_.sample(t, theta)};
}

GridFields::Sample GridFields::sample_average(double t) const {
    return {tide_velocity_.sample_average(t), tide_depth_.sample_average(t), wind_.sample_average(t)};
}

}  // namespace coastal
