#include "coastal/scales.hpp"

#include "coastal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

namespace coastal {

namespace {

constexpr double kHoursPerDay = 24.0;
constexpr double kSecondsPerDay = 86400.0;
constexpr double kMetresPerKm = 1000.0;

// Preset constants shared by all regimes.
constexpr double kObservationHours = 2400.0;
constexpr double kTidePeriodHours = 13.0;

struct Normalized {
    double t, omega, L, l, M, N, E, H, I, W, f, g, c, kappa, mu;
    std::optional<double> F;
};

Normalized normalize(const PhysicalScales& s) {
    Normalized n{};
    n.t = s.t_obs / kHoursPerDay;
    n.omega = s.omega_tide * kHoursPerDay;
    n.L = s.L_long;
    n.l = s.l_lat;
    n.M = s.M_tide;
    n.N = s.N_pert;
    n.E = s.E_depth / kMetresPerKm;
    n.H = s.H_range / kMetresPerKm;
    n.I = s.I_pert / kMetresPerKm;
    n.W = s.W_wind * kHoursPerDay;
    n.f = s.f_coriolis * kSecondsPerDay;
    n.g = s.g_gravity;
    n.c = s.c_viscosity;
    n.kappa = s.kappa_bottom;
    n.mu = s.mu_air;
    n.F = s.F_scale;
    return n;
}

std::string format_double(double v, const char* fmt = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string format_power(double p) {
    if (p == std::floor(p)) return format_double(p, "%.0f");
    return format_double(p, "%.1f");
}

struct ReferenceTag {
    const char* id;
    const char* description;
    PowerTag tag;
};

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Coefficients of the rescaled systems for each geometry.  The generic
// rescaled system is weighted by these blocks; each regime's own
// equations are the blocks evaluated with the regime's tags.
std::vector<ReferenceTag> reference_tags(Regime regime) {
    const PowerTag gamma = regime.weather == Weather::Calm ? PowerTag{0.1, -1} : PowerTag{1.0, -1};
    switch (regime.kind) {
        case RegimeKind::ContinentalShelf:
            return {
                {"cont_depth_flux", "(H/I)(N t/L): continuity depth-flux weight", {2, 0}},
                {"mean_depth_ratio", "E/H: mean depth over tidal range", {0.5, -1}},
                {"tide_transport", "M t/L: transport by the tide", {2, 0}},
                {"pert_transport", "N t/L: self-transport of the perturbation", {2, 1}},
                {"coriolis", "f t: Coriolis", {kHalfPi, -1}},
                {"pressure", "(g t/N)(I/L): pressure gradient", {0.25, -1}},
                {"viscosity", "c t/L^2: viscosity", {13, 5}},
                {"tide_pert_ratio", "M/N", {1, -1}},
                {"depth_ratio", "H/E", {2, 1}},
                {"depth_pert_ratio", "I/E", {2, 2}},
                {"bottom_friction", "kappa t/E: bottom friction", {3, 0}},
                {"bottom_friction_depth", "kappa E/c", {0.8, -2}},
                {"wind_friction", "mu t/E: air-water friction", {6, 1}},
                {"wind_friction_depth", "mu E/c", {1.5, -1}},
                {"gamma", "gamma: rescaled wind weight", gamma},
                {"anisotropy", "L/l: geometric anisotropy", {1, 0}},
                {"forcing", "F t/N: other forcing", {1, 0}},
            };
        case RegimeKind::CoastalZone:
            return {
                {"cont_depth_flux", "(H/I)(N t/L): continuity depth-flux weight", {2, -1}},
                {"mean_depth_ratio", "E/H: mean depth over tidal range", {5, 0}},
                {"tide_transport", "M t/L: transport by the tide", {2, -1}},
                {"pert_transport", "N t/L: self-transport of the perturbation", {2, 0}},
                {"coriolis", "f t: Coriolis", {kHalfPi, -1}},
                {"pressure", "(g t/N)(I/L): pressure gradient", {0.2, -2}},
                {"viscosity", "c t/L^2: viscosity", {0.6, 3}},
                {"tide_pert_ratio", "M/N", {1, -1}},
                {"depth_ratio", "H/E", {0.2, 0}},
                {"depth_pert_ratio", "I/E", {0.2, 1}},
                {"bottom_friction", "kappa t/E: bottom friction", {0.1, -1}},
                {"bottom_friction_depth", "kappa E/c", {0.1, -2}},
                {"wind_friction", "mu t/E: air-water friction", {0.2, 0}},
                {"wind_friction_depth", "mu E/c", {0.25, -1}},
                {"gamma", "gamma: rescaled wind weight", gamma},
                {"anisotropy", "L/l: geometric anisotropy", {1, 0}},
                {"forcing", "F t/N: other forcing", {1, 0}},
            };
        case RegimeKind::CoastalLayer:
            return {
                {"cont_depth_flux", "(H/I)(N t/L): continuity depth-flux weight", {4, 0}},
                {"mean_depth_ratio", "E/H: mean depth over tidal range", {5, 0}},
                {"tide_transport", "M t/L: transport by the tide", {4, 0}},
                {"pert_transport", "N t/L: self-transport of the perturbation", {4, 1}},
                {"coriolis", "f t: Coriolis", {kHalfPi, -1}},
                {"pressure", "(g t/N)(I/L): pressure gradient", {0.4, -1}},
                {"viscosity", "c t/L^2: viscosity", {13, 5}},
                {"tide_pert_ratio", "M/N", {1, -1}},
                {"depth_ratio", "H/E", {0.2, 0}},
                {"depth_pert_ratio", "I/E", {0.2, 1}},
                {"bottom_friction", "kappa t/E: bottom friction", {0.1, -1}},
                {"bottom_friction_depth", "kappa E/c", {0.1, -2}},
                {"wind_friction", "mu t/E: air-water friction", {0.2, 0}},
                {"wind_friction_depth", "mu E/c", {0.25, -1}},
                {"gamma", "gamma: rescaled wind weight", gamma},
                {"anisotropy", "L/l: geometric anisotropy", {0.5, -1}},
                {"forcing", "F t/N: other forcing", {1, 0}},
            };
    }
    throw DomainError("unknown regime");
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(RegimeKind kind) {
    switch (kind) {
        case RegimeKind::ContinentalShelf: return "shelf";
        case RegimeKind::CoastalZone: return "zone";
        case RegimeKind::CoastalLayer: return "layer";
    }
    return "?";
}

std::string_view to_string(Weather weather) { return weather == Weather::Calm ? "calm" : "storm"; }

RegimeKind parse_regime_kind(std::string_view name) {
    if (name == "shelf" || name == "ContinentalShelf") return RegimeKind::ContinentalShelf;
    if (name == "zone" || name == "CoastalZone") return RegimeKind::CoastalZone;
    if (name == "layer" || name == "CoastalLayer") return RegimeKind::CoastalLayer;
    throw DomainError("unknown regime '" + std::string(name) + "' (expected shelf, zone or layer)");
}

Weather parse_weather(std::string_view name) {
    if (name == "calm" || name == "Calm") return Weather::Calm;
    if (name == "storm" || name == "Storm") return Weather::Storm;
    throw DomainError("unknown weather '" + std::string(name) + "' (expected calm or storm)");
}

void PhysicalScales::validate() const {
    const std::pair<const char*, double> fields[] = {
        {"t_obs", t_obs},         {"omega_tide", omega_tide}, {"L_long", L_long},
        {"l_lat", l_lat},         {"M_tide", M_tide},         {"N_pert", N_pert},
        {"E_depth", E_depth},     {"H_range", H_range},       {"I_pert", I_pert},
        {"W_wind", W_wind},       {"f_coriolis", f_coriolis}, {"g_gravity", g_gravity},
        {"c_viscosity", c_viscosity}, {"kappa_bottom", kappa_bottom}, {"mu_air", mu_air},
    };
    for (const auto& [name, v] : fields) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError(std::string("PhysicalScales: ") + name + " must be positive and finite");
        }
    }
    if (F_scale && (!(*F_scale > 0.0) || !std::isfinite(*F_scale))) {
        throw DomainError("PhysicalScales: F_scale must be positive and finite when given");
    }
    if (!(omega_tide * t_obs > 1.0)) {
        throw DomainError("PhysicalScales: observation window must exceed one tide period");
    }
}

double PowerTag::value(double eps) const { return coeff * std::pow(eps, power); }

const Group* DimensionlessGroups::find(std::string_view id) const noexcept {
    for (const auto& g : groups) {
        if (g.id == id) return &g;
    }
    return nullptr;
}

const Group& DimensionlessGroups::get(std::string_view id) const {
    if (const Group* g = find(id)) return *g;
    throw DomainError("no dimensionless group '" + std::string(id) + "'");
}

const CoefficientRow& CoefficientTable::get(std::string_view id) const {
    for (const auto& r : rows) {
        if (r.id == id) return r;
    }
    throw DomainError("no coefficient '" + std::string(id) + "'");
}

double compute_epsilon(const PhysicalScales& scales) {
    if (!(scales.t_obs > 0.0) || !(scales.omega_tide > 0.0) || !std::isfinite(scales.t_obs) ||
        !std::isfinite(scales.omega_tide)) {
        throw DomainError("compute_epsilon: t_obs and omega_tide must be positive");
    }
    return 1.0 / (scales.t_obs * scales.omega_tide);
}

PhysicalScales preset(Regime regime) {
    PhysicalScales s;
    s.t_obs = kObservationHours;
    s.omega_tide = 1.0 / kTidePeriodHours;
    s.f_coriolis = 4e-5;
    s.g_gravity = 1e6;
    s.c_viscosity = 1e-7;
    s.kappa_bottom = 1e-2;
    s.mu_air = 1e-4;
    s.W_wind = regime.weather == Weather::Calm ? 10.0 : 100.0;
    switch (regime.kind) {
        case RegimeKind::ContinentalShelf:
            s.M_tide = 0.5 * kHoursPerDay;
            s.L_long = 500.0;
            s.l_lat = 500.0;
            s.E_depth = 300.0;
            s.H_range = 3.0;
            break;
        case RegimeKind::CoastalZone:
            s.M_tide = 1.0 * kHoursPerDay;
            s.L_long = 5.0;
            s.l_lat = 5.0;
            s.E_depth = 50.0;
            s.H_range = 10.0;
            break;
        case RegimeKind::CoastalLayer:
            s.M_tide = 1.0 * kHoursPerDay;
            s.L_long = 500.0;
            s.l_lat = 5.0;
            s.E_depth = 50.0;
            s.H_range = 10.0;
            break;
    }
    const double eps = compute_epsilon(s);
    s.N_pert = eps * s.M_tide;
    s.I_pert = eps * s.H_range;
    return s;
}

double gamma_per_wind_ratio(RegimeKind kind) {
    // Shelf: gamma W multiplies the wind directly.  Zone and layer write the
    // wind term as gamma/(2 eps) W, so gamma = 2 W/M there.
    return kind == RegimeKind::ContinentalShelf ? 1.0 : 2.0;
}

DimensionlessGroups derive_groups(const PhysicalScales& scales, Regime regime) {
    scales.validate();
    const Normalized n = normalize(scales);
    DimensionlessGroups out;
    out.regime = regime;
    out.eps = 1.0 / (n.t * n.omega);

    auto add = [&](const char* id, const char* label, double value) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw DomainError(std::string("derive_groups: group ") + id + " is not a positive finite number");
        }
        out.groups.push_back(Group{id, label, value, fit_power_tag(value, out.eps)});
    };

    const double wind_ratio = n.W / n.M;
    add("coriolis", "f t", n.f * n.t);
    add("pressure", "(g t/N)(I/L)", (n.g * n.t / n.N) * (n.I / n.L));
    add("viscosity", "c t/L^2", n.c * n.t / (n.L * n.L));
    add("bottom_friction", "kappa t/E", n.kappa * n.t / n.E);
    add("bottom_friction_depth", "kappa E/c", n.kappa * n.E / n.c);
    add("wind_friction", "mu t/E", n.mu * n.t / n.E);
    add("wind_friction_depth", "mu E/c", n.mu * n.E / n.c);
    add("tide_transport", "M t/L", n.M * n.t / n.L);
    add("pert_transport", "N t/L", (n.M * n.t / n.L) * (n.N / n.M));
    add("anisotropy", "L/l", n.L / n.l);
    add("depth_ratio", "H/E", n.H / n.E);
    add("tide_excursion", "(M/omega)/L", (n.M / n.omega) / n.L);
    add("gamma", "gamma", gamma_per_wind_ratio(regime.kind) * wind_ratio);
    add("cont_depth_flux", "(H/I)(N t/L)", (n.H / n.I) * (n.N * n.t / n.L));
    add("mean_depth_ratio", "E/H", n.E / n.H);
    add("tide_pert_ratio", "M/N", n.M / n.N);
    add("depth_pert_ratio", "I/E", n.I / n.E);
    add("wind_ratio", "W/M", wind_ratio);
    add("wind_pert_ratio", "W/N", n.W / n.N);
    if (n.F) add("forcing", "F t/N", *n.F * n.t / n.N);
    return out;
}

PowerTag fit_power_tag(double value, double eps) {
    if (!(value > 0.0) || !std::isfinite(value)) throw DomainError("fit_power_tag: value must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("fit_power_tag: eps must lie in (0, 1)");

    constexpr int kMaxHalfSteps = 40;  // |power| <= 20
    struct Candidate {
        double coeff;
        double power;
        double score;
    };
    auto better = [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score < b.score;
        return std::abs(a.power) < std::abs(b.power);
    };
    auto best_of = [&](bool integers, bool windowed) -> std::optional<Candidate> {
        std::optional<Candidate> best;
        for (int m = -kMaxHalfSteps; m <= kMaxHalfSteps; ++m) {
            if (integers != (m % 2 == 0)) continue;
            const double p = 0.5 * m;
            const double c = value / std::pow(eps, p);
            // Inclusive window with a little room for rounding in value / eps^p.
            if (windowed && (c < 0.1 * (1 - 1e-12) || c > 30.0 * (1 + 1e-12))) continue;
            const Candidate cand{c, p, std::abs(std::log10(c))};
            if (!best || better(cand, *best)) best = cand;
        }
        return best;
    };

    std::optional<Candidate> pick = best_of(true, true);
    if (!pick) pick = best_of(false, true);
    if (!pick) {
        auto i = best_of(true, false);
        auto h = best_of(false, false);
        pick = better(*i, *h) ? i : h;
    }
    return PowerTag{pick->coeff, pick->power};
}

CoefficientTable regime_coefficients(Regime regime, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("regime_coefficients: eps must lie in (0, 1)");
    CoefficientTable table;
    table.regime = regime;
    table.eps = eps;
    for (const auto& t : reference_tags(regime)) {
        table.rows.push_back(CoefficientRow{t.id, t.description, t.tag, t.tag.value(eps), std::nullopt});
    }
    return table;
}

CoefficientTable regime_coefficients(const DimensionlessGroups& groups) {
    CoefficientTable table = regime_coefficients(groups.regime, groups.eps);
    for (auto& row : table.rows) {
        if (const Group* g = groups.find(row.id)) row.measured = g->value;
    }
    return table;
}

// ---------------------------------------------------------------------------
// Reports

void write_groups_table(std::ostream& out, const DimensionlessGroups& groups) {
    char line[256];
    std::snprintf(line, sizeof line, "regime: %s (%s)\n", std::string(to_string(groups.regime.kind)).c_str(),
                  std::string(to_string(groups.regime.weather)).c_str());
    out << line;
    std::snprintf(line, sizeof line, "eps = %.6g (1/eps = %.4g)\n\n", groups.eps, 1.0 / groups.eps);
    out << line;
    std::snprintf(line, sizeof line, "%-22s %-14s %12s %10s %6s %12s %9s\n", "group", "ratio", "value", "coeff",
                  "power", "coeff*eps^p", "rel_dev");
    out << line;
    for (const auto& g : groups.groups) {
        const double fitted = g.tag.value(groups.eps);
        std::snprintf(line, sizeof line, "%-22s %-14s %12.4e %10.4g %6s %12.4e %9.3f\n", g.id.c_str(),
                      g.label.c_str(), g.value, g.tag.coeff, format_power(g.tag.power).c_str(), fitted,
                      std::abs(g.value - fitted) / g.value);
        out << line;
    }
}

void write_groups_csv(std::ostream& out, const DimensionlessGroups& groups) {
    out << "group,ratio,value,coeff,power\n";
    out << "eps,1/(t omega)," << format_double(groups.eps, "%.17g") << ",1,1\n";
    for (const auto& g : groups.groups) {
        out << g.id << ',' << g.label << ',' << format_double(g.value, "%.17g") << ','
            << format_double(g.tag.coeff, "%.17g") << ',' << format_power(g.tag.power) << '\n';
    }
}

void write_coefficients_table(std::ostream& out, const CoefficientTable& table) {
    char line[256];
    std::snprintf(line, sizeof line, "%-22s %10s %6s %12s %12s  %s\n", "term", "coeff", "power", "value",
                  "measured", "description");
    out << line;
    for (const auto& r : table.rows) {
        const std::string measured = r.measured ? format_double(*r.measured, "%.4e") : std::string("-");
        std::snprintf(line, sizeof line, "%-22s %10.4g %6s %12.4e %12s  %s\n", r.id.c_str(), r.tag.coeff,
                      format_power(r.tag.power).c_str(), r.value, measured.c_str(), r.description.c_str());
        out << line;
    }
}

void write_coefficients_csv(std::ostream& out, const CoefficientTable& table) {
    out << "term,coeff,power,value,measured\n";
    for (const auto& r : table.rows) {
        out << r.id << ',' << format_double(r.tag.coeff, "%.17g") << ',' << format_power(r.tag.power) << ','
            << format_double(r.value, "%.17g") << ','
            << (r.measured ? format_double(*r.measured, "%.17g") : std::string()) << '\n';
    }
}

}  // namespace coastal
