#pragma once

// Scale analysis of the coastal perturbation problem: the small parameter
// eps = 1 / (t_obs * omega_tide), the dimensionless groups that weight each
// term of the rescaled equations, and their classification as c * eps^p.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coastal {

enum class RegimeKind { ContinentalShelf, CoastalZone, CoastalLayer };
enum class Weather { Calm, Storm };

struct Regime {
    RegimeKind kind = RegimeKind::ContinentalShelf;
    Weather weather = Weather::Calm;

    bool operator==(const Regime&) const = default;
};

std::string_view to_string(RegimeKind kind);
std::string_view to_string(Weather weather);
/// Accepts "shelf" / "zone" / "layer" (and the long enum names).
RegimeKind parse_regime_kind(std::string_view name);
/// Accepts "calm" / "storm".
Weather parse_weather(std::string_view name);

/// Dimensional reference values.  Units are fixed per field and noted below;
/// everything is converted to {km, day} before ratios are formed.
struct PhysicalScales {
    double t_obs = 0.0;         // observation time scale [h]
    double omega_tide = 0.0;    // tide frequency [1/h]
    double L_long = 0.0;        // along-shore length [km]
    double l_lat = 0.0;         // cross-shore length [km]
    double M_tide = 0.0;        // tide velocity [km/day]
    double N_pert = 0.0;        // perturbation velocity [km/day]
    double E_depth = 0.0;       // mean depth [m]
    double H_range = 0.0;       // tidal range [m]
    double I_pert = 0.0;        // sea-level perturbation [m]
    double W_wind = 0.0;        // wind velocity [km/h]
    std::optional<double> F_scale;  // other meteorological forcing [km/day^2]
    double f_coriolis = 0.0;    // Coriolis parameter [1/s]
    double g_gravity = 0.0;     // gravity [km/day^2]
    double c_viscosity = 0.0;   // water viscosity [km^2/day]
    double kappa_bottom = 0.0;  // bottom friction [km/day]
    double mu_air = 0.0;        // air-water friction [km/day]

    /// Throws DomainError on non-positive or non-finite values, or when the
    /// observation window does not exceed one tide period.
    void validate() const;
};

/// c * eps^p with p a signed half-integer.
struct PowerTag {
    double coeff = 1.0;
    double power = 0.0;

    double value(double eps) const;
};

struct Group {
    std::string id;
    std::string label;
    double value = 0.0;
    PowerTag tag;
};

struct DimensionlessGroups {
    Regime regime;
    double eps = 0.0;
    std::vector<Group> groups;  // stable order

    const Group& get(std::string_view id) const;
    const Group* find(std::string_view id) const noexcept;
};

/// eps = 1 / (t_obs * omega_tide).
double compute_epsilon(const PhysicalScales& scales);

/// Reference values for a regime, with eps-scaled perturbation sizes
/// N = eps M and I = eps H.
PhysicalScales preset(Regime regime);

/// Every dimensionless group, each classified with fit_power_tag.
DimensionlessGroups derive_groups(const PhysicalScales& scales, Regime regime);

/// Classifies value as coeff * eps^power.  Integer powers whose coefficient
/// falls in [0.1, 30] are tried first, then half-integer powers in the same
/// window, then the half-integer minimizing |log10 coeff| without the window.
/// Within a stage the smallest |log10 coeff| wins, ties go to smaller |power|.
PowerTag fit_power_tag(double value, double eps);

/// Ratio between gamma (the coefficient multiplying the rescaled wind in the
/// regime's momentum equation) and W/M.
double gamma_per_wind_ratio(RegimeKind kind);

struct CoefficientRow {
    std::string id;
    std::string description;
    PowerTag tag;                      // tabulated coefficient for the regime
    double value = 0.0;                // tag evaluated at eps
    std::optional<double> measured;    // matching group from the dimensional inputs
};

struct CoefficientTable {
    Regime regime;
    double eps = 0.0;
    std::vector<CoefficientRow> rows;

    const CoefficientRow& get(std::string_view id) const;
};

/// The regime system's term coefficients as c * eps^p, evaluated at groups.eps.
CoefficientTable regime_coefficients(const DimensionlessGroups& groups);

/// Same table evaluated at an arbitrary eps (measured values omitted).
CoefficientTable regime_coefficients(Regime regime, double eps);

void write_groups_table(std::ostream& out, const DimensionlessGroups& groups);
void write_groups_csv(std::ostream& out, const DimensionlessGroups& groups);
void write_coefficients_table(std::ostream& out, const CoefficientTable& table);
void write_coefficients_csv(std::ostream& out, const CoefficientTable& table);

}  // namespace coastal
