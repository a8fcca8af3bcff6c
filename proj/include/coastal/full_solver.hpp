#pragma once

// The eps-dependent perturbation system for u = (iota, n1, n2) on the torus,
//
//   d_t iota + grad H . n + (1/eps + H) div n + grad iota . M + iota div M
//            + eps (grad iota . n + iota div n) = 0
//   d_t n + (grad n) M + (grad M) n + eps (grad n) n + (1/eps) n_perp
//            + (1/eps) grad iota = W,
//
// integrated in its symmetric hyperbolic form
//
//   A0 d_t u + A1 d_1 u + A2 d_2 u + (1/eps)(S1 d_1 u + S2 d_2 u + u_perp) = A0 F
//
// with M, H, W evaluated at the fast phase theta = t/eps.  Also evaluates
// the right-hand sides of the three rescaled regime systems.

#include "coastal/fields.hpp"
#include "coastal/scales.hpp"
#include "coastal/spectral.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace coastal {

struct State {
    ScalarField iota;
    VectorField n;
    double time = 0.0;

    explicit State(const TorusGrid& grid, double t = 0.0) : iota(grid), n(grid), time(t) {}
    State(ScalarField iota_, VectorField n_, double t);

    const TorusGrid& grid() const noexcept { return iota.grid(); }

    /// this += a * other (time untouched)
    State& axpy(double a, const State& other);
    bool all_finite() const noexcept;

    Snapshot snapshot() const;
    static State from_snapshot(const Snapshot& snap);
};

/// n_perp = (-n2, n1)
VectorField perp(const VectorField& n);

/// Pointwise coefficients of the symmetric form at one (t, theta).
///
/// A0 = diag(1/D, 1, 1) with D = 1 + eps H + eps^2 iota.  A1, A2 are
/// diagonal with entries (M_j + eps n_j) * (1/D, 1, 1).  S1 couples
/// components (0, 1), S2 couples (0, 2).
struct CoefficientMatrices {
    ScalarField depth_factor;              // D
    std::array<ScalarField, 3> a0;         // diagonal of A0
    std::array<ScalarField, 3> a1;         // diagonal of A1
    std::array<ScalarField, 3> a2;         // diagonal of A2
    std::array<ScalarField, 3> source;     // F
    static constexpr std::array<std::array<double, 3>, 3> s1{{{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}};
    static constexpr std::array<std::array<double, 3>, 3> s2{{{0, 0, 1}, {0, 0, 0}, {1, 0, 0}}};
};

CoefficientMatrices assemble_coefficients(const State& state, double t, double eps, const GridFields& fields);

/// du/dt of the simplified system.  Products are formed on the grid and the
/// result is projected onto the dealiased band.  Throws SolverAbort when the
/// depth factor D is not positive somewhere.
State assemble_simplified_rhs(const State& state, double t, double eps, const GridFields& fields);

/// Grid sum of (S1 d_1 u + S2 d_2 u) . u times the cell area.
double skew_sum(const State& state);

/// Integral of A0 u . u.
double weighted_energy(const State& state, double t, double eps, const GridFields& fields);

/// One classical RK4 step.  Throws SolverAbort (carrying the start time) if
/// the result is not finite.
State step_rk4(const State& state, double dt, double eps, const GridFields& fields);

/// safety * eps * min(hx, hy) / (1 + max|M| + eps max|n|), with max|M| taken
/// at the state's time and phase.
double cfl_time_step(const State& state, double eps, double safety, const GridFields& fields);

struct FullDiagnostics {
    double time = 0.0;
    double h4_norm = 0.0;
    double l2_norm = 0.0;
    double min_depth_factor = 0.0;
    double max_abs_u = 0.0;
    double energy = 0.0;  // A0-weighted, reported only
};

struct FullRunConfig {
    double eps = 0.1;
    double end_time = 1.0;
    double safety = 0.5;
    int outputs = 10;          // number of uniform output intervals on [0, T]
    TorusGrid grid{32, 32};
    Scenario scenario;
    std::optional<State> initial;  // zero state when absent
    std::optional<std::filesystem::path> snapshot_dir;
    int snapshot_every = 1;    // write every k-th output as TSF1
    double sobolev_index = 4.0;
    bool keep_trajectory = true;
    std::function<void(const State&)> on_output;  // called at every output time

    void validate() const;
};

struct FullRunResult {
    std::vector<Snapshot> trajectory;  // one per output time reached (when kept)
    std::vector<FullDiagnostics> diagnostics;
    long steps = 0;
    bool aborted = false;
    std::string abort_reason;
    double abort_time = 0.0;
};

/// Integrates to end_time.  Between outputs the CFL step is re-evaluated and
/// rounded so that an integer number of equal steps lands on the output time.
/// Solver aborts are caught and reported through the result.
FullRunResult run(const FullRunConfig& config);

FullDiagnostics diagnose(const State& state, double eps, double sobolev_index, const GridFields& fields);

// ---------------------------------------------------------------------------
// Regime systems

/// Weights of the generic rescaled system.  With the anisotropic operators
/// grad_a = (d_1, r d_2), div_a, Jacobian J_a and Laplacian Lap_a, and
/// D = E + h_e H + i_e iota,
///
///   d_t iota = -{ a_flux [grad_a(e E + H) . n + (e E + H) div_a n]
///                 + a_tide [grad_a iota . M + iota div_a M]
///                 + a_pert [grad_a iota . n + iota div_a n] }
///   d_t n    = -{ a_tide [(J_a n) M + (J_a M) n] + a_pert (J_a n) n
///                 + coriolis n_perp + pressure grad_a iota }
///              + viscosity [m Lap_a M + Lap_a n
///                 + (J_a (m M + n)) grad_a(E + h_e H + i_e iota) / D]
///              - bottom_friction (m M + n) / (D (1 + bottom_friction_depth D))
///              + wind_friction (w W - m M - n) / (D (1 + wind_friction_depth D))
///              + forcing F
///
/// with m = tide_pert_ratio and w = wind_pert_ratio.
struct RegimeWeights {
    double a_flux = 0.0;
    double e_ratio = 0.0;
    double a_tide = 0.0;
    double a_pert = 0.0;
    double anisotropy = 1.0;  // r
    double coriolis = 0.0;
    double pressure = 0.0;
    double viscosity = 0.0;
    double tide_pert_ratio = 0.0;
    double depth_ratio = 0.0;
    double depth_pert_ratio = 0.0;
    double bottom_friction = 0.0;
    double bottom_friction_depth = 0.0;
    double wind_friction = 0.0;
    double wind_friction_depth = 0.0;
    double wind_pert_ratio = 0.0;
    double forcing = 0.0;

    /// Tabulated weights for the table's regime, evaluated at its eps.
    static RegimeWeights from_table(const CoefficientTable& table);
    /// Weights that reduce the generic system to the simplified one over a
    /// flat bottom, with the forcing slot carrying W.
    static RegimeWeights simplified(double eps);
};

struct RegimeTerm {
    std::string id;
    double weight = 0.0;     // coefficient multiplying the operator
    double raw_max = 0.0;    // max |operator| before weighting
    double max_abs = 0.0;    // max |weighted contribution|
};

struct RegimeRhs {
    State rhs;
    std::vector<RegimeTerm> terms;

    const RegimeTerm& term(std::string_view id) const;
};

/// Evaluates the generic system with explicit weights.  `forcing` is F (zero
/// when absent).  Throws DomainError when D vanishes or changes sign.
RegimeRhs regime_rhs(const RegimeWeights& weights, const State& state, double t, double eps,
                     const GridFields& fields, const VectorField* forcing = nullptr);

/// Evaluates the regime's system with the weights tabulated for groups.regime
/// at groups.eps (the eps argument sets the fast phase theta = t/eps).
RegimeRhs regime_rhs(Regime regime, const State& state, double t, double eps, const GridFields& fields,
                     const DimensionlessGroups& groups);

}  // namespace coastal
