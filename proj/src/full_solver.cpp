#include "coastal/full_solver.hpp"

#include "coastal/errors.hpp"
#include "coastal/tsf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace coastal {

namespace {

struct Partials {
    ScalarField dx;
    ScalarField dy;
};

// Both first derivatives from a single forward transform.
Partials partials(const ScalarField& f) {
    const Spectrum s(f);
    return {s.ddx().to_field(), s.ddy().to_field()};
}

ScalarField depth_factor(const State& state, const ScalarField& h, double eps) {
    ScalarField d(state.grid(), 1.0);
    d.axpy(eps, h);
    d.axpy(eps * eps, state.iota);
    return d;
}

double min_value(const ScalarField& f) {
    double m = std::numeric_limits<double>::infinity();
    for (double v : f.values()) m = std::min(m, v);
    return m;
}

void require_positive_depth(const ScalarField& d, double t) {
    const double m = min_value(d);
    if (!(m > 0.0)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "depth factor 1 + eps H + eps^2 iota lost positivity (min %.6g) at t = %.6g",
                      m, t);
        throw SolverAbort(buf, t);
    }
}

}  // namespace

State::State(ScalarField iota_, VectorField n_, double t) : iota(std::move(iota_)), n(std::move(n_)), time(t) {
    require_same_grid(iota.grid(), n.grid(), "State");
}

State& State::axpy(double a, const State& other) {
    iota.axpy(a, other.iota);
    n.x.axpy(a, other.n.x);
    n.y.axpy(a, other.n.y);
    return *this;
}

bool State::all_finite() const noexcept { return iota.all_finite() && n.x.all_finite() && n.y.all_finite(); }

Snapshot State::snapshot() const { return Snapshot{time, {iota, n.x, n.y}}; }

State State::from_snapshot(const Snapshot& snap) {
    if (snap.components.size() != 3) throw DomainError("State: snapshot must have 3 components");
    return State(snap.components[0], VectorField(snap.components[1], snap.components[2]), snap.time);
}

VectorField perp(const VectorField& n) { return VectorField(-1.0 * n.y, n.x); }

CoefficientMatrices assemble_coefficients(const State& state, double t, double eps, const GridFields& fields) {
    require_same_grid(state.grid(), fields.grid(), "assemble_coefficients");
    const auto f = fields.sample(t, t / eps);
    const auto& m = f.tide_velocity;
    const auto& h = f.tide_depth;
    const auto& w = f.wind;

    const TorusGrid& grid = state.grid();
    const std::size_t size = grid.size();
    const std::array<ScalarField, 3> blank{ScalarField(grid), ScalarField(grid), ScalarField(grid)};
    CoefficientMatrices c{depth_factor(state, h.value[0], eps), blank, blank, blank, blank};
    for (std::size_t k = 0; k < size; ++k) {
        const double inv_d = 1.0 / c.depth_factor[k];
        const double v1 = m.value[0][k] + eps * state.n.x[k];
        const double v2 = m.value[1][k] + eps * state.n.y[k];
        const double n1 = state.n.x[k];
        const double n2 = state.n.y[k];
        c.a0[0][k] = inv_d;
        c.a0[1][k] = 1.0;
        c.a0[2][k] = 1.0;
        c.a1[0][k] = v1 * inv_d;
        c.a1[1][k] = v1;
        c.a1[2][k] = v1;
        c.a2[0][k] = v2 * inv_d;
        c.a2[1][k] = v2;
        c.a2[2][k] = v2;
        const double div_m = m.gradient[0].x[k] + m.gradient[1].y[k];
        c.source[0][k] = -(h.gradient[0].x[k] * n1 + h.gradient[0].y[k] * n2) - div_m * state.iota[k];
        c.source[1][k] = w.value[0][k] - (m.gradient[0].x[k] * n1 + m.gradient[0].y[k] * n2);
        c.source[2][k] = w.value[1][k] - (m.gradient[1].x[k] * n1 + m.gradient[1].y[k] * n2);
    }
    return c;
}

State assemble_simplified_rhs(const State& state, double t, double eps, const GridFields& fields) {
    const CoefficientMatrices c = assemble_coefficients(state, t, eps, fields);
    require_positive_depth(c.depth_factor, t);

    const std::array<Partials, 3> d{partials(state.iota), partials(state.n.x), partials(state.n.y)};
    // u_perp = (0, -n2, n1)
    const std::array<const ScalarField*, 3> u_perp{nullptr, &state.n.y, &state.n.x};
    const std::array<double, 3> perp_sign{0.0, -1.0, 1.0};
    const double inv_eps = 1.0 / eps;

    State out(state.grid(), state.time);
    std::array<ScalarField*, 3> rhs{&out.iota, &out.n.x, &out.n.y};
    const std::size_t size = state.grid().size();
    for (int r = 0; r < 3; ++r) {
        ScalarField& o = *rhs[r];
        for (std::size_t k = 0; k < size; ++k) {
            double skew = 0.0;
            for (int col = 0; col < 3; ++col) {
                skew += CoefficientMatrices::s1[r][col] * d[col].dx[k] + CoefficientMatrices::s2[r][col] * d[col].dy[k];
            }
            if (u_perp[r]) skew += perp_sign[r] * (*u_perp[r])[k];
            const double bracket = c.a0[r][k] * c.source[r][k] - c.a1[r][k] * d[r].dx[k] -
                                   c.a2[r][k] * d[r].dy[k] - inv_eps * skew;
            o[k] = bracket / c.a0[r][k];
        }
        o = dealias(o);
    }
    return out;
}

double skew_sum(const State& state) {
    const Partials di = partials(state.iota);
    const Partials d1 = partials(state.n.x);
    const Partials d2 = partials(state.n.y);
    double sum = 0.0;
    for (std::size_t k = 0; k < state.grid().size(); ++k) {
        // (S1 d1 u + S2 d2 u) = (d1 n1 + d2 n2, d1 iota, d2 iota)
        sum += (d1.dx[k] + d2.dy[k]) * state.iota[k] + di.dx[k] * state.n.x[k] + di.dy[k] * state.n.y[k];
    }
    return sum * state.grid().cell_area();
}

double weighted_energy(const State& state, double t, double eps, const GridFields& fields) {
    const auto f = fields.sample(t, t / eps);
    const ScalarField d = depth_factor(state, f.tide_depth.value[0], eps);
    double sum = 0.0;
    for (std::size_t k = 0; k < state.grid().size(); ++k) {
        sum += state.iota[k] * state.iota[k] / d[k] + state.n.x[k] * state.n.x[k] + state.n.y[k] * state.n.y[k];
    }
    return sum * state.grid().cell_area();
}

State step_rk4(const State& state, double dt, double eps, const GridFields& fields) {
    const double t = state.time;
    const State k1 = assemble_simplified_rhs(state, t, eps, fields);
    State stage = state;
    stage.axpy(0.5 * dt, k1);
    const State k2 = assemble_simplified_rhs(stage, t + 0.5 * dt, eps, fields);
    stage = state;
    stage.axpy(0.5 * dt, k2);
    const State k3 = assemble_simplified_rhs(stage, t + 0.5 * dt, eps, fields);
    stage = state;
    stage.axpy(dt, k3);
    const State k4 = assemble_simplified_rhs(stage, t + dt, eps, fields);

    State out = state;
    out.axpy(dt / 6.0, k1);
    out.axpy(dt / 3.0, k2);
    out.axpy(dt / 3.0, k3);
    out.axpy(dt / 6.0, k4);
    out.time = t + dt;
    if (!out.all_finite()) throw SolverAbort("non-finite state after RK4 step", t);
    return out;
}

double cfl_time_step(const State& state, double eps, double safety, const GridFields& fields) {
    const auto m = fields.sample(state.time, state.time / eps).tide_velocity;
    const double max_m = FieldSampler::max_magnitude(m);
    double max_n = 0.0;
    for (std::size_t k = 0; k < state.grid().size(); ++k) {
        max_n = std::max(max_n, std::hypot(state.n.x[k], state.n.y[k]));
    }
    const TorusGrid& g = state.grid();
    return safety * eps * std::min(g.hx(), g.hy()) / (1.0 + max_m + eps * max_n);
}

FullDiagnostics diagnose(const State& state, double eps, double sobolev_index, const GridFields& fields) {
    const std::array<ScalarField, 3> u{state.iota, state.n.x, state.n.y};
    FullDiagnostics d;
    d.time = state.time;
    d.h4_norm = sobolev_norm(u, sobolev_index);
    d.l2_norm = sobolev_norm(u, 0.0);
    const auto h = fields.sample(state.time, state.time / eps).tide_depth;
    d.min_depth_factor = min_value(depth_factor(state, h.value[0], eps));
    d.max_abs_u = std::max({state.iota.max_abs(), state.n.x.max_abs(), state.n.y.max_abs()});
    d.energy = weighted_energy(state, state.time, eps, fields);
    return d;
}

void FullRunConfig::validate() const {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("full run: eps must lie in (0, 1)");
    if (!(end_time >= 0.0) || !std::isfinite(end_time)) throw DomainError("full run: end time must be >= 0");
    if (!(safety > 0.0 && safety <= 1.0)) throw DomainError("full run: CFL safety must lie in (0, 1]");
    if (outputs < 1) throw DomainError("full run: outputs must be >= 1");
    if (snapshot_every < 1) throw DomainError("full run: snapshot_every must be >= 1");
    if (!(sobolev_index >= 0.0)) throw DomainError("full run: Sobolev index must be >= 0");
    if (initial) require_same_grid(grid, initial->grid(), "full run initial data");
}

FullRunResult run(const FullRunConfig& config) {
    config.validate();
    const GridFields fields(config.scenario, config.grid);
    State state = config.initial ? *config.initial : State(config.grid);
    state.time = 0.0;

    FullRunResult result;
    int output_index = 0;
    auto record = [&](const State& s) {
        if (config.keep_trajectory) result.trajectory.push_back(s.snapshot());
        result.diagnostics.push_back(diagnose(s, config.eps, config.sobolev_index, fields));
        if (config.on_output) config.on_output(s);
        if (config.snapshot_dir && output_index % config.snapshot_every == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "full_%05d.tsf", output_index);
            tsf::write(*config.snapshot_dir / name, s.snapshot());
        }
        ++output_index;
    };

    record(state);
    if (config.end_time == 0.0) return result;

    const double interval = config.end_time / config.outputs;
    try {
        for (int out = 1; out <= config.outputs; ++out) {
            const double target = out == config.outputs ? config.end_time : out * interval;
            const double span = target - state.time;
            const double dt_cfl = cfl_time_step(state, config.eps, config.safety, fields);
            const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt_cfl - 1e-12)));
            const double dt = span / static_cast<double>(steps);
            const double start = state.time;
            for (long s = 0; s < steps; ++s) {
                state = step_rk4(state, dt, config.eps, fields);
                state.time = start + (s + 1) * dt;
                ++result.steps;
            }
            state.time = target;
            record(state);
        }
    } catch (const SolverAbort& e) {
        result.aborted = true;
        result.abort_reason = e.what();
        result.abort_time = e.time();
    }
    return result;
}

}  // namespace coastal
