#include "coastal/limit_solver.hpp"

#include "coastal/errors.hpp"
#include "coastal/tsf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace coastal {

namespace {

constexpr double kHelmholtzTolerance = 1e-10;

}  // namespace

StreamState StreamState::from_q(ScalarField q, double t) {
    ScalarField I = helmholtz_inverse(q);
    return StreamState{std::move(I), std::move(q), t};
}

double StreamState::helmholtz_defect() const { return l2_norm(helmholtz_apply(I) - q); }

std::string_view to_string(InitVariant v) { return v == InitVariant::Printed ? "printed" : "curl"; }

InitVariant parse_init_variant(std::string_view name) {
    if (name == "printed") return InitVariant::Printed;
    if (name == "curl" || name == "curl_consistent") return InitVariant::CurlConsistent;
    throw DomainError("unknown init variant '" + std::string(name) + "' (expected printed or curl)");
}

StreamState init_from_perturbation(const ScalarField& iota0, const VectorField& n0, InitVariant variant) {
    require_same_grid(iota0.grid(), n0.grid(), "init_from_perturbation");
    ScalarField q = iota0;
    if (variant == InitVariant::Printed) {
        q += ddx(n0.x);
        q -= ddy(n0.y);
    } else {
        q -= ddx(n0.y);
        q += ddy(n0.x);
    }
    return StreamState::from_q(std::move(q), 0.0);
}

AveragedCoeffs::AveragedCoeffs(const TorusGrid& grid)
    : M(grid), grad_M{VectorField(grid), VectorField(grid)}, H(grid), grad_H(grid), curl_W(grid) {}

AveragedFields::AveragedFields(const Scenario& scenario, const TorusGrid& grid) : fields_(scenario, grid) {}

AveragedCoeffs AveragedFields::at(double t) const {
    const auto s = fields_.sample_average(t);
    AveragedCoeffs c(grid());
    c.M = VectorField(s.tide_velocity.value[0], s.tide_velocity.value[1]);
    c.grad_M = {s.tide_velocity.gradient[0], s.tide_velocity.gradient[1]};
    c.H = s.tide_depth.value[0];
    c.grad_H = s.tide_depth.gradient[0];
    c.curl_W = s.wind.gradient[0].y - s.wind.gradient[1].x;
    return c;
}

ScalarField assemble_limit_rhs(const StreamState& state, const AveragedCoeffs& c) {
    const TorusGrid& grid = state.I.grid();
    require_same_grid(grid, c.M.grid(), "assemble_limit_rhs");

    const Spectrum si(state.I);
    const Spectrum s1 = si.ddx();
    const Spectrum s2 = si.ddy();
    const ScalarField i1 = s1.to_field();
    const ScalarField i2 = s2.to_field();
    const ScalarField i11 = s1.ddx().to_field();
    const ScalarField i12 = s1.ddy().to_field();
    const ScalarField i22 = s2.ddy().to_field();

    const ScalarField& m1 = c.M.x;
    const ScalarField& m2 = c.M.y;
    const ScalarField& d1m1 = c.grad_M[0].x;
    const ScalarField& d2m1 = c.grad_M[0].y;
    const ScalarField& d1m2 = c.grad_M[1].x;
    const ScalarField& d2m2 = c.grad_M[1].y;

    // Flux-form terms collected as d_1 P + d_2 Q.
    ScalarField p(grid), qf(grid), local(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        p[k] = -(m1[k] * i11[k] + m2[k] * i12[k]) + (d1m2[k] * i2[k] - d2m2[k] * i1[k]);
        qf[k] = -(m1[k] * i12[k] + m2[k] * i22[k]) + (-d1m1[k] * i2[k] + d2m1[k] * i1[k]);
        // M.grad I - (grad H)_perp.grad I + (div M) I, with (grad H)_perp = (-d_2 H, d_1 H)
        local[k] = m1[k] * i1[k] + m2[k] * i2[k] + c.grad_H.y[k] * i1[k] - c.grad_H.x[k] * i2[k] +
                   (d1m1[k] + d2m2[k]) * state.I[k];
    }
    const ScalarField flux = Spectrum(p).ddx().to_field() + Spectrum(qf).ddy().to_field();

    ScalarField rhs = c.curl_W;
    rhs -= local;
    rhs -= flux;
    return dealias(rhs);
}

StreamState step(const StreamState& state, double dt, const CoeffProvider& coeffs, const LimitSource& source) {
    const double t = state.time;
    auto rate = [&](const ScalarField& q, double ts) {
        const StreamState s = StreamState::from_q(q, ts);
        ScalarField r = assemble_limit_rhs(s, coeffs(ts));
        if (source) r += source(q.grid(), ts);
        return r;
    };
    const ScalarField k1 = rate(state.q, t);
    const ScalarField k2 = rate(ScalarField(state.q).axpy(0.5 * dt, k1), t + 0.5 * dt);
    const ScalarField k3 = rate(ScalarField(state.q).axpy(0.5 * dt, k2), t + 0.5 * dt);
    const ScalarField k4 = rate(ScalarField(state.q).axpy(dt, k3), t + dt);

    ScalarField q = state.q;
    q.axpy(dt / 6.0, k1).axpy(dt / 3.0, k2).axpy(dt / 3.0, k3).axpy(dt / 6.0, k4);
    if (!q.all_finite()) throw SolverAbort("non-finite potential vorticity after RK4 step", t);
    StreamState out = StreamState::from_q(std::move(q), t + dt);
    const double defect = out.helmholtz_defect();
    if (!(defect <= kHelmholtzTolerance)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "Helmholtz consistency lost (defect %.3g)", defect);
        throw SolverAbort(buf, t);
    }
    return out;
}

VectorField reconstruct_N(const StreamState& state) {
    const Spectrum s(state.I);
    return VectorField(-1.0 * s.ddy().to_field(), s.ddx().to_field());
}

ConstraintResiduals constraint_residuals(const StreamState& state) {
    const VectorField n = reconstruct_N(state);
    const VectorField g = gradient(state.I);
    ConstraintResiduals r;
    r.divergence = l2_norm(divergence(n));
    // N_perp = (-N2, N1)
    r.balance = std::hypot(l2_norm(g.x - n.y), l2_norm(g.y + n.x));
    return r;
}

double limit_time_step(const AveragedCoeffs& c, double safety) {
    const TorusGrid& g = c.M.grid();
    const double h = std::min(g.hx(), g.hy());
    double max_m = 0.0;
    double max_g = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        max_m = std::max(max_m, std::hypot(c.M.x[k], c.M.y[k]));
        for (const auto* v : {&c.grad_M[0], &c.grad_M[1], &c.grad_H}) {
            max_g = std::max({max_g, std::abs(v->x[k]), std::abs(v->y[k])});
        }
    }
    return safety * h / (1.0 + max_m + h * max_g);
}

LimitDiagnostics diagnose_limit(const StreamState& state, double sobolev_index) {
    const VectorField n = reconstruct_N(state);
    const std::array<ScalarField, 3> u{state.I, n.x, n.y};
    const ConstraintResiduals r = constraint_residuals(state);
    LimitDiagnostics d;
    d.time = state.time;
    d.h4_norm = sobolev_norm(u, sobolev_index);
    d.l2_norm = sobolev_norm(u, 0.0);
    d.q_l2 = l2_norm(state.q);
    d.max_abs_I = state.I.max_abs();
    d.div_residual = r.divergence;
    d.balance_residual = r.balance;
    d.helmholtz_defect = state.helmholtz_defect();
    return d;
}

void LimitRunConfig::validate() const {
    if (!(end_time >= 0.0) || !std::isfinite(end_time)) throw DomainError("limit run: end time must be >= 0");
    if (!(safety > 0.0 && safety <= 1.0)) throw DomainError("limit run: CFL safety must lie in (0, 1]");
    if (outputs < 1) throw DomainError("limit run: outputs must be >= 1");
    if (snapshot_every < 1) throw DomainError("limit run: snapshot_every must be >= 1");
    if (fixed_dt && !(*fixed_dt > 0.0)) throw DomainError("limit run: fixed dt must be positive");
    if (initial) require_same_grid(grid, initial->I.grid(), "limit run initial data");
}

LimitRunResult run_limit(const LimitRunConfig& config) {
    config.validate();
    const AveragedFields fields(config.scenario, config.grid);
    const CoeffProvider coeffs = [&fields](double t) { return fields.at(t); };

    StreamState state = config.initial ? StreamState::from_q(dealias(config.initial->q), 0.0)
                                       : StreamState::from_q(ScalarField(config.grid), 0.0);

    LimitRunResult result;
    int output_index = 0;
    auto record = [&](const StreamState& s) {
        const VectorField n = reconstruct_N(s);
        result.trajectory.push_back(Snapshot{s.time, {s.I, n.x, n.y}});
        result.diagnostics.push_back(diagnose_limit(s, config.sobolev_index));
        if (config.snapshot_dir && output_index % config.snapshot_every == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "limit_%05d.tsf", output_index);
            tsf::write(*config.snapshot_dir / name, result.trajectory.back());
        }
        ++output_index;
    };

    record(state);
    if (config.end_time > 0.0) {
        const double interval = config.end_time / config.outputs;
        try {
            for (int out = 1; out <= config.outputs; ++out) {
                const double target = out == config.outputs ? config.end_time : out * interval;
                const double span = target - state.time;
                const double dt_max = config.fixed_dt ? *config.fixed_dt : limit_time_step(coeffs(state.time), config.safety);
                const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt_max - 1e-12)));
                const double dt = span / static_cast<double>(steps);
                const double start = state.time;
                for (long s = 0; s < steps; ++s) {
                    state = step(state, dt, coeffs, config.source);
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
    }
    result.final_state = state;
    return result;
}

}  // namespace coastal
