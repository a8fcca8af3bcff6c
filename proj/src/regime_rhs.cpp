#include "coastal/errors.hpp"
#include "coastal/full_solver.hpp"

#include <algorithm>
#include <cmath>

namespace coastal {

namespace {

double max_abs(const ScalarField& a, const ScalarField& b) { return std::max(a.max_abs(), b.max_abs()); }

// Anisotropic Laplacian d_11 + r^2 d_22, spectrally.
ScalarField laplacian_a(const ScalarField& f, double r) {
    return Spectrum(f).apply([r](double kx, double ky) { return -(kx * kx + r * r * ky * ky); }).to_field();
}

struct GradA {
    ScalarField x;
    ScalarField y;
};

GradA grad_a(const ScalarField& f, double r) {
    const Spectrum s(f);
    GradA g{s.ddx().to_field(), s.ddy().to_field()};
    g.y *= r;
    return g;
}

}  // namespace

RegimeWeights RegimeWeights::from_table(const CoefficientTable& table) {
    auto v = [&](const char* id) { return table.get(id).value; };
    RegimeWeights w;
    w.a_flux = v("cont_depth_flux");
    w.e_ratio = v("mean_depth_ratio");
    w.a_tide = v("tide_transport");
    w.a_pert = v("pert_transport");
    w.anisotropy = v("anisotropy");
    w.coriolis = v("coriolis");
    w.pressure = v("pressure");
    w.viscosity = v("viscosity");
    w.tide_pert_ratio = v("tide_pert_ratio");
    w.depth_ratio = v("depth_ratio");
    w.depth_pert_ratio = v("depth_pert_ratio");
    w.bottom_friction = v("bottom_friction");
    w.bottom_friction_depth = v("bottom_friction_depth");
    w.wind_friction = v("wind_friction");
    w.wind_friction_depth = v("wind_friction_depth");
    w.wind_pert_ratio = v("gamma") / gamma_per_wind_ratio(table.regime.kind) * w.tide_pert_ratio;
    w.forcing = v("forcing");
    return w;
}

RegimeWeights RegimeWeights::simplified(double eps) {
    RegimeWeights w;
    w.a_flux = 1.0;
    w.e_ratio = 1.0 / eps;
    w.a_tide = 1.0;
    w.a_pert = eps;
    w.anisotropy = 1.0;
    w.coriolis = 1.0 / eps;
    w.pressure = 1.0 / eps;
    w.forcing = 1.0;
    return w;
}

const RegimeTerm& RegimeRhs::term(std::string_view id) const {
    for (const auto& t : terms) {
        if (t.id == id) return t;
    }
    throw DomainError("no regime term '" + std::string(id) + "'");
}

RegimeRhs regime_rhs(const RegimeWeights& w, const State& state, double t, double eps, const GridFields& fields,
                     const VectorField* forcing) {
    const TorusGrid& grid = state.grid();
    require_same_grid(grid, fields.grid(), "regime_rhs");
    if (forcing) require_same_grid(grid, forcing->grid(), "regime_rhs forcing");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("regime_rhs: eps must lie in (0, 1)");

    const double r = w.anisotropy;
    const std::size_t size = grid.size();
    const auto f = fields.sample(t, t / eps);
    const auto& mv = f.tide_velocity.value;
    const auto& mg = f.tide_velocity.gradient;
    const ScalarField& h = f.tide_depth.value[0];
    const VectorField& hg = f.tide_depth.gradient[0];
    const auto& wv = f.wind.value;
    const ScalarField& e = fields.mean_depth();
    const VectorField& eg = fields.mean_depth_gradient();

    const ScalarField& iota = state.iota;
    const ScalarField& n1 = state.n.x;
    const ScalarField& n2 = state.n.y;
    const GradA gi = grad_a(iota, r);
    const GradA g1 = grad_a(n1, r);
    const GradA g2 = grad_a(n2, r);

    // D = E + h_e H + i_e iota
    ScalarField depth = e;
    depth.axpy(w.depth_ratio, h);
    depth.axpy(w.depth_pert_ratio, iota);
    for (double v : depth.values()) {
        if (!(v > 0.0)) throw DomainError("regime_rhs: depth denominator E + (H/E) H + (I/E) iota vanishes");
    }

    RegimeRhs out{State(grid, state.time), {}};
    auto add_term = [&](const char* id, double weight, double raw) {
        out.terms.push_back(RegimeTerm{id, weight, raw, std::abs(weight) * raw});
    };

    // Continuity.
    ScalarField flux(grid), tide_i(grid), pert_i(grid);
    for (std::size_t k = 0; k < size; ++k) {
        const double total = w.e_ratio * e[k] + h[k];
        const double tx = w.e_ratio * eg.x[k] + hg.x[k];
        const double ty = r * (w.e_ratio * eg.y[k] + hg.y[k]);
        const double div_n = g1.x[k] + g2.y[k];
        const double div_m = mg[0].x[k] + r * mg[1].y[k];
        flux[k] = tx * n1[k] + ty * n2[k] + total * div_n;
        tide_i[k] = gi.x[k] * mv[0][k] + gi.y[k] * mv[1][k] + iota[k] * div_m;
        pert_i[k] = gi.x[k] * n1[k] + gi.y[k] * n2[k] + iota[k] * div_n;
        out.rhs.iota[k] = -(w.a_flux * flux[k] + w.a_tide * tide_i[k] + w.a_pert * pert_i[k]);
    }
    add_term("depth_flux", w.a_flux, flux.max_abs());
    add_term("tide_advection_iota", w.a_tide, tide_i.max_abs());
    add_term("pert_advection_iota", w.a_pert, pert_i.max_abs());

    // Momentum.
    const double m = w.tide_pert_ratio;
    VectorField tide_n(grid), pert_n(grid), visc(grid), bottom(grid), wind(grid);
    const ScalarField lap_m1 = laplacian_a(mv[0], r);
    const ScalarField lap_m2 = laplacian_a(mv[1], r);
    const ScalarField lap_n1 = laplacian_a(n1, r);
    const ScalarField lap_n2 = laplacian_a(n2, r);
    for (std::size_t k = 0; k < size; ++k) {
        const double m1 = mv[0][k], m2 = mv[1][k];
        // rows of J_a n and J_a M
        const double jn11 = g1.x[k], jn12 = g1.y[k], jn21 = g2.x[k], jn22 = g2.y[k];
        const double jm11 = mg[0].x[k], jm12 = r * mg[0].y[k], jm21 = mg[1].x[k], jm22 = r * mg[1].y[k];

        tide_n.x[k] = jn11 * m1 + jn12 * m2 + jm11 * n1[k] + jm12 * n2[k];
        tide_n.y[k] = jn21 * m1 + jn22 * m2 + jm21 * n1[k] + jm22 * n2[k];
        pert_n.x[k] = jn11 * n1[k] + jn12 * n2[k];
        pert_n.y[k] = jn21 * n1[k] + jn22 * n2[k];

        const double dx = eg.x[k] + w.depth_ratio * hg.x[k] + w.depth_pert_ratio * gi.x[k];
        const double dy = r * (eg.y[k] + w.depth_ratio * hg.y[k]) + w.depth_pert_ratio * gi.y[k];
        const double inv_d = 1.0 / depth[k];
        visc.x[k] = m * lap_m1[k] + lap_n1[k] + ((m * jm11 + jn11) * dx + (m * jm12 + jn12) * dy) * inv_d;
        visc.y[k] = m * lap_m2[k] + lap_n2[k] + ((m * jm21 + jn21) * dx + (m * jm22 + jn22) * dy) * inv_d;

        const double bq = inv_d / (1.0 + w.bottom_friction_depth * depth[k]);
        bottom.x[k] = bq * (m * m1 + n1[k]);
        bottom.y[k] = bq * (m * m2 + n2[k]);
        const double wq = inv_d / (1.0 + w.wind_friction_depth * depth[k]);
        wind.x[k] = wq * (w.wind_pert_ratio * wv[0][k] - m * m1 - n1[k]);
        wind.y[k] = wq * (w.wind_pert_ratio * wv[1][k] - m * m2 - n2[k]);

        const double f1 = forcing ? forcing->x[k] : 0.0;
        const double f2 = forcing ? forcing->y[k] : 0.0;
        out.rhs.n.x[k] = -(w.a_tide * tide_n.x[k] + w.a_pert * pert_n.x[k] - w.coriolis * n2[k] + w.pressure * gi.x[k]) +
                         w.viscosity * visc.x[k] - w.bottom_friction * bottom.x[k] + w.wind_friction * wind.x[k] +
                         w.forcing * f1;
        out.rhs.n.y[k] = -(w.a_tide * tide_n.y[k] + w.a_pert * pert_n.y[k] + w.coriolis * n1[k] + w.pressure * gi.y[k]) +
                         w.viscosity * visc.y[k] - w.bottom_friction * bottom.y[k] + w.wind_friction * wind.y[k] +
                         w.forcing * f2;
    }
    add_term("tide_advection_n", w.a_tide, max_abs(tide_n.x, tide_n.y));
    add_term("pert_advection_n", w.a_pert, max_abs(pert_n.x, pert_n.y));
    add_term("coriolis", w.coriolis, max_abs(n1, n2));
    add_term("pressure", w.pressure, max_abs(gi.x, gi.y));
    add_term("viscosity", w.viscosity, max_abs(visc.x, visc.y));
    add_term("bottom_friction", w.bottom_friction, max_abs(bottom.x, bottom.y));
    add_term("wind_friction", w.wind_friction, max_abs(wind.x, wind.y));
    add_term("forcing", w.forcing, forcing ? max_abs(forcing->x, forcing->y) : 0.0);

    out.rhs.iota = dealias(out.rhs.iota);
    out.rhs.n.x = dealias(out.rhs.n.x);
    out.rhs.n.y = dealias(out.rhs.n.y);
    return out;
}

RegimeRhs regime_rhs(Regime regime, const State& state, double t, double eps, const GridFields& fields,
                     const DimensionlessGroups& groups) {
    if (!(groups.regime == regime)) throw DomainError("regime_rhs: groups were derived for a different regime");
    return regime_rhs(RegimeWeights::from_table(regime_coefficients(groups)), state, t, eps, fields);
}

}  // namespace coastal
