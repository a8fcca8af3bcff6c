#include "coastal/experiment.hpp"

#include "coastal/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <set>

namespace coastal {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double bump_phase(double x, double c, double period) { return kTwoPi * (x - c) / period; }

struct BumpEval {
    double value, dx, dy;
};

BumpEval eval_bump(const BumpSpec& b, const TorusGrid& g, double x, double y) {
    const double ax = bump_phase(x, b.cx, g.lx());
    const double ay = bump_phase(y, b.cy, g.ly());
    const double v = b.amplitude * std::exp(b.kappa * (std::cos(ax) + std::cos(ay) - 2.0));
    return {v, -b.kappa * std::sin(ax) * (kTwoPi / g.lx()) * v, -b.kappa * std::sin(ay) * (kTwoPi / g.ly()) * v};
}

AmplitudeTerm trig(double kx, double ky, double c, double s) { return AmplitudeTerm{kx, ky, c, s, Envelope{}}; }

}  // namespace

// ---------------------------------------------------------------------------
// Initial data

State make_initial_state(const InitialDataSpec& spec, const TorusGrid& grid) {
    State s(grid);
    switch (spec.kind) {
        case InitialDataSpec::Kind::Zero:
            return s;
        case InitialDataSpec::Kind::Constant:
            s.iota = ScalarField(grid, spec.iota_value);
            s.n = VectorField(ScalarField(grid, spec.n_value[0]), ScalarField(grid, spec.n_value[1]));
            return s;
        case InitialDataSpec::Kind::Bumps:
            break;
    }
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            const double x = grid.x(i), y = grid.y(j);
            const BumpEval e = eval_bump(spec.iota, grid, x, y);
            const BumpEval psi = eval_bump(spec.stream, grid, x, y);
            const BumpEval chi = eval_bump(spec.potential, grid, x, y);
            s.iota.at(i, j) = e.value;
            s.n.x.at(i, j) = -psi.dy + chi.dx;
            s.n.y.at(i, j) = psi.dx + chi.dy;
        }
    }
    s.iota = dealias(s.iota);
    s.n.x = dealias(s.n.x);
    s.n.y = dealias(s.n.y);
    return s;
}

// ---------------------------------------------------------------------------
// Test functions

TestFunctionSpec test_function_from_phi(std::string name, const Amplitude& phi, bool envelope) {
    std::vector<AmplitudeTerm> minus_d2, d1;
    for (const auto& t : phi.terms()) {
        if (t.envelope.rate != 0.0 || t.envelope.poly != std::vector<double>{1.0}) {
            throw DomainError("test function '" + name + "': phi terms must not carry time envelopes");
        }
        // d/da (A cos a + B sin a) = B cos a - A sin a
        minus_d2.push_back(trig(t.kx, t.ky, -t.ky * t.sin_coeff, t.ky * t.cos_coeff));
        d1.push_back(trig(t.kx, t.ky, t.kx * t.sin_coeff, -t.kx * t.cos_coeff));
    }
    return TestFunctionSpec{std::move(name), {phi, Amplitude(minus_d2), Amplitude(d1)}, envelope};
}

void validate_test_function(const TestFunctionSpec& spec) {
    // Probe lattice fine enough to resolve every wavevector present.
    int kmax = 0;
    for (const auto& a : spec.psi) {
        for (const auto& t : a.terms()) {
            kmax = std::max({kmax, static_cast<int>(std::ceil(std::abs(t.kx))), static_cast<int>(std::ceil(std::abs(t.ky)))});
        }
    }
    const int n = std::max(16, 4 * (kmax + 1));
    const TorusGrid probe(n, n);
    double scale = 1.0;
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double x = probe.x(i), y = probe.y(j);
            const auto g = spec.psi[0].gradient(0.0, x, y);
            const double p1 = spec.psi[1].value(0.0, x, y);
            const double p2 = spec.psi[2].value(0.0, x, y);
            scale = std::max({scale, std::abs(g[0]), std::abs(g[1])});
            worst = std::max({worst, std::abs(p1 + g[1]), std::abs(p2 - g[0])});
        }
    }
    if (worst > 1e-12 * scale) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "test function '%s' violates the constraint Psi = (phi, -d phi/dx2, d phi/dx1) "
                      "(mismatch %.3g)",
                      spec.name.c_str(), worst);
        throw DomainError(buf);
    }
}

std::vector<TestFunctionSpec> default_test_functions() {
    return {
        test_function_from_phi("cos_x1", Amplitude({trig(1, 0, 1, 0)})),
        test_function_from_phi("sin_x2", Amplitude({trig(0, 1, 0, 1)})),
        test_function_from_phi("cos_x1_plus_x2", Amplitude({trig(1, 1, 1, 0)})),
        test_function_from_phi("sin_x1_minus_x2", Amplitude({trig(1, -1, 0, 1)})),
        test_function_from_phi("cos_2x1", Amplitude({trig(2, 0, 1, 0)})),
    };
}

TestFunctionSampler make_sampler(const TestFunctionSpec& spec, double end_time) {
    return [spec, end_time](const TorusGrid& grid, double t) {
        const double r = end_time > 0.0 ? t / end_time : 0.0;
        const double env = spec.envelope ? 1.0 - r * r : 1.0;
        std::vector<ScalarField> out;
        for (const auto& a : spec.psi) {
            ScalarField f = ScalarField::from_function(grid, [&](double x, double y) { return a.value(0.0, x, y); });
            f *= env;
            out.push_back(std::move(f));
        }
        return out;
    };
}

// ---------------------------------------------------------------------------
// Config invariants

void ExperimentConfig::validate() const {
    scenario.require_periodic_on(grid);
    if (eps.empty()) throw DomainError("config: eps list is empty");
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!(eps[k] > 0.0 && eps[k] < 1.0)) throw DomainError("config: every eps must lie in (0, 1)");
        if (k > 0 && !(eps[k] < eps[k - 1])) throw DomainError("config: eps list must be strictly decreasing");
    }
    // T = 0 is allowed for single runs; the sweep requires T > 0.
    if (!(end_time >= 0.0) || !std::isfinite(end_time)) throw DomainError("config: end_time must be >= 0");
    if (!(safety > 0.0 && safety <= 1.0)) throw DomainError("config: safety must lie in (0, 1]");
    if (outputs < 1 || samples_per_eps < 1 || limit_outputs < 1) {
        throw DomainError("config: outputs, samples_per_eps and limit_outputs must be >= 1");
    }
    if (snapshot_every < 0) throw DomainError("config: snapshot_every must be >= 0");
    if (workers < 1) throw DomainError("config: workers must be >= 1");
    if (!(sobolev_index >= 0.0)) throw DomainError("config: sobolev_index must be >= 0");
    if (test_functions.empty()) throw DomainError("config: at least one test function is required");
    std::set<std::string> names;
    for (const auto& tf : test_functions) {
        if (!names.insert(tf.name).second) throw DomainError("config: duplicate test function '" + tf.name + "'");
        for (const auto& a : tf.psi) a.require_periodic_on(grid);
        validate_test_function(tf);
    }
    for (const BumpSpec* b : {&initial.iota, &initial.stream, &initial.potential}) {
        if (!std::isfinite(b->amplitude) || !(b->kappa >= 0.0)) {
            throw DomainError("config: bump amplitude must be finite and kappa >= 0");
        }
    }
}

int ExperimentConfig::full_outputs(double eps_value) const {
    const double wanted = std::ceil(samples_per_eps * end_time / eps_value - 1e-9);
    return std::max(outputs, static_cast<int>(wanted));
}

// ---------------------------------------------------------------------------
// Single runs

FullRunConfig make_full_run(const ExperimentConfig& config, double eps) {
    FullRunConfig f;
    f.eps = eps;
    f.end_time = config.end_time;
    f.safety = config.safety;
    f.outputs = config.full_outputs(eps);
    f.grid = config.grid;
    f.scenario = config.scenario;
    f.initial = make_initial_state(config.initial, config.grid);
    f.snapshot_every = std::max(1, config.snapshot_every);
    f.sobolev_index = config.sobolev_index;
    return f;
}

LimitRunConfig make_limit_run(const ExperimentConfig& config, InitVariant variant) {
    LimitRunConfig l;
    l.end_time = config.end_time;
    l.safety = config.safety;
    l.outputs = config.limit_outputs;
    l.grid = config.grid;
    l.scenario = config.scenario;
    const State s = make_initial_state(config.initial, config.grid);
    l.initial = init_from_perturbation(s.iota, s.n, variant);
    l.snapshot_every = std::max(1, config.snapshot_every);
    l.sobolev_index = config.sobolev_index;
    return l;
}

void write_full_diagnostics_csv(std::ostream& out, const FullRunResult& result) {
    out << "time,h4_norm,l2_norm,min_depth_factor,max_abs_u,energy\n";
    for (const auto& d : result.diagnostics) {
        out << fmt17(d.time) << ',' << fmt17(d.h4_norm) << ',' << fmt17(d.l2_norm) << ','
            << fmt17(d.min_depth_factor) << ',' << fmt17(d.max_abs_u) << ',' << fmt17(d.energy) << '\n';
    }
}

void write_limit_diagnostics_csv(std::ostream& out, const LimitRunResult& result) {
    out << "time,h4_norm,l2_norm,q_l2,max_abs_I,div_residual,balance_residual,helmholtz_defect\n";
    for (const auto& d : result.diagnostics) {
        out << fmt17(d.time) << ',' << fmt17(d.h4_norm) << ',' << fmt17(d.l2_norm) << ',' << fmt17(d.q_l2) << ','
            << fmt17(d.max_abs_I) << ',' << fmt17(d.div_residual) << ',' << fmt17(d.balance_residual) << ','
            << fmt17(d.helmholtz_defect) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Comparison

bool ConvergenceReport::complete() const {
    return std::all_of(runs.begin(), runs.end(), [](const EpsRun& r) { return r.done; });
}

ConvergenceReport assemble_report(std::vector<std::string> names, std::vector<EpsRun> runs,
                                  std::vector<VariantReport> variants) {
    ConvergenceReport report;
    report.test_functions = std::move(names);
    report.runs = std::move(runs);
    const std::size_t nf = report.test_functions.size();

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& r : report.runs) {
        if (!r.done) continue;
        lo = any ? std::min(lo, r.h4_sup) : r.h4_sup;
        hi = any ? std::max(hi, r.h4_sup) : r.h4_sup;
        any = true;
    }
    report.sup_ratio_spread = any && lo > 0.0 ? hi / lo : 0.0;

    double best_score = 0.0;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        VariantReport& vr = variants[v];
        vr.rel_errors.assign(report.runs.size(), std::vector<double>(nf, std::nan("")));
        vr.monotone.assign(nf, true);
        for (std::size_t e = 0; e < report.runs.size(); ++e) {
            if (!report.runs[e].done) continue;
            for (std::size_t f = 0; f < nf; ++f) {
                const double p0 = vr.limit_pairings[f];
                const double diff = std::abs(report.runs[e].pairings[f] - p0);
                vr.rel_errors[e][f] = p0 != 0.0 ? diff / std::abs(p0) : diff;
            }
        }
        for (std::size_t f = 0; f < nf; ++f) {
            double prev = std::nan("");
            for (std::size_t e = 0; e < report.runs.size(); ++e) {
                const double cur = vr.rel_errors[e][f];
                if (std::isnan(cur)) continue;
                if (!std::isnan(prev) && cur > 1.1 * prev) vr.monotone[f] = false;
                prev = cur;
            }
        }
        // Smallest eps that completed.
        vr.final_max_error = std::nan("");
        for (std::size_t e = report.runs.size(); e-- > 0;) {
            if (!report.runs[e].done) continue;
            vr.final_max_error = *std::max_element(vr.rel_errors[e].begin(), vr.rel_errors[e].end());
            break;
        }
        const double score = std::isnan(vr.final_max_error) ? HUGE_VAL : vr.final_max_error;
        if (v == 0 || score < best_score) {
            best_score = score;
            report.best_variant = v;
        }
    }
    report.variants = std::move(variants);
    return report;
}

namespace {

// Trapezoidal pairing accumulated one output at a time.
class PairingAccumulator {
public:
    explicit PairingAccumulator(TestFunctionSampler psi) : psi_(std::move(psi)) {}

    void add(const State& s) {
        const auto test = psi_(s.grid(), s.time);
        const double value = grid_inner(s.iota, test[0]) + grid_inner(s.n.x, test[1]) + grid_inner(s.n.y, test[2]);
        if (has_prev_) total_ += 0.5 * (s.time - prev_time_) * (value + prev_value_);
        prev_time_ = s.time;
        prev_value_ = value;
        has_prev_ = true;
    }
    double total() const { return total_; }

private:
    TestFunctionSampler psi_;
    bool has_prev_ = false;
    double prev_time_ = 0.0;
    double prev_value_ = 0.0;
    double total_ = 0.0;
};

EpsRun run_member(const ExperimentConfig& config, double eps) {
    EpsRun out;
    out.eps = eps;
    std::vector<PairingAccumulator> acc;
    for (const auto& tf : config.test_functions) acc.emplace_back(make_sampler(tf, config.end_time));

    FullRunConfig fc = make_full_run(config, eps);
    fc.keep_trajectory = false;
    fc.on_output = [&acc](const State& s) {
        for (auto& a : acc) a.add(s);
    };
    const FullRunResult r = run(fc);
    out.steps = r.steps;
    if (r.aborted) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " (t = %.6g)", r.abort_time);
        out.failure = r.abort_reason + buf;
        return out;
    }
    out.done = true;
    for (const auto& a : acc) out.pairings.push_back(a.total());
    out.h4_initial = r.diagnostics.front().h4_norm;
    for (const auto& d : r.diagnostics) out.h4_sup = std::max(out.h4_sup, d.h4_norm);
    out.sup_ratio = out.h4_initial > 0.0 ? out.h4_sup / out.h4_initial : 0.0;
    return out;
}

}  // namespace

ConvergenceReport run_compare(const ExperimentConfig& config) {
    config.validate();
    if (config.eps.size() < 3) throw DomainError("compare: the eps list needs at least 3 entries");
    if (!(config.end_time > 0.0)) throw DomainError("compare: end_time must be > 0");

    std::vector<InitVariant> variants;
    if (config.init_variant != InitChoice::Curl) variants.push_back(InitVariant::Printed);
    if (config.init_variant != InitChoice::Printed) variants.push_back(InitVariant::CurlConsistent);
    // Self-comparison pairs one limit trajectory with itself.
    if (config.self_compare) variants.resize(1);

    std::vector<VariantReport> vreports;
    for (InitVariant v : variants) {
        const LimitRunResult lr = run_limit(make_limit_run(config, v));
        if (lr.aborted) throw SolverAbort("limit solver: " + lr.abort_reason, lr.abort_time);
        VariantReport vr;
        vr.variant = v;
        for (const auto& tf : config.test_functions) {
            vr.limit_pairings.push_back(pairing(lr.trajectory, make_sampler(tf, config.end_time)));
        }
        vreports.push_back(std::move(vr));
    }

    std::vector<EpsRun> runs(config.eps.size());
    if (config.self_compare) {
        for (std::size_t e = 0; e < config.eps.size(); ++e) {
            runs[e].eps = config.eps[e];
            runs[e].done = true;
            runs[e].pairings = vreports.front().limit_pairings;
        }
    } else {
        // Work pool: each worker pulls the next eps; every slot is written by
        // exactly one worker and joined before the report is assembled.
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t e = next++; e < config.eps.size(); e = next++) {
                try {
                    runs[e] = run_member(config, config.eps[e]);
                } catch (const std::exception& ex) {
                    runs[e].eps = config.eps[e];
                    runs[e].failure = ex.what();
                }
            }
        };
        const std::size_t nworkers = std::min<std::size_t>(config.workers, config.eps.size());
        std::vector<std::future<void>> pool;
        for (std::size_t w = 0; w < nworkers; ++w) pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
    }

    std::vector<std::string> names;
    for (const auto& tf : config.test_functions) names.push_back(tf.name);
    return assemble_report(std::move(names), std::move(runs), std::move(vreports));
}

void write_pairings_csv(std::ostream& out, const ConvergenceReport& report) {
    out << "variant,eps,test_function,p_eps,p_limit,rel_error\n";
    for (const auto& v : report.variants) {
        for (std::size_t e = 0; e < report.runs.size(); ++e) {
            const EpsRun& r = report.runs[e];
            for (std::size_t f = 0; f < report.test_functions.size(); ++f) {
                out << to_string(v.variant) << ',' << fmt17(r.eps) << ',' << report.test_functions[f] << ','
                    << (r.done ? fmt17(r.pairings[f]) : std::string()) << ',' << fmt17(v.limit_pairings[f]) << ','
                    << (r.done ? fmt17(v.rel_errors[e][f]) : std::string()) << '\n';
            }
        }
    }
}

void write_norms_csv(std::ostream& out, const ConvergenceReport& report) {
    out << "eps,status,steps,h4_initial,h4_sup,sup_ratio\n";
    for (const auto& r : report.runs) {
        out << fmt17(r.eps) << ',' << (r.done ? "done" : "failed") << ',' << r.steps << ',' << fmt17(r.h4_initial)
            << ',' << fmt17(r.h4_sup) << ',' << fmt17(r.sup_ratio) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Manufactured solutions

double ManufacturedCase::exact(double t, double x, double y) const {
    const double f = band_limited ? std::sin(x) : std::exp(alpha * std::sin(x));
    return std::exp(-t) * f * std::sin(y);
}

double ManufacturedCase::source(double t, double x, double y) const {
    // d_t q* + d_1 q*, q* = (1 - Lap) I*
    const double s = std::sin(x), c = std::cos(x);
    if (band_limited) return 3.0 * std::exp(-t) * (c - s) * std::sin(y);
    const double g = std::exp(alpha * s);
    const double a = alpha;
    const double g1 = a * c * g;
    const double g2 = (a * a * c * c - a * s) * g;
    const double g3 = (a * a * a * c * c * c - 3.0 * a * a * c * s - a * c) * g;
    return std::exp(-t) * std::sin(y) * (-(2.0 * g - g2) + (2.0 * g1 - g3));
}

Scenario ManufacturedCase::scenario() const {
    Scenario s = zero_scenario();
    s.tide_velocity = ThetaPeriodicField(2, {Harmonic{0, {Amplitude::constant(1.0), Amplitude()}, {}}});
    return s;
}

ManufacturedRow manufactured_error(const ManufacturedCase& mcase, int n, double dt, double end_time) {
    const TorusGrid grid(n, n);
    LimitRunConfig lc;
    lc.end_time = end_time;
    lc.outputs = 1;
    lc.grid = grid;
    lc.scenario = mcase.scenario();
    lc.fixed_dt = dt;
    lc.sobolev_index = 0.0;
    const ScalarField i0 = ScalarField::from_function(grid, [&](double x, double y) { return mcase.exact(0.0, x, y); });
    lc.initial = StreamState::from_q(helmholtz_apply(i0), 0.0);
    lc.source = [mcase](const TorusGrid& g, double t) {
        return ScalarField::from_function(g, [&](double x, double y) { return mcase.source(t, x, y); });
    };
    const LimitRunResult r = run_limit(lc);
    if (r.aborted) throw SolverAbort("manufactured run: " + r.abort_reason, r.abort_time);
    ManufacturedRow row;
    row.n = n;
    row.steps = r.steps;
    row.dt = end_time / static_cast<double>(std::max(1L, r.steps));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double e = std::abs(r.final_state.I.at(i, j) - mcase.exact(end_time, grid.x(i), grid.y(j)));
            row.max_error = std::max(row.max_error, e);
        }
    }
    return row;
}

}  // namespace coastal
