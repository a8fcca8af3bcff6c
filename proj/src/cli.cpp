#include "coastal/cli.hpp"

#include "coastal/errors.hpp"
#include "coastal/experiment.hpp"
#include "coastal/full_solver.hpp"
#include "coastal/limit_solver.hpp"
#include "coastal/scales.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace coastal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- unit-aware overrides

enum class Dim { Time, Rate, Length, Velocity, Acceleration, Diffusivity };

struct UnitDef {
    Dim dim;
    double si;  // SI value of one unit
};

constexpr double kDay = 86400.0;

const std::map<std::string, UnitDef>& unit_table() {
    static const std::map<std::string, UnitDef> t{
        {"s", {Dim::Time, 1.0}},
        {"min", {Dim::Time, 60.0}},
        {"h", {Dim::Time, 3600.0}},
        {"day", {Dim::Time, kDay}},
        {"1/s", {Dim::Rate, 1.0}},
        {"1/h", {Dim::Rate, 1.0 / 3600.0}},
        {"1/day", {Dim::Rate, 1.0 / kDay}},
        {"m", {Dim::Length, 1.0}},
        {"km", {Dim::Length, 1000.0}},
        {"m/s", {Dim::Velocity, 1.0}},
        {"km/h", {Dim::Velocity, 1000.0 / 3600.0}},
        {"km/day", {Dim::Velocity, 1000.0 / kDay}},
        {"m/s^2", {Dim::Acceleration, 1.0}},
        {"km/day^2", {Dim::Acceleration, 1000.0 / (kDay * kDay)}},
        {"m^2/s", {Dim::Diffusivity, 1.0}},
        {"km^2/day", {Dim::Diffusivity, 1.0e6 / kDay}},
    };
    return t;
}

struct ScaleSlot {
    double PhysicalScales::*member = nullptr;
    std::optional<double> PhysicalScales::*optional_member = nullptr;
    const char* unit;  // native unit of the field
};

const std::map<std::string, ScaleSlot>& scale_slots() {
    static const std::map<std::string, ScaleSlot> t{
        {"t_obs", {&PhysicalScales::t_obs, nullptr, "h"}},
        {"omega_tide", {&PhysicalScales::omega_tide, nullptr, "1/h"}},
        {"L_long", {&PhysicalScales::L_long, nullptr, "km"}},
        {"l_lat", {&PhysicalScales::l_lat, nullptr, "km"}},
        {"M_tide", {&PhysicalScales::M_tide, nullptr, "km/day"}},
        {"N_pert", {&PhysicalScales::N_pert, nullptr, "km/day"}},
        {"E_depth", {&PhysicalScales::E_depth, nullptr, "m"}},
        {"H_range", {&PhysicalScales::H_range, nullptr, "m"}},
        {"I_pert", {&PhysicalScales::I_pert, nullptr, "m"}},
        {"W_wind", {&PhysicalScales::W_wind, nullptr, "km/h"}},
        {"F_scale", {nullptr, &PhysicalScales::F_scale, "km/day^2"}},
        {"f_coriolis", {&PhysicalScales::f_coriolis, nullptr, "1/s"}},
        {"g_gravity", {&PhysicalScales::g_gravity, nullptr, "km/day^2"}},
        {"c_viscosity", {&PhysicalScales::c_viscosity, nullptr, "km^2/day"}},
        {"kappa_bottom", {&PhysicalScales::kappa_bottom, nullptr, "km/day"}},
        {"mu_air", {&PhysicalScales::mu_air, nullptr, "km/day"}},
    };
    return t;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

// ---- output helpers

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot write " + path.string());
    f << text;
    if (!f) throw DomainError("write failed for " + path.string());
}

template <class Writer>
void write_with(const fs::path& path, Writer&& writer) {
    std::ostringstream s;
    writer(s);
    write_file(path, s.str());
}

fs::path make_run_dir(const fs::path& base, const std::string& name) {
    const fs::path dir = base / name;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DomainError("cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

// ---- shared options

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::string regime = "shelf";
    std::string weather = "calm";
    std::optional<double> eps;
    std::string init_variant;
    std::vector<std::string> overrides;
    bool manufactured = false;
};

ExperimentConfig load_config(const CommonOptions& o) {
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_experiment_config(o.config_path);
    if (!o.out_dir.empty()) c.output_dir = o.out_dir;
    return c;
}

Regime regime_of(const CommonOptions& o) { return Regime{parse_regime_kind(o.regime), parse_weather(o.weather)}; }

double single_eps(const CommonOptions& o, const ExperimentConfig& c) {
    if (o.eps) {
        if (!(*o.eps > 0.0 && *o.eps < 1.0)) throw DomainError("--eps must lie in (0, 1)");
        return *o.eps;
    }
    if (c.eps.size() != 1) throw DomainError("run-full needs a single eps: pass --eps or give a one-entry eps list");
    return c.eps.front();
}

InitVariant limit_variant(const CommonOptions& o, const ExperimentConfig& c) {
    if (!o.init_variant.empty()) return parse_init_variant(o.init_variant);
    return c.init_variant == InitChoice::Printed ? InitVariant::Printed : InitVariant::CurlConsistent;
}

// ---- subcommands

int cmd_scales(const CommonOptions& o, std::ostream& out) {
    const Regime regime = regime_of(o);
    PhysicalScales scales = preset(regime);
    for (const auto& a : o.overrides) apply_scale_override(scales, a);
    const DimensionlessGroups groups = derive_groups(scales, regime);
    const CoefficientTable table = regime_coefficients(groups);

    write_groups_table(out, groups);
    out << '\n';
    write_coefficients_table(out, table);

    if (!o.out_dir.empty()) {
        const std::string stem =
            "scales-" + std::string(to_string(regime.kind)) + "-" + std::string(to_string(regime.weather));
        const fs::path dir = make_run_dir(o.out_dir, stem);
        write_with(dir / "groups.csv", [&](std::ostream& s) { write_groups_csv(s, groups); });
        write_with(dir / "coefficients.csv", [&](std::ostream& s) { write_coefficients_csv(s, table); });
        out << "\nwrote " << (dir / "groups.csv").string() << " and coefficients.csv\n";
    }
    return kExitOk;
}

int cmd_run_full(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    ExperimentConfig c = load_config(o);
    const double eps = single_eps(o, c);
    c.eps = {eps};
    c.validate();

    const fs::path dir = make_run_dir(c.output_dir, run_directory_name("full", c, "run-full"));
    write_file(dir / "config.json", experiment_config_to_json(c));

    FullRunConfig fc = make_full_run(c, eps);
    fc.keep_trajectory = false;
    if (c.snapshot_every > 0) fc.snapshot_dir = dir;
    const FullRunResult r = run(fc);

    write_with(dir / "diagnostics.csv", [&](std::ostream& s) { write_full_diagnostics_csv(s, r); });

    double h4_sup = 0.0, l2_sup = 0.0, max_u = 0.0, min_d = INFINITY;
    for (const auto& d : r.diagnostics) {
        h4_sup = std::max(h4_sup, d.h4_norm);
        l2_sup = std::max(l2_sup, d.l2_norm);
        max_u = std::max(max_u, d.max_abs_u);
        min_d = std::min(min_d, d.min_depth_factor);
    }
    const double h4_0 = r.diagnostics.empty() ? 0.0 : r.diagnostics.front().h4_norm;
    json summary{{"eps", eps},
                 {"end_time", c.end_time},
                 {"outputs_recorded", r.diagnostics.size()},
                 {"steps", r.steps},
                 {"status", r.aborted ? "aborted" : "done"},
                 {"partial", r.aborted},
                 {"h4_initial", h4_0},
                 {"h4_sup", h4_sup},
                 {"sup_ratio", h4_0 > 0.0 ? h4_sup / h4_0 : 0.0},
                 {"l2_sup", l2_sup},
                 {"max_abs_u", max_u},
                 {"min_depth_factor", r.diagnostics.empty() ? 0.0 : min_d}};
    if (r.aborted) {
        summary["abort_reason"] = r.abort_reason;
        summary["abort_time"] = r.abort_time;
    }
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    out << "run-full eps=" << fmt("%.6g", eps) << " steps=" << r.steps << " sup|u|_H" << fmt("%g", c.sobolev_index)
        << "/|u0| = " << fmt("%.6g", h4_0 > 0.0 ? h4_sup / h4_0 : 0.0) << '\n';
    out << "output: " << dir.string() << '\n';
    if (r.aborted) {
        err << "solver aborted at t = " << fmt("%.6g", r.abort_time) << ": " << r.abort_reason << '\n';
        return kExitAbort;
    }
    return kExitOk;
}

int cmd_manufactured(const CommonOptions& o, std::ostream& out) {
    const ExperimentConfig c = load_config(o);
    const fs::path dir = make_run_dir(c.output_dir, "limit-manufactured");

    struct Row {
        std::string kind;
        ManufacturedRow row;
        double order = NAN;
    };
    std::vector<Row> rows;

    // Spatial: a smooth solution that is not band limited, fine fixed step.
    const ManufacturedCase smooth{false, 1.0};
    for (int n : {16, 32, 64}) rows.push_back({"spatial", manufactured_error(smooth, n, 0.005, 0.5), NAN});
    // Temporal: band-limited solution so the spatial error vanishes.
    const ManufacturedCase band{true, 1.0};
    for (double dt : {0.2, 0.1, 0.05, 0.025}) rows.push_back({"temporal", manufactured_error(band, 16, dt, 1.0), NAN});
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k].kind != rows[k - 1].kind) continue;
        const double ratio = rows[k - 1].row.max_error / rows[k].row.max_error;
        const double step_ratio = rows[k].kind == "spatial"
                                      ? static_cast<double>(rows[k].row.n) / rows[k - 1].row.n
                                      : rows[k - 1].row.dt / rows[k].row.dt;
        rows[k].order = std::log(ratio) / std::log(step_ratio);
    }

    std::ostringstream csv;
    csv << "study,n,dt,steps,max_error,observed_order\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-9s %5s %10s %7s %12s %8s\n", "study", "n", "dt", "steps", "max_error", "order");
    out << line;
    for (const auto& r : rows) {
        csv << r.kind << ',' << r.row.n << ',' << fmt("%.17g", r.row.dt) << ',' << r.row.steps << ','
            << fmt("%.17g", r.row.max_error) << ',' << (std::isnan(r.order) ? std::string() : fmt("%.17g", r.order))
            << '\n';
        std::snprintf(line, sizeof line, "%-9s %5d %10.4g %7ld %12.4e %8s\n", r.kind.c_str(), r.row.n, r.row.dt,
                      r.row.steps, r.row.max_error, std::isnan(r.order) ? "-" : fmt("%.3f", r.order).c_str());
        out << line;
    }
    write_file(dir / "manufactured.csv", csv.str());
    out << "output: " << dir.string() << '\n';
    return kExitOk;
}

int cmd_run_limit(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    if (o.manufactured) return cmd_manufactured(o, out);
    ExperimentConfig c = load_config(o);
    const InitVariant variant = limit_variant(o, c);
    c.init_variant = variant == InitVariant::Printed ? InitChoice::Printed : InitChoice::Curl;
    c.validate();

    const fs::path dir = make_run_dir(c.output_dir, run_directory_name("limit", c, "run-limit"));
    write_file(dir / "config.json", experiment_config_to_json(c));

    LimitRunConfig lc = make_limit_run(c, variant);
    if (c.snapshot_every > 0) lc.snapshot_dir = dir;
    const LimitRunResult r = run_limit(lc);
    write_with(dir / "diagnostics.csv", [&](std::ostream& s) { write_limit_diagnostics_csv(s, r); });

    double h4_sup = 0.0, div_max = 0.0, bal_max = 0.0, defect_max = 0.0;
    for (const auto& d : r.diagnostics) {
        h4_sup = std::max(h4_sup, d.h4_norm);
        div_max = std::max(div_max, d.div_residual);
        bal_max = std::max(bal_max, d.balance_residual);
        defect_max = std::max(defect_max, d.helmholtz_defect);
    }
    const double h4_0 = r.diagnostics.front().h4_norm;
    json summary{{"init_variant", std::string(to_string(variant))},
                 {"end_time", c.end_time},
                 {"outputs_recorded", r.diagnostics.size()},
                 {"steps", r.steps},
                 {"status", r.aborted ? "aborted" : "done"},
                 {"partial", r.aborted},
                 {"h4_initial", h4_0},
                 {"h4_sup", h4_sup},
                 {"max_div_residual", div_max},
                 {"max_balance_residual", bal_max},
                 {"max_helmholtz_defect", defect_max}};
    if (r.aborted) {
        summary["abort_reason"] = r.abort_reason;
        summary["abort_time"] = r.abort_time;
    }
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    out << "run-limit variant=" << to_string(variant) << " steps=" << r.steps
        << " max residuals: div " << fmt("%.3g", div_max) << ", balance " << fmt("%.3g", bal_max) << '\n';
    out << "output: " << dir.string() << '\n';
    if (r.aborted) {
        err << "solver aborted at t = " << fmt("%.6g", r.abort_time) << ": " << r.abort_reason << '\n';
        return kExitAbort;
    }
    return kExitOk;
}

int cmd_compare(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    ExperimentConfig c = load_config(o);
    if (!o.init_variant.empty()) {
        c.init_variant = parse_init_variant(o.init_variant) == InitVariant::Printed ? InitChoice::Printed
                                                                                    : InitChoice::Curl;
    }
    c.validate();
    const fs::path dir = make_run_dir(c.output_dir, run_directory_name("compare", c, "compare"));
    write_file(dir / "config.json", experiment_config_to_json(c));

    const ConvergenceReport report = run_compare(c);
    write_with(dir / "report.json", [&](std::ostream& s) { write_report_json(s, report); });
    write_with(dir / "pairings.csv", [&](std::ostream& s) { write_pairings_csv(s, report); });
    write_with(dir / "norms.csv", [&](std::ostream& s) { write_norms_csv(s, report); });

    for (const auto& v : report.variants) {
        out << "init variant " << to_string(v.variant) << (&v == &report.best() ? " (best)" : "") << '\n';
        out << "eps       ";
        for (const auto& name : report.test_functions) out << ' ' << pad_left(name, 16);
        out << '\n';
        for (std::size_t e = 0; e < report.runs.size(); ++e) {
            out << fmt("%-10.5g", report.runs[e].eps);
            for (std::size_t t = 0; t < report.test_functions.size(); ++t) {
                const double x = v.rel_errors[e][t];
                out << ' ' << (std::isfinite(x) ? fmt("%16.4e", x) : pad_left("missing", 16));
            }
            out << '\n';
        }
        out << "monotone  ";
        for (bool m : v.monotone) out << ' ' << pad_left(m ? "yes" : "no", 16);
        out << "\n\n";
    }
    out << "sup-norm ratios:";
    for (const auto& r : report.runs) out << ' ' << (r.done ? fmt("%.4f", r.sup_ratio) : std::string("missing"));
    out << "  spread " << fmt("%.4f", report.sup_ratio_spread) << '\n';
    out << "output: " << dir.string() << '\n';

    if (!report.complete()) {
        for (const auto& r : report.runs) {
            if (!r.done) err << "eps " << fmt("%.6g", r.eps) << " failed: " << r.failure << '\n';
        }
        return kExitPartial;
    }
    return kExitOk;
}

int cmd_residual(const CommonOptions& o, std::ostream& out) {
    const Regime regime = regime_of(o);
    PhysicalScales scales = preset(regime);
    for (const auto& a : o.overrides) apply_scale_override(scales, a);
    const DimensionlessGroups groups = derive_groups(scales, regime);
    const ExperimentConfig c = load_config(o);
    const double eps = o.eps ? *o.eps : groups.eps;
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("--eps must lie in (0, 1)");

    const GridFields fields(c.scenario, c.grid);
    const State state = make_initial_state(c.initial, c.grid);
    const RegimeRhs rhs = regime_rhs(regime, state, 0.0, eps, fields, groups);

    std::ostringstream csv;
    csv << "term,weight,raw_max,max_abs\n";
    char line[160];
    std::snprintf(line, sizeof line, "regime: %s (%s), eps = %.6g, grid %dx%d\n\n",
                  std::string(to_string(regime.kind)).c_str(), std::string(to_string(regime.weather)).c_str(), eps,
                  c.grid.nx(), c.grid.ny());
    out << line;
    std::snprintf(line, sizeof line, "%-22s %12s %12s %12s\n", "term", "weight", "raw_max", "max_abs");
    out << line;
    for (const auto& t : rhs.terms) {
        csv << t.id << ',' << fmt("%.17g", t.weight) << ',' << fmt("%.17g", t.raw_max) << ','
            << fmt("%.17g", t.max_abs) << '\n';
        std::snprintf(line, sizeof line, "%-22s %12.4e %12.4e %12.4e\n", t.id.c_str(), t.weight, t.raw_max,
                      t.max_abs);
        out << line;
    }
    if (!o.out_dir.empty()) {
        const std::string stem =
            "residual-" + std::string(to_string(regime.kind)) + "-" + std::string(to_string(regime.weather));
        const fs::path dir = make_run_dir(o.out_dir, stem);
        write_file(dir / "residual.csv", csv.str());
        out << "\nwrote " << (dir / "residual.csv").string() << '\n';
    }
    return kExitOk;
}

}  // namespace

void apply_scale_override(PhysicalScales& scales, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw DomainError("override '" + assignment + "': expected name=value[unit]");
    const std::string name = trim(assignment.substr(0, eq));
    const std::string rhs = trim(assignment.substr(eq + 1));

    const auto slot = scale_slots().find(name);
    if (slot == scale_slots().end()) throw DomainError("override: unknown scale '" + name + "'");

    const char* begin = rhs.c_str();
    char* end = nullptr;
    const double number = std::strtod(begin, &end);
    if (end == begin || !std::isfinite(number)) throw DomainError("override '" + name + "': malformed number '" + rhs + "'");
    std::string unit = trim(std::string(end));
    if (!unit.empty() && unit.front() == '/') unit = "1" + unit;

    const UnitDef native = unit_table().at(slot->second.unit);
    double value = number;
    if (!unit.empty()) {
        const auto u = unit_table().find(unit);
        if (u == unit_table().end()) throw DomainError("override '" + name + "': unknown unit '" + unit + "'");
        if (u->second.dim != native.dim) {
            throw DomainError("override '" + name + "': unit '" + unit + "' has the wrong dimension (native unit " +
                              slot->second.unit + ")");
        }
        value = number * u->second.si / native.si;
    }
    if (slot->second.member) {
        scales.*(slot->second.member) = value;
    } else {
        scales.*(slot->second.optional_member) = value;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coastal perturbation toolkit: scale analysis, full and limit solvers, convergence sweeps", "coastal"};
    app.require_subcommand(1);
    CommonOptions o;

    auto* scales = app.add_subcommand("scales", "Dimensionless groups and regime coefficients");
    auto* full = app.add_subcommand("run-full", "Integrate the eps-dependent system at one eps");
    auto* limit = app.add_subcommand("run-limit", "Integrate the limit system");
    auto* compare = app.add_subcommand("compare", "Full vs limit pairings along an eps sweep");
    auto* residual = app.add_subcommand("residual", "Per-term magnitudes of a regime right-hand side");

    for (auto* sub : {scales, residual}) {
        sub->add_option("--regime", o.regime, "shelf, zone or layer")->capture_default_str();
        sub->add_option("--weather", o.weather, "calm or storm")->capture_default_str();
        sub->add_option("--set", o.overrides, "Override a reference value, e.g. t_obs=2day");
    }
    for (auto* sub : {full, limit, compare, residual}) sub->add_option("--config", o.config_path, "JSON config");
    for (auto* sub : {scales, full, limit, compare, residual}) sub->add_option("--out", o.out_dir, "Output directory");
    for (auto* sub : {full, residual}) sub->add_option("--eps", o.eps, "Small parameter");
    for (auto* sub : {limit, compare}) {
        sub->add_option("--init-variant", o.init_variant, "printed or curl")
            ->check(CLI::IsMember({"printed", "curl", "curl_consistent"}));
    }
    limit->add_flag("--manufactured", o.manufactured, "Manufactured-solution error study");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (scales->parsed()) return cmd_scales(o, out);
        if (full->parsed()) return cmd_run_full(o, out, err);
        if (limit->parsed()) return cmd_run_limit(o, out, err);
        if (compare->parsed()) return cmd_compare(o, out, err);
        if (residual->parsed()) return cmd_residual(o, out);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SolverAbort& e) {
        err << "solver aborted at t = " << fmt("%.6g", e.time()) << ": " << e.what() << '\n';
        return kExitAbort;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitAbort;
    }
    return kExitConfig;
}

}  // namespace coastal
