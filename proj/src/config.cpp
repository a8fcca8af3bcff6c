#include "coastal/errors.hpp"
#include "coastal/experiment.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

namespace coastal {

using nlohmann::json;

namespace {

constexpr const char* kScenarioSchema = "coastal-fields/1";

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw DomainError(where + ": expected a JSON object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw DomainError(where + ": unknown key '" + key + "'");
    }
}

double get_number(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw DomainError(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const char* key, int fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw DomainError(where + ": '" + key + "' must be an integer");
    return v.get<int>();
}

bool get_bool(const json& obj, const char* key, bool fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw DomainError(where + ": '" + key + "' must be true or false");
    return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw DomainError(where + ": '" + key + "' must be a string");
    return v.get<std::string>();
}

// ---- closed-form amplitude family

Envelope parse_envelope(const json& j, const std::string& where) {
    check_keys(j, {"poly", "rate"}, where);
    Envelope e;
    if (j.contains("poly")) {
        if (!j.at("poly").is_array() || j.at("poly").empty()) throw DomainError(where + ": 'poly' must be a non-empty array");
        e.poly.clear();
        for (const auto& c : j.at("poly")) {
            if (!c.is_number()) throw DomainError(where + ": 'poly' entries must be numbers");
            e.poly.push_back(c.get<double>());
        }
    }
    e.rate = get_number(j, "rate", 0.0, where);
    return e;
}

json envelope_to_json(const Envelope& e) { return json{{"poly", e.poly}, {"rate", e.rate}}; }

Amplitude parse_amplitude(const json& j, const std::string& where) {
    if (!j.is_array()) throw DomainError(where + ": expected an array of terms");
    std::vector<AmplitudeTerm> terms;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string w = where + "[" + std::to_string(k) + "]";
        const json& t = j[k];
        check_keys(t, {"kx", "ky", "cos", "sin", "envelope"}, w);
        AmplitudeTerm term;
        term.kx = get_number(t, "kx", 0.0, w);
        term.ky = get_number(t, "ky", 0.0, w);
        term.cos_coeff = get_number(t, "cos", 0.0, w);
        term.sin_coeff = get_number(t, "sin", 0.0, w);
        if (t.contains("envelope")) term.envelope = parse_envelope(t.at("envelope"), w + ".envelope");
        terms.push_back(term);
    }
    return Amplitude(std::move(terms));
}

json amplitude_to_json(const Amplitude& a) {
    json arr = json::array();
    for (const auto& t : a.terms()) {
        arr.push_back(json{{"kx", t.kx},
                           {"ky", t.ky},
                           {"cos", t.cos_coeff},
                           {"sin", t.sin_coeff},
                           {"envelope", envelope_to_json(t.envelope)}});
    }
    return arr;
}

ThetaPeriodicField parse_theta_field(const json& j, int components, const std::string& where) {
    check_keys(j, {"components", "harmonics"}, where);
    if (get_int(j, "components", components, where) != components) {
        throw DomainError(where + ": expected " + std::to_string(components) + " component(s)");
    }
    std::vector<Harmonic> harmonics;
    if (j.contains("harmonics")) {
        const json& hs = j.at("harmonics");
        if (!hs.is_array()) throw DomainError(where + ": 'harmonics' must be an array");
        for (std::size_t k = 0; k < hs.size(); ++k) {
            const std::string w = where + ".harmonics[" + std::to_string(k) + "]";
            const json& h = hs[k];
            check_keys(h, {"k", "cos", "sin"}, w);
            Harmonic harm;
            harm.k = get_int(h, "k", 0, w);
            for (const char* part : {"cos", "sin"}) {
                auto& dest = std::string(part) == "cos" ? harm.cos_amp : harm.sin_amp;
                if (!h.contains(part)) continue;
                const json& comps = h.at(part);
                if (!comps.is_array() || static_cast<int>(comps.size()) != components) {
                    throw DomainError(w + ": '" + part + "' must list one term array per component");
                }
                for (int c = 0; c < components; ++c) {
                    dest.push_back(parse_amplitude(comps[c], w + "." + part + "[" + std::to_string(c) + "]"));
                }
            }
            harmonics.push_back(std::move(harm));
        }
    }
    return ThetaPeriodicField(components, std::move(harmonics));
}

json theta_field_to_json(const ThetaPeriodicField& f) {
    json hs = json::array();
    for (const auto& h : f.harmonics()) {
        json cos_part = json::array(), sin_part = json::array();
        for (int c = 0; c < f.components(); ++c) {
            cos_part.push_back(c < static_cast<int>(h.cos_amp.size()) ? amplitude_to_json(h.cos_amp[c]) : json::array());
            sin_part.push_back(c < static_cast<int>(h.sin_amp.size()) ? amplitude_to_json(h.sin_amp[c]) : json::array());
        }
        hs.push_back(json{{"k", h.k}, {"cos", cos_part}, {"sin", sin_part}});
    }
    return json{{"components", f.components()}, {"harmonics", hs}};
}

Scenario scenario_from_json(const json& j) {
    const std::string where = "scenario";
    check_keys(j, {"schema", "tide_velocity", "tide_depth", "wind", "mean_depth"}, where);
    if (get_string(j, "schema", "", where) != kScenarioSchema) {
        throw DomainError(std::string("scenario: 'schema' must be \"") + kScenarioSchema + "\"");
    }
    Scenario s = zero_scenario();
    if (j.contains("tide_velocity")) s.tide_velocity = parse_theta_field(j.at("tide_velocity"), 2, "scenario.tide_velocity");
    if (j.contains("tide_depth")) s.tide_depth = parse_theta_field(j.at("tide_depth"), 1, "scenario.tide_depth");
    if (j.contains("wind")) s.wind = parse_theta_field(j.at("wind"), 2, "scenario.wind");
    if (j.contains("mean_depth")) {
        const json& e = j.at("mean_depth");
        check_keys(e, {"flat", "terms"}, "scenario.mean_depth");
        s.mean_depth.flat = get_bool(e, "flat", true, "scenario.mean_depth");
        if (e.contains("terms")) s.mean_depth.depth = parse_amplitude(e.at("terms"), "scenario.mean_depth.terms");
        if (s.mean_depth.flat && !s.mean_depth.depth.empty()) {
            throw DomainError("scenario.mean_depth: a flat bottom cannot carry depth terms");
        }
    }
    return s;
}

json scenario_json(const Scenario& s) {
    json depth{{"flat", s.mean_depth.flat}};
    if (!s.mean_depth.flat) depth["terms"] = amplitude_to_json(s.mean_depth.depth);
    return json{{"schema", kScenarioSchema},
                {"tide_velocity", theta_field_to_json(s.tide_velocity)},
                {"tide_depth", theta_field_to_json(s.tide_depth)},
                {"wind", theta_field_to_json(s.wind)},
                {"mean_depth", depth}};
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::exception& e) {
        throw DomainError(path.string() + ": invalid JSON (" + e.what() + ")");
    }
}

BumpSpec parse_bump(const json& j, BumpSpec fallback, const std::string& where) {
    check_keys(j, {"amplitude", "kappa", "cx", "cy"}, where);
    fallback.amplitude = get_number(j, "amplitude", fallback.amplitude, where);
    fallback.kappa = get_number(j, "kappa", fallback.kappa, where);
    fallback.cx = get_number(j, "cx", fallback.cx, where);
    fallback.cy = get_number(j, "cy", fallback.cy, where);
    return fallback;
}

json bump_to_json(const BumpSpec& b) {
    return json{{"amplitude", b.amplitude}, {"kappa", b.kappa}, {"cx", b.cx}, {"cy", b.cy}};
}

InitialDataSpec parse_initial(const json& j) {
    const std::string where = "initial";
    InitialDataSpec spec;
    const std::string kind = get_string(j, "kind", "bumps", where);
    if (kind == "bumps") {
        check_keys(j, {"kind", "iota", "stream", "potential"}, where);
        spec.kind = InitialDataSpec::Kind::Bumps;
        if (j.contains("iota")) spec.iota = parse_bump(j.at("iota"), spec.iota, "initial.iota");
        if (j.contains("stream")) spec.stream = parse_bump(j.at("stream"), spec.stream, "initial.stream");
        if (j.contains("potential")) spec.potential = parse_bump(j.at("potential"), spec.potential, "initial.potential");
    } else if (kind == "zero") {
        check_keys(j, {"kind"}, where);
        spec.kind = InitialDataSpec::Kind::Zero;
    } else if (kind == "constant") {
        check_keys(j, {"kind", "iota", "n"}, where);
        spec.kind = InitialDataSpec::Kind::Constant;
        spec.iota_value = get_number(j, "iota", 0.0, where);
        if (j.contains("n")) {
            const json& n = j.at("n");
            if (!n.is_array() || n.size() != 2 || !n[0].is_number() || !n[1].is_number()) {
                throw DomainError("initial: 'n' must be an array of two numbers");
            }
            spec.n_value = {n[0].get<double>(), n[1].get<double>()};
        }
    } else {
        throw DomainError("initial: unknown kind '" + kind + "' (expected bumps, zero or constant)");
    }
    return spec;
}

json initial_to_json(const InitialDataSpec& s) {
    switch (s.kind) {
        case InitialDataSpec::Kind::Zero:
            return json{{"kind", "zero"}};
        case InitialDataSpec::Kind::Constant:
            return json{{"kind", "constant"}, {"iota", s.iota_value}, {"n", {s.n_value[0], s.n_value[1]}}};
        case InitialDataSpec::Kind::Bumps:
            break;
    }
    return json{{"kind", "bumps"},
                {"iota", bump_to_json(s.iota)},
                {"stream", bump_to_json(s.stream)},
                {"potential", bump_to_json(s.potential)}};
}

TestFunctionSpec parse_test_function(const json& j, std::size_t index) {
    const std::string where = "test_functions[" + std::to_string(index) + "]";
    check_keys(j, {"name", "phi", "psi", "envelope"}, where);
    const std::string name = get_string(j, "name", "tf" + std::to_string(index), where);
    const bool envelope = get_bool(j, "envelope", true, where);
    if (j.contains("phi") == j.contains("psi")) throw DomainError(where + ": give exactly one of 'phi' or 'psi'");
    if (j.contains("phi")) {
        const Amplitude phi = parse_amplitude(j.at("phi"), where + ".phi");
        for (const auto& t : phi.terms()) {
            if (t.envelope.rate != 0.0 || t.envelope.poly != std::vector<double>{1.0}) {
                throw DomainError(where + ": phi terms cannot carry envelopes");
            }
        }
        return test_function_from_phi(name, phi, envelope);
    }
    const json& psi = j.at("psi");
    if (!psi.is_array() || psi.size() != 3) throw DomainError(where + ": 'psi' must list three components");
    TestFunctionSpec spec{name, {}, envelope};
    for (int c = 0; c < 3; ++c) spec.psi[c] = parse_amplitude(psi[c], where + ".psi[" + std::to_string(c) + "]");
    validate_test_function(spec);
    return spec;
}

json test_function_to_json(const TestFunctionSpec& t) {
    return json{{"name", t.name},
                {"envelope", t.envelope},
                {"psi", {amplitude_to_json(t.psi[0]), amplitude_to_json(t.psi[1]), amplitude_to_json(t.psi[2])}}};
}

json config_json(const ExperimentConfig& c, bool with_output_dir) {
    json tfs = json::array();
    for (const auto& t : c.test_functions) tfs.push_back(test_function_to_json(t));
    json j{{"grid", {{"nx", c.grid.nx()}, {"ny", c.grid.ny()}, {"lx", c.grid.lx()}, {"ly", c.grid.ly()}}},
           {"scenario", scenario_json(c.scenario)},
           {"initial", initial_to_json(c.initial)},
           {"eps", c.eps},
           {"end_time", c.end_time},
           {"safety", c.safety},
           {"outputs", c.outputs},
           {"samples_per_eps", c.samples_per_eps},
           {"limit_outputs", c.limit_outputs},
           {"snapshot_every", c.snapshot_every},
           {"sobolev_index", c.sobolev_index},
           {"test_functions", tfs},
           {"init_variant", c.init_variant == InitChoice::Printed ? "printed"
                            : c.init_variant == InitChoice::Curl  ? "curl"
                                                                  : "both"},
           {"workers", c.workers},
           {"self_compare", c.self_compare}};
    if (with_output_dir) j["output_dir"] = c.output_dir.generic_string();
    return j;
}

// JSON numbers for report values; NaN (missing) becomes null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    try {
        return scenario_from_json(json::parse(json_text));
    } catch (const json::exception& e) {
        throw DomainError(std::string("scenario: invalid JSON (") + e.what() + ")");
    }
}

std::string scenario_to_json(const Scenario& scenario) { return scenario_json(scenario).dump(2) + "\n"; }

ExperimentConfig parse_experiment_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw DomainError(std::string("config: invalid JSON (") + e.what() + ")");
    }
    const std::string where = "config";
    check_keys(j, {"grid", "scenario", "initial", "eps", "end_time", "safety", "outputs", "samples_per_eps",
                   "limit_outputs", "snapshot_every", "sobolev_index", "test_functions", "output_dir",
                   "init_variant", "workers", "self_compare"},
               where);
    ExperimentConfig c;
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, {"nx", "ny", "lx", "ly"}, "config.grid");
        c.grid = TorusGrid(get_int(g, "nx", 64, "config.grid"), get_int(g, "ny", 64, "config.grid"),
                           get_number(g, "lx", kTwoPi, "config.grid"), get_number(g, "ly", kTwoPi, "config.grid"));
    }
    if (j.contains("scenario")) {
        const json& s = j.at("scenario");
        if (s.is_string()) {
            const std::string name = s.get<std::string>();
            if (name == "default") {
                c.scenario = default_scenario();
            } else if (name == "zero") {
                c.scenario = zero_scenario();
            } else {
                throw DomainError("config.scenario: expected \"default\", \"zero\", {\"file\": ...} or a scenario object");
            }
            c.scenario_name = name;
        } else if (s.is_object() && s.contains("file")) {
            check_keys(s, {"file"}, "config.scenario");
            std::filesystem::path p = get_string(s, "file", "", "config.scenario");
            if (p.is_relative()) p = base_dir / p;
            c.scenario = scenario_from_json(read_json_file(p));
            c.scenario_name = "custom";
        } else {
            c.scenario = scenario_from_json(s);
            c.scenario_name = "custom";
        }
    }
    if (j.contains("initial")) c.initial = parse_initial(j.at("initial"));
    if (j.contains("eps")) {
        const json& e = j.at("eps");
        c.eps.clear();
        if (e.is_number()) {
            c.eps.push_back(e.get<double>());
        } else if (e.is_array()) {
            for (const auto& v : e) {
                if (!v.is_number()) throw DomainError("config: 'eps' entries must be numbers");
                c.eps.push_back(v.get<double>());
            }
        } else {
            throw DomainError("config: 'eps' must be a number or an array");
        }
    }
    c.end_time = get_number(j, "end_time", c.end_time, where);
    c.safety = get_number(j, "safety", c.safety, where);
    c.outputs = get_int(j, "outputs", c.outputs, where);
    c.samples_per_eps = get_int(j, "samples_per_eps", c.samples_per_eps, where);
    c.limit_outputs = get_int(j, "limit_outputs", c.limit_outputs, where);
    c.snapshot_every = get_int(j, "snapshot_every", c.snapshot_every, where);
    c.sobolev_index = get_number(j, "sobolev_index", c.sobolev_index, where);
    if (j.contains("test_functions")) {
        const json& t = j.at("test_functions");
        if (!t.is_array()) throw DomainError("config: 'test_functions' must be an array");
        c.test_functions.clear();
        for (std::size_t k = 0; k < t.size(); ++k) c.test_functions.push_back(parse_test_function(t[k], k));
    }
    if (j.contains("output_dir")) c.output_dir = get_string(j, "output_dir", "", where);
    const std::string variant = get_string(j, "init_variant", "both", where);
    if (variant == "printed") {
        c.init_variant = InitChoice::Printed;
    } else if (variant == "curl") {
        c.init_variant = InitChoice::Curl;
    } else if (variant == "both") {
        c.init_variant = InitChoice::Both;
    } else {
        throw DomainError("config: 'init_variant' must be printed, curl or both");
    }
    c.workers = get_int(j, "workers", c.workers, where);
    c.self_compare = get_bool(j, "self_compare", c.self_compare, where);
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str(), path.parent_path());
}

std::string experiment_config_to_json(const ExperimentConfig& config) { return config_json(config, true).dump(2) + "\n"; }

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string run_directory_name(const std::string& prefix, const ExperimentConfig& config, const std::string& salt) {
    const std::string text = config_json(config, false).dump() + "|" + salt;
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
    return prefix + "-" + buf;
}

void write_report_json(std::ostream& out, const ConvergenceReport& report) {
    json runs = json::array();
    for (const auto& r : report.runs) {
        json jr{{"eps", r.eps}, {"status", r.done ? "done" : "failed"}, {"steps", r.steps}};
        if (r.done) {
            jr["pairings"] = r.pairings;
            jr["h4_initial"] = r.h4_initial;
            jr["h4_sup"] = r.h4_sup;
            jr["sup_ratio"] = r.sup_ratio;
        } else {
            jr["failure"] = r.failure;
        }
        runs.push_back(jr);
    }
    json variants = json::array();
    for (const auto& v : report.variants) {
        json errs = json::array();
        for (const auto& row : v.rel_errors) {
            json jrow = json::array();
            for (double e : row) jrow.push_back(number_or_null(e));
            errs.push_back(jrow);
        }
        json mono = json::array();
        for (bool m : v.monotone) mono.push_back(m);
        variants.push_back(json{{"variant", std::string(to_string(v.variant))},
                                {"limit_pairings", v.limit_pairings},
                                {"rel_errors", errs},
                                {"monotone", mono},
                                {"final_max_error", number_or_null(v.final_max_error)}});
    }
    json j{{"test_functions", report.test_functions},
           {"runs", runs},
           {"variants", variants},
           {"best_variant", report.variants.empty() ? json(nullptr) : json(std::string(to_string(report.best().variant)))},
           {"sup_ratio_spread", report.sup_ratio_spread},
           {"complete", report.complete()}};
    out << j.dump(2) << '\n';
}

}  // namespace coastal
