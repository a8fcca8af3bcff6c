#pragma once

// Experiment definitions shared by the command-line front end: initial data,
// constraint-satisfying test functions, strict JSON configs, the full/limit
// comparison sweep and its report.

#include "coastal/fields.hpp"
#include "coastal/full_solver.hpp"
#include "coastal/limit_solver.hpp"
#include "coastal/spectral.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace coastal {

// ---------------------------------------------------------------------------
// Initial data

/// amplitude * exp(kappa (cos(2 pi (x - cx)/Lx) + cos(2 pi (y - cy)/Ly) - 2))
struct BumpSpec {
    double amplitude = 1.0;
    double kappa = 1.0;
    double cx = 0.0;
    double cy = 0.0;
};

struct InitialDataSpec {
    enum class Kind { Bumps, Zero, Constant };
    Kind kind = Kind::Bumps;
    // Bumps: iota0 = iota bump, n0 = (-d_2 psi, d_1 psi) + grad chi.
    BumpSpec iota{1.0, 1.5, std::numbers::pi - 0.4, std::numbers::pi + 0.3};
    BumpSpec stream{1.0, 1.2, std::numbers::pi + 0.6, std::numbers::pi - 0.5};
    BumpSpec potential{0.1, 1.2, std::numbers::pi, std::numbers::pi};
    // Constant
    double iota_value = 0.0;
    std::array<double, 2> n_value{0.0, 0.0};
};

/// Samples the initial data on the grid and projects it onto the dealiased band.
State make_initial_state(const InitialDataSpec& spec, const TorusGrid& grid);

// ---------------------------------------------------------------------------
// Test functions

/// Psi(t, x) = env(t) * (psi_0, psi_1, psi_2)(x) with env = 1 - (t/T)^2 when
/// enveloped, 1 otherwise.  Valid only when psi_1 = -d_2 psi_0 and
/// psi_2 = d_1 psi_0.
struct TestFunctionSpec {
    std::string name;
    std::array<Amplitude, 3> psi;
    bool envelope = true;
};

/// Builds (phi, -d_2 phi, d_1 phi) from a trigonometric phi.
TestFunctionSpec test_function_from_phi(std::string name, const Amplitude& phi, bool envelope = true);

/// Throws DomainError citing the constraint when psi is not of the form
/// (phi, -d_2 phi, d_1 phi).
void validate_test_function(const TestFunctionSpec& spec);

/// cos x1, sin x2, cos(x1 + x2), sin(x1 - x2), cos 2x1.
std::vector<TestFunctionSpec> default_test_functions();

TestFunctionSampler make_sampler(const TestFunctionSpec& spec, double end_time);

// ---------------------------------------------------------------------------
// Config

enum class InitChoice { Printed, Curl, Both };

struct ExperimentConfig {
    TorusGrid grid{64, 64};
    Scenario scenario = default_scenario();
    std::string scenario_name = "default";  // "default", "zero" or "custom"
    InitialDataSpec initial;
    std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
    double end_time = 0.5;
    double safety = 0.5;
    int outputs = 20;             // minimum number of output intervals
    int samples_per_eps = 16;     // full-solver outputs per unit eps of time
    int limit_outputs = 400;
    int snapshot_every = 0;       // 0 disables TSF1 output
    double sobolev_index = 4.0;
    std::vector<TestFunctionSpec> test_functions = default_test_functions();
    std::filesystem::path output_dir = "runs";
    InitChoice init_variant = InitChoice::Both;
    int workers = 4;
    bool self_compare = false;    // pair the limit trajectory against itself

    /// Throws DomainError on any violated invariant.
    void validate() const;

    /// Output intervals of a full run at this eps.
    int full_outputs(double eps_value) const;
};

/// Parses a config document.  Unknown keys anywhere are rejected.  Relative
/// scenario file references resolve against base_dir.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
/// Canonical JSON (sorted keys, fully expanded scenario).
std::string experiment_config_to_json(const ExperimentConfig& config);

/// "coastal-fields/1" scenario documents.
Scenario parse_scenario(const std::string& json_text);
std::string scenario_to_json(const Scenario& scenario);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
/// Directory name "<prefix>-<16 hex digits>" derived from the canonical config
/// and a salt (subcommand, eps).
std::string run_directory_name(const std::string& prefix, const ExperimentConfig& config,
                               const std::string& salt);

// ---------------------------------------------------------------------------
// Single runs

FullRunConfig make_full_run(const ExperimentConfig& config, double eps);
LimitRunConfig make_limit_run(const ExperimentConfig& config, InitVariant variant);

void write_full_diagnostics_csv(std::ostream& out, const FullRunResult& result);
void write_limit_diagnostics_csv(std::ostream& out, const LimitRunResult& result);

// ---------------------------------------------------------------------------
// Comparison

struct EpsRun {
    double eps = 0.0;
    bool done = false;
    std::string failure;
    long steps = 0;
    std::vector<double> pairings;  // one per test function
    double h4_initial = 0.0;
    double h4_sup = 0.0;
    double sup_ratio = 0.0;        // h4_sup / h4_initial
};

struct VariantReport {
    InitVariant variant = InitVariant::Printed;
    std::vector<double> limit_pairings;
    std::vector<std::vector<double>> rel_errors;  // [eps index][test function]
    std::vector<bool> monotone;                   // per test function, 10% slack per halving
    double final_max_error = 0.0;                 // max over test functions at the smallest eps
};

struct ConvergenceReport {
    std::vector<std::string> test_functions;
    std::vector<EpsRun> runs;
    std::vector<VariantReport> variants;
    std::size_t best_variant = 0;
    double sup_ratio_spread = 0.0;  // largest / smallest sup over completed runs

    bool complete() const;
    const VariantReport& best() const { return variants.at(best_variant); }
};

/// Relative errors, monotonicity flags and the best variant from pairings
/// already computed.  runs must be ordered as the eps list.
ConvergenceReport assemble_report(std::vector<std::string> names, std::vector<EpsRun> runs,
                                  std::vector<VariantReport> variants);

/// Runs the sweep (one worker per eps, at most config.workers at a time),
/// the limit solver per init variant, and assembles the report.
ConvergenceReport run_compare(const ExperimentConfig& config);

void write_report_json(std::ostream& out, const ConvergenceReport& report);
void write_pairings_csv(std::ostream& out, const ConvergenceReport& report);
void write_norms_csv(std::ostream& out, const ConvergenceReport& report);

// ---------------------------------------------------------------------------
// Manufactured solutions of the limit equation

/// Exact solution under avg M = (1, 0), H = W = 0:
///   band-limited:  I* = exp(-t) sin x1 sin x2
///   otherwise:     I* = exp(-t) exp(alpha sin x1) sin x2
struct ManufacturedCase {
    bool band_limited = true;
    double alpha = 1.0;

    double exact(double t, double x, double y) const;
    double source(double t, double x, double y) const;
    Scenario scenario() const;
};

struct ManufacturedRow {
    int n = 0;
    double dt = 0.0;
    long steps = 0;
    double max_error = 0.0;
};

/// Max nodal error of I at end_time for one grid and step.
ManufacturedRow manufactured_error(const ManufacturedCase& mcase, int n, double dt, double end_time);

}  // namespace coastal
