#pragma once

// The homogenized limit: a stream function I with N = (-d_2 I, d_1 I), whose
// potential vorticity q = (1 - Lap) I evolves by
//
//   d_t q = curl avg(W) - [ M.grad I - d_1(M_1 d_11 I) - d_1(M_2 d_12 I)
//                           - d_2(M_1 d_12 I) - d_2(M_2 d_22 I)
//                           - (grad H)_perp . grad I + (div M) I
//                           + d_1(d_1 M_2 d_2 I) - d_1(d_2 M_2 d_1 I)
//                           - d_2(d_1 M_1 d_2 I) + d_2(d_2 M_1 d_1 I) ]
//
// with M, H, W replaced by their theta averages and (a)_perp = (-a_2, a_1).

#include "coastal/fields.hpp"
#include "coastal/spectral.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace coastal {

struct StreamState {
    ScalarField I;
    ScalarField q;
    double time = 0.0;

    /// Builds a consistent state from q (I = helmholtz_inverse(q)).
    static StreamState from_q(ScalarField q, double t);
    /// ||(1 - Lap) I - q||_0
    double helmholtz_defect() const;
};

enum class InitVariant { Printed, CurlConsistent };

std::string_view to_string(InitVariant v);
/// Accepts "printed" and "curl".
InitVariant parse_init_variant(std::string_view name);

/// Printed:         q0 = iota0 + d_1 n0_1 - d_2 n0_2
/// CurlConsistent:  q0 = iota0 - d_1 n0_2 + d_2 n0_1
StreamState init_from_perturbation(const ScalarField& iota0, const VectorField& n0, InitVariant variant);

/// theta-averaged coefficients of the limit equation at a given time.
struct AveragedCoeffs {
    VectorField M;
    std::array<VectorField, 2> grad_M;  // grad_M[i] = grad of M_i
    ScalarField H;
    VectorField grad_H;
    ScalarField curl_W;  // d_2 avg W_1 - d_1 avg W_2

    explicit AveragedCoeffs(const TorusGrid& grid);
    static AveragedCoeffs zero(const TorusGrid& grid) { return AveragedCoeffs(grid); }
};

/// Samples the averaged coefficients analytically; the wind curl uses the
/// exact amplitude derivatives.
class AveragedFields {
public:
    AveragedFields(const Scenario& scenario, const TorusGrid& grid);

    const TorusGrid& grid() const noexcept { return fields_.grid(); }
    AveragedCoeffs at(double t) const;

private:
    GridFields fields_;
};

/// Extra forcing added to dq/dt (manufactured solutions).
using LimitSource = std::function<ScalarField(const TorusGrid&, double t)>;

/// Coefficients as a function of time.
using CoeffProvider = std::function<AveragedCoeffs(double t)>;

ScalarField assemble_limit_rhs(const StreamState& state, const AveragedCoeffs& coeffs);

/// One RK4 step on q followed by Helmholtz inversion.  Throws SolverAbort
/// if the result is not finite or the Helmholtz defect exceeds 1e-10.
StreamState step(const StreamState& state, double dt, const CoeffProvider& coeffs,
                 const LimitSource& source = nullptr);

/// N = (-d_2 I, d_1 I)
VectorField reconstruct_N(const StreamState& state);

struct ConstraintResiduals {
    double divergence = 0.0;  // ||div N||_0
    double balance = 0.0;     // ||N_perp + grad I||_0
};

ConstraintResiduals constraint_residuals(const StreamState& state);

/// Advective step bound h / (1 + max|M| + max|grad M| h) scaled by safety.
double limit_time_step(const AveragedCoeffs& coeffs, double safety);

struct LimitDiagnostics {
    double time = 0.0;
    double h4_norm = 0.0;     // of (I, N1, N2)
    double l2_norm = 0.0;
    double q_l2 = 0.0;
    double max_abs_I = 0.0;
    double div_residual = 0.0;
    double balance_residual = 0.0;
    double helmholtz_defect = 0.0;
};

struct LimitRunConfig {
    double end_time = 1.0;
    double safety = 0.5;
    int outputs = 10;
    TorusGrid grid{32, 32};
    Scenario scenario;
    std::optional<StreamState> initial;
    LimitSource source;  // optional
    std::optional<double> fixed_dt;  // overrides the advective bound (rounded to land on outputs)
    std::optional<std::filesystem::path> snapshot_dir;
    int snapshot_every = 1;
    double sobolev_index = 4.0;

    void validate() const;
};

struct LimitRunResult {
    /// Snapshots carry (I, N1, N2) so they pair directly with full-solver
    /// trajectories.
    std::vector<Snapshot> trajectory;
    std::vector<LimitDiagnostics> diagnostics;
    StreamState final_state{ScalarField(TorusGrid(8, 8)), ScalarField(TorusGrid(8, 8)), 0.0};
    long steps = 0;
    bool aborted = false;
    std::string abort_reason;
    double abort_time = 0.0;
};

LimitRunResult run_limit(const LimitRunConfig& config);

LimitDiagnostics diagnose_limit(const StreamState& state, double sobolev_index);

}  // namespace coastal
