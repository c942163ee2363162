#pragma once

// Implicit time integration of the regularized flow
//
//     u_t + ( sqrt(u^2 + eps^2) (u_xxx + (u^m)_x) )_x = 0
//
// in conservative form: backward-Euler face fluxes solved by damped Newton
// with an analytic pentadiagonal Jacobian, adaptive step control on the
// relative solution change, and the run-level monitors (dissipation,
// second-moment identity, blow-up indicator) built on the recorded series.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thinfilm/core.hpp"

namespace thinfilm {

struct SolverConfig {
    double epsilon = 0.0; // <= 0 selects 1e-6 * max(u0)
    BcType bc = BcType::Periodic;
    double dt0 = 1e-6;
    double dt_min = 0.0; // <= 0 selects 1e-12 * dt0
    double dt_max = 1.0;
    double newton_tol = 1e-9; // relative to max height
    int newton_max_iter = 12;
    double growth_factor = 1.2;
    double target_rel_change = 5e-3;
    double blowup_grad_factor = 1e3;
    double blowup_height_factor = 1e3;
    double t_end = 50.0;
    double snapshot_every = 0.0; // <= 0: first and last snapshot only
    long max_steps = 1000000;
};

struct InitialSpec {
    enum class Kind { DilatedSteady, Gaussian, FromFile };
    Kind kind = Kind::DilatedSteady;
    double lambda = 1.0; // DilatedSteady: u0 = lambda U_*(lambda x)
    double sigma = 1.0;  // Gaussian width
    std::string path;    // FromFile snapshot

    static InitialSpec dilated_steady(double lambda);
    static InitialSpec gaussian(double sigma);
    static InitialSpec from_file(std::string path);
};

enum class Termination { ReachedTEnd, BlowupIndicated, StepCollapse, NumericalFailure };

const char* to_string(Termination t);

struct SeriesRow {
    double t = 0.0;
    double dt = 0.0; // step that produced this row; 0 for the initial row
    double mass = 0.0;
    double F = 0.0;
    double m2 = 0.0;
    double norm_m1 = 0.0;
    double grad_l2 = 0.0;
    double fisher = 0.0;
    double u_max = 0.0;
    double u_min = 0.0;
};

struct RunRecord {
    ModelParams params;
    SolverConfig config; // resolved values (epsilon, dt_min) as used
    std::vector<SeriesRow> series;
    std::vector<Field> snapshots;
    Termination termination = Termination::ReachedTEnd;
    std::optional<double> t_w_estimate;
    double epsilon_used = 0.0;
    double edge_max = 0.0; // boundary contamination monitor
    bool undershoot_flagged = false;
    long rejected_steps = 0;
    long total_newton_iters = 0;
};

struct StepDiagnostics {
    int newton_iters = 0;
    double residual = 0.0;
    bool converged = false;
};

// Initial-data families. The dilated-steady and Gaussian fields are
// renormalized at the trapezoid level so their discrete mass is exactly M;
// file data is taken as-is. Throws GridTooSmall unless the grid allows a
// factor-4 margin around the initial support.
Field prepare_initial(const InitialSpec& spec, const ModelParams& params,
                      const Grid& grid);

// One backward-Euler step of size dt. Throws NewtonDiverged when the
// nonlinear solve fails; the caller is expected to halve dt and retry.
std::pair<Field, StepDiagnostics> step(const Field& u, const ModelParams& params,
                                       const SolverConfig& config, double dt);

RunRecord evolve(const Field& u0, const ModelParams& params,
                 const SolverConfig& config);

// True when the recorded series crossed the gradient or height growth
// thresholds or the step size collapsed.
bool blowup_indicator(const RunRecord& record, const SolverConfig& config);

// Positive part of the worst per-step energy increase [F(t_k+1) - F(t_k)]_+
// over the resolved window of the recorded series.
double dissipation_check(const RunRecord& record, const ModelParams& params);

// Worst relative mismatch of d(m2)/dt against 6F - 2(m-3)/(m+1) int u^{m+1}
// over smooth windows of the series.
double m2_identity_residual(const RunRecord& record, const ModelParams& params);

} // namespace thinfilm
