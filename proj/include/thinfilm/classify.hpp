#pragma once

// The supercritical decision procedure: predict blow-up versus global
// existence from the energy/norm dichotomy, confirm the prediction by
// simulation, monitor the boundedness scenarios outside the theory's reach,
// fit similarity exponents to spreading runs, and assemble parameter sweeps.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "thinfilm/core.hpp"
#include "thinfilm/evolve.hpp"

namespace thinfilm {

enum class Prediction { Blowup, Global, Indeterminate };

const char* to_string(Prediction p);

struct ThresholdVerdict {
    Prediction prediction = Prediction::Indeterminate;
    double f0 = 0.0;     // F(u0)
    double f_star = 0.0; // F(U_*) at the measured mass
    double norm0 = 0.0;  // ||u0||_{m+1}
    double p_star = 0.0;
    std::optional<double> mu1, mu2; // attached when f0 < f_star
    // f0 < f_star with norm0 on the excluded boundary norm0 = p_star:
    // impossible for exact solutions, so it flags discretization error.
    bool boundary_contradiction = false;
    std::optional<Termination> outcome;
    std::optional<bool> agreement;
    std::optional<double> t_w_estimate;
};

// Applies the dichotomy to the measured invariants of u0 (its own discrete
// mass, not the configured target). Throws NotSupercritical for m <= 3.
ThresholdVerdict predict(const Field& u0, const ModelParams& params,
                         double boundary_rtol = 1e-9);

// Runs the solver and scores the prediction: Blowup agrees with a fired
// indicator; Global agrees with reaching t_end, second-moment growth over
// the final half, and the norm staying below mu1 p_star (plus 1e-3 p_star
// slack). The full record is copied to record_out when given.
ThresholdVerdict confirm(const Field& u0, const ModelParams& params,
                         const SolverConfig& config,
                         RunRecord* record_out = nullptr);

struct ScenarioReport {
    bool p1 = false; // sup_t ||u||_{m+1} stayed below norm_cap
    bool p2 = false; // sup_t m2 stayed below m2_cap
    double norm_cap = 0.0;
    double m2_cap = 0.0;
    std::string label; // descriptive scenario name, no asymptotic claim
};

ScenarioReport scenario_monitor(const RunRecord& record,
                                const ModelParams& params,
                                double cap_factor = 10.0);

struct SimilarityFit {
    double beta_H = 0.0; // fitted height exponent
    double beta_L = 0.0; // fitted width exponent
    double r2 = 0.0;     // of the height fit
};

// Log-log least squares over the final `window` fraction of the series.
// Throws InsufficientDecay unless u_max decays monotonically there.
SimilarityFit fit_similarity(const RunRecord& record, const ModelParams& params,
                             double window = 0.3);

struct SweepOptions {
    int grid_n = 1024;
    double grid_half_width = 0.0; // <= 0: factor-4 auto sizing per cell
    int jobs = 1;
};

struct SweepCell {
    double m = 0.0;
    double lambda = 0.0;
    ThresholdVerdict verdict;
    bool failed = false;
    std::string error;
};

// Confirmed verdict for every (m, lambda) of the dilation family, in
// deterministic row order (outer m, inner lambda); cell failures are
// captured in the row. Throws NotSupercritical if any m <= 3. When given,
// on_row sees each finished cell in row order regardless of job count, so
// a table can be written incrementally.
std::vector<SweepCell> sweep(const std::vector<double>& m_list,
                             const std::vector<double>& lambda_list,
                             const ModelParams& base, const SolverConfig& config,
                             const SweepOptions& opts = {},
                             const std::function<void(const SweepCell&)>& on_row = {});

// Grid sized for the initial condition: half-width 4x the initial support
// (or as given when half_width > 0).
Grid auto_grid(const InitialSpec& spec, const ModelParams& params, int n,
               double half_width = 0.0);

} // namespace thinfilm
