#ifndef SGFLOW_DIAGNOSTICS_HPP
#define SGFLOW_DIAGNOSTICS_HPP

#include <cstdint>
#include <vector>

#include "sgflow/dynamics.hpp"
#include "sgflow/exact_ot.hpp"

namespace sgflow {

// Log-log least-squares fit of observed errors against a parameter grid.
// grid holds the abscissae at which errors were actually observed,
// strictly decreasing. degenerate marks the all-zero-error case (e.g. a
// stationary flow), where no slope is meaningful.
struct RateFit {
    std::vector<double> grid;
    std::vector<double> errors;
    double slope = 0.0;
    double half_width = 0.0; // 2 standard errors of the slope, residual-based
    bool degenerate = false;
};

// OLS in log-log coordinates; points with non-positive abscissa or error
// are skipped. Sets degenerate when fewer than two usable points remain.
RateFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& errors);

// Time-step convergence. For a single-atom pair the reference is the
// closed-form flow x(t) = y + e^{tA}(x0 - y); otherwise the finest-tau run
// serves as reference (needs >= 5 grid entries so the fit keeps 4 points).
// Errors are sup over shared snapshot times of the exact W2 distance.
RateFit tau_rate_study(const SimulationConfig& base, const std::vector<double>& tau_grid);

// Entropic-gap decay on a fixed instance.
struct EpsGapReport {
    std::vector<double> grid;           // eps values, strictly decreasing
    std::vector<double> plan_cost_gap;  // int |x-y|^2 dgamma_eps  -  W2^2
    std::vector<double> value_gap;      // OT_eps - W2^2 / 2
    double w2_squared = 0.0;
    bool positive = false;              // all plan-cost gaps > 0
    bool strictly_decreasing = false;   // plan-cost gap decreasing along the grid
    RateFit fit;                        // value_gap against eps |log eps|
};

EpsGapReport eps_gap_study(const DiscreteMeasure& alpha, const DiscreteMeasure& mu,
                           const std::vector<double>& eps_grid,
                           const SinkhornOptions& opts = {});

// Entropic total energy along a trajectory: OT_eps(alpha_t, mu0) plus the
// third-coordinate potential term. Transport values are re-solved cold at
// each snapshot so the measurement is independent of warm-start history.
struct EnergyReport {
    std::vector<double> times;
    std::vector<double> kinetic;    // OT_eps(alpha_t, mu0)
    std::vector<double> potential;  // int x_3 d alpha_t
    std::vector<double> total;
    double max_drift = 0.0;         // max_t |E(t) - E(0)|
};

EnergyReport energy_report(const Trajectory& traj, const DiscreteMeasure& mu0,
                           double epsilon, const SinkhornOptions& opts = {});

// Simultaneous eps, tau, quantization refinement: one run per schedule row,
// then sup-W2 distances between successive trajectories as Cauchy-type
// evidence of convergence.
struct JointScheduleRow {
    double epsilon = 0.0;
    double tau = 0.0;
    int count = 0;
    std::uint64_t seed = 0;
};

struct JointReport {
    std::vector<JointScheduleRow> schedule;
    std::vector<double> distances;   // size rows - 1
    std::vector<bool> exact_metric;  // false where the entropic fallback was used
    bool decreasing = false;         // d_{i+1} < d_i for all i
    bool debiased_fallback = false;  // any distance used the fallback
};

JointReport joint_convergence_study(const SimulationConfig& base,
                                    const std::vector<JointScheduleRow>& schedule,
                                    long max_cells = kExactOtMaxCells);

} // namespace sgflow

#endif
