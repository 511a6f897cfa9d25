#include "sgflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/MatrixFunctions>

namespace sgflow {

RateFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& errors) {
    RateFit fit;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size() && i < errors.size(); ++i) {
        if (xs[i] > 0.0 && errors[i] > 0.0) {
            fit.grid.push_back(xs[i]);
            fit.errors.push_back(errors[i]);
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(errors[i]));
        }
    }
    const std::size_t k = lx.size();
    if (k < 2) {
        fit.degenerate = true;
        fit.half_width = std::numeric_limits<double>::infinity();
        return fit;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    fit.slope = sxy / sxx;
    const double intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = ly[i] - (intercept + fit.slope * lx[i]);
        ss_res += r * r;
    }
    fit.half_width = k > 2 ? 2.0 * std::sqrt(ss_res / static_cast<double>(k - 2) / sxx)
                           : std::numeric_limits<double>::infinity();
    return fit;
}

namespace {

void require_decreasing(const std::vector<double>& grid, const char* field,
                        std::size_t min_points) {
    if (grid.size() < min_points)
        throw ValidationError(field, "needs at least " + std::to_string(min_points) +
                                         " entries");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] > grid[i + 1]))
            throw ValidationError(field, "must be strictly decreasing");
    if (!(grid.back() > 0.0)) throw ValidationError(field, "entries must be positive");
}

bool times_match(double a, double b, double horizon) {
    return std::abs(a - b) <= 1e-9 * std::max(1.0, horizon);
}

// sup over shared snapshot times of a pairwise measure distance
double sup_distance(const Trajectory& t1, const Trajectory& t2, double horizon,
                    const std::function<double(const DiscreteMeasure&,
                                               const DiscreteMeasure&)>& dist) {
    double sup = 0.0;
    long matched = 0;
    for (const Snapshot& s1 : t1.snapshots) {
        for (const Snapshot& s2 : t2.snapshots) {
            if (times_match(s1.time, s2.time, horizon)) {
                sup = std::max(sup, dist(s1.measure, s2.measure));
                ++matched;
                break;
            }
        }
    }
    if (matched < 2)
        throw ValidationError("tau_grid", "runs share fewer than two snapshot times");
    return sup;
}

Trajectory run_with_tau(SimulationConfig config, double tau) {
    config.tau = tau;
    config.snapshot_stride = 1;
    return simulate(config);
}

} // namespace

RateFit tau_rate_study(const SimulationConfig& base, const std::vector<double>& tau_grid) {
    const DiscreteMeasure alpha0 = base.alpha0.realize();
    const DiscreteMeasure mu0 = base.mu0.realize();
    const bool single_atom = alpha0.size() == 1 && mu0.size() == 1;
    require_decreasing(tau_grid, "tau_grid", single_atom ? 4 : 5);

    const auto exact_w2 = [](const DiscreteMeasure& a, const DiscreteMeasure& b) {
        return w2(a, b);
    };

    std::vector<double> taus;
    std::vector<double> errors;
    if (single_atom) {
        // Closed-form flow of dx/dt = A(x - y): x(t) = y + e^{tA}(x0 - y).
        const Point x0 = alpha0.point(0);
        const Point y = mu0.point(0);
        for (double tau : tau_grid) {
            const Trajectory traj = run_with_tau(base, tau);
            double err = 0.0;
            for (const Snapshot& s : traj.snapshots) {
                const Eigen::MatrixXd e_ta = (s.time * base.drift.A).exp();
                const Point exact = y + e_ta * (x0 - y);
                err = std::max(err, (s.measure.point(0) - exact).norm());
            }
            taus.push_back(tau);
            errors.push_back(err);
        }
    } else {
        const Trajectory reference = run_with_tau(base, tau_grid.back());
        for (std::size_t i = 0; i + 1 < tau_grid.size(); ++i) {
            const Trajectory traj = run_with_tau(base, tau_grid[i]);
            taus.push_back(tau_grid[i]);
            errors.push_back(sup_distance(traj, reference, base.horizon, exact_w2));
        }
    }

    bool all_zero = true;
    for (double e : errors)
        if (e != 0.0) all_zero = false;
    if (all_zero) {
        RateFit fit;
        fit.grid = taus;
        fit.errors = errors;
        fit.degenerate = true;
        fit.half_width = std::numeric_limits<double>::infinity();
        return fit;
    }
    return fit_loglog(taus, errors);
}

EpsGapReport eps_gap_study(const DiscreteMeasure& alpha, const DiscreteMeasure& mu,
                           const std::vector<double>& eps_grid,
                           const SinkhornOptions& opts) {
    require_decreasing(eps_grid, "eps_grid", 4);
    EpsGapReport report;
    report.grid = eps_grid;
    report.w2_squared = w2_squared_exact(alpha, mu).value;

    for (double eps : eps_grid) {
        const SchrodingerSolution sol = sinkhorn_solve(alpha, mu, eps, opts);
        report.plan_cost_gap.push_back(sol.transport_cost() - report.w2_squared);
        report.value_gap.push_back(sol.ot_value() - 0.5 * report.w2_squared);
    }

    report.positive = true;
    report.strictly_decreasing = true;
    for (std::size_t i = 0; i < report.plan_cost_gap.size(); ++i) {
        if (!(report.plan_cost_gap[i] > 0.0)) report.positive = false;
        if (i > 0 && !(report.plan_cost_gap[i] < report.plan_cost_gap[i - 1]))
            report.strictly_decreasing = false;
    }

    // eps |log eps| vanishes at eps = 1; fit_loglog drops such points.
    std::vector<double> xs;
    for (double eps : eps_grid) xs.push_back(eps * std::abs(std::log(eps)));
    report.fit = fit_loglog(xs, report.value_gap);
    return report;
}

EnergyReport energy_report(const Trajectory& traj, const DiscreteMeasure& mu0,
                           double epsilon, const SinkhornOptions& opts) {
    EnergyReport report;
    for (const Snapshot& s : traj.snapshots) {
        const SchrodingerSolution sol = sinkhorn_solve(s.measure, mu0, epsilon, opts);
        report.times.push_back(s.time);
        report.kinetic.push_back(sol.ot_value());
        report.potential.push_back(s.diag.potential_energy);
        report.total.push_back(report.kinetic.back() + report.potential.back());
    }
    for (double e : report.total)
        report.max_drift = std::max(report.max_drift, std::abs(e - report.total.front()));
    return report;
}

JointReport joint_convergence_study(const SimulationConfig& base,
                                    const std::vector<JointScheduleRow>& schedule,
                                    long max_cells) {
    if (schedule.size() < 2)
        throw ValidationError("schedule", "needs at least two rows");
    for (std::size_t i = 0; i + 1 < schedule.size(); ++i) {
        if (!(schedule[i].epsilon > schedule[i + 1].epsilon))
            throw ValidationError("schedule", "epsilon must be strictly decreasing");
        if (!(schedule[i].tau > schedule[i + 1].tau))
            throw ValidationError("schedule", "tau must be strictly decreasing");
        if (!(schedule[i].count <= schedule[i + 1].count))
            throw ValidationError("schedule", "atom count must be non-decreasing");
    }
    if (!base.alpha0.ball || !base.mu0.ball)
        throw ValidationError("schedule",
                              "the joint study quantizes both measures and needs ball specs");

    JointReport report;
    report.schedule = schedule;

    std::vector<Trajectory> runs;
    for (const JointScheduleRow& row : schedule) {
        SimulationConfig config = base;
        config.epsilon = row.epsilon;
        config.tau = row.tau;
        config.snapshot_stride = 1;
        config.alpha0.count = row.count;
        config.alpha0.seed = row.seed;
        config.mu0.count = row.count;
        config.mu0.seed = row.seed + 1;
        runs.push_back(simulate(config));
    }

    const double eps_min = schedule.back().epsilon;
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        bool exact = true;
        const auto dist = [&](const DiscreteMeasure& a, const DiscreteMeasure& b) {
            try {
                return w2(a, b, max_cells);
            } catch (const InstanceTooLarge&) {
                // Debiased entropic surrogate: 2 OT_eps(a,b) - OT_eps(a,a)
                // - OT_eps(b,b), at the smallest scheduled eps.
                exact = false;
                const double ab = sinkhorn_solve(a, b, eps_min).ot_value();
                const double aa = sinkhorn_solve(a, a, eps_min).ot_value();
                const double bb = sinkhorn_solve(b, b, eps_min).ot_value();
                return std::sqrt(std::max(0.0, 2.0 * ab - aa - bb));
            }
        };
        report.distances.push_back(
            sup_distance(runs[i], runs[i + 1], base.horizon, dist));
        report.exact_metric.push_back(exact);
        if (!exact) report.debiased_fallback = true;
    }

    report.decreasing = true;
    for (std::size_t i = 0; i + 1 < report.distances.size(); ++i)
        if (!(report.distances[i + 1] < report.distances[i])) report.decreasing = false;
    return report;
}

} // namespace sgflow
