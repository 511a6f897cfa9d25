#include "sgflow/dynamics.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <span>

#include "sgflow/numerics.hpp"

namespace sgflow {

DriftMatrix make_drift(Eigen::MatrixXd A) {
    if (A.rows() != A.cols())
        throw ValidationError("drift", "matrix must be square");
    if (!A.allFinite())
        throw ValidationError("drift", "matrix entries must be finite");
    DriftMatrix d;
    d.is_skew = (A + A.transpose()).cwiseAbs().maxCoeff() <= 1e-14;
    d.zero_rows.resize(static_cast<std::size_t>(A.rows()));
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        bool zero = true;
        for (Eigen::Index c = 0; c < A.cols(); ++c)
            if (A(r, c) != 0.0) zero = false;
        d.zero_rows[static_cast<std::size_t>(r)] = zero;
    }
    d.A = std::move(A);
    return d;
}

DriftMatrix make_J() {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 3);
    J(0, 1) = -1.0;
    J(1, 0) = 1.0;
    return make_drift(std::move(J));
}

DiscreteMeasure MeasureSpec::realize() const {
    if (explicit_measure) return *explicit_measure;
    if (ball) return quantize_uniform_ball(*ball, count, seed);
    throw ValidationError("measure", "neither an explicit measure nor a ball spec given");
}

long SimulationConfig::step_count() const {
    if (!(tau > 0.0)) throw ValidationError("tau", "must be positive");
    if (!(horizon > 0.0)) throw ValidationError("horizon", "must be positive");
    const double ratio = horizon / tau;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 || rounded < 1.0)
        throw ValidationError("tau", "T/tau must be integral");
    return static_cast<long>(rounded);
}

void SimulationConfig::validate() const {
    if (dimension < 1) throw ValidationError("dimension", "must be >= 1");
    if (drift.A.rows() != dimension)
        throw ValidationError("drift", "matrix size must match dimension");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon", "must be positive");
    const long n = step_count();
    if (snapshot_stride < 1)
        throw ValidationError("snapshot_stride", "must be >= 1");
    if (n % snapshot_stride != 0)
        throw ValidationError("snapshot_stride",
                              "must divide the step count for uniform snapshot spacing");
    if (!(sinkhorn_tol > 0.0)) throw ValidationError("sinkhorn.tol", "must be positive");
    if (sinkhorn_max_iter < 1)
        throw ValidationError("sinkhorn.max_iter", "must be >= 1");
}

TheoryBounds compute_bounds(const DriftMatrix& drift, double epsilon, double horizon,
                            double r0) {
    TheoryBounds b;
    b.r0 = r0;
    b.drift_norm = drift.A.jacobiSvd().singularValues()(0);
    b.growth_c = std::max(1.0, r0) * b.drift_norm;
    b.r_t = (r0 + 1.0) * std::exp(b.growth_c * horizon);
    b.r_paper = 2.0 * r0 * std::exp(b.drift_norm * horizon);
    b.k_bound = b.drift_norm * (1.0 + 2.0 * r0 * r0 / epsilon);
    return b;
}

Point velocity(const SchrodingerSolution& sol, const DriftMatrix& drift, const Point& x) {
    return drift.A * sol.grad_v(x);
}

namespace {

double potential_energy(const DiscreteMeasure& m) {
    if (m.dim() < 3) return 0.0;
    std::vector<double> terms(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i)
        terms[static_cast<std::size_t>(i)] = m.weights()[i] * m.points()(i, 2);
    return pairwise_sum(terms);
}

StepDiagnostics diagnostics_for(const DiscreteMeasure& m, const SchrodingerSolution& sol) {
    StepDiagnostics d;
    d.ot_value = sol.ot_value();
    d.potential_energy = potential_energy(m);
    d.support_radius = support_radius(m);
    d.sinkhorn_iterations = sol.iterations();
    return d;
}

} // namespace

EulerStepResult euler_step(const DiscreteMeasure& alpha_k, const DiscreteMeasure& mu0,
                           const DriftMatrix& drift, double epsilon, double tau,
                           const SinkhornOptions& opts) {
    SchrodingerSolution sol = sinkhorn_solve(alpha_k, mu0, epsilon, opts);

    const Eigen::Index n = alpha_k.size();
    const Eigen::Index d = alpha_k.dim();
    Eigen::MatrixXd moved(n, d);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
        for (std::size_t ii = b; ii < e; ++ii) {
            const Eigen::Index i = static_cast<Eigen::Index>(ii);
            const Point x = alpha_k.point(i);
            const Point vel = velocity(sol, drift, x);
            for (Eigen::Index k = 0; k < d; ++k) {
                // Zero drift rows leave the coordinate untouched, bit for bit.
                moved(i, k) = drift.zero_rows[static_cast<std::size_t>(k)]
                                  ? x[k]
                                  : x[k] + tau * vel[k];
            }
        }
    });
    if (!moved.allFinite())
        throw NonFiniteUpdate("Euler update produced a non-finite coordinate");

    EulerStepResult res{DiscreteMeasure(std::move(moved), alpha_k.weights()),
                        std::move(sol), StepDiagnostics{}};
    res.diag = diagnostics_for(alpha_k, res.solution);
    return res;
}

TheoryBounds bounds_for_config(const SimulationConfig& config) {
    const DiscreteMeasure alpha = config.alpha0.realize();
    const DiscreteMeasure mu0 = config.mu0.realize();
    double r0 = std::max(support_radius(alpha), support_radius(mu0));
    if (config.alpha0.ball) r0 = std::max(r0, config.alpha0.ball->radius);
    if (config.mu0.ball) r0 = std::max(r0, config.mu0.ball->radius);
    return compute_bounds(config.drift, config.epsilon, config.horizon, r0);
}

Trajectory simulate(const SimulationConfig& config) {
    config.validate();
    const long steps = config.step_count();

    DiscreteMeasure alpha = config.alpha0.realize();
    const DiscreteMeasure mu0 = config.mu0.realize();
    if (alpha.dim() != config.dimension || mu0.dim() != config.dimension)
        throw ValidationError("dimension", "measures do not match the configured dimension");

    const TheoryBounds bounds = bounds_for_config(config);

    auto traj = std::make_shared<Trajectory>();
    traj->dimension = config.dimension;

    SinkhornOptions opts;
    opts.tol = config.sinkhorn_tol;
    opts.max_iter = config.sinkhorn_max_iter;

    for (long k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * config.tau;
        const bool want_snapshot = (k % config.snapshot_stride == 0) || k == steps;
        const double radius = support_radius(alpha);
        if (radius > bounds.r_t * (1.0 + 1e-9))
            throw SupportBoundViolated(
                "support radius " + std::to_string(radius) + " exceeds " +
                    std::to_string(bounds.r_t) + " at step " + std::to_string(k),
                traj, k);
        if (radius > bounds.r_paper * (1.0 + 1e-9)) traj->soft_radius_warnings++;

        if (k == steps) {
            // Final snapshot still reports the transport diagnostics.
            SchrodingerSolution sol = sinkhorn_solve(alpha, mu0, config.epsilon, opts);
            traj->snapshots.push_back(Snapshot{t, alpha, diagnostics_for(alpha, sol)});
            break;
        }

        EulerStepResult step = euler_step(alpha, mu0, config.drift, config.epsilon,
                                          config.tau, opts);
        if (want_snapshot)
            traj->snapshots.push_back(Snapshot{t, alpha, step.diag});
        if (config.warm_start) {
            opts.warm_v = step.solution.v();
            opts.warm_u = step.solution.u();
        }
        alpha = std::move(step.next);
    }
    return *traj;
}

} // namespace sgflow
