#ifndef SGFLOW_DYNAMICS_HPP
#define SGFLOW_DYNAMICS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sgflow/entropic.hpp"
#include "sgflow/measures.hpp"

namespace sgflow {

// The linear drift A of the velocity field A(x - barycenter). Rows that
// are exactly zero are remembered so the stepper can skip those
// coordinates entirely, which turns conservation of the corresponding
// marginal into a bitwise identity.
struct DriftMatrix {
    Eigen::MatrixXd A;
    bool is_skew = false;
    std::vector<bool> zero_rows;
};

DriftMatrix make_drift(Eigen::MatrixXd A);

// The 3x3 rotation block (A12 = -1, A21 = 1, third row and column zero).
DriftMatrix make_J();

// How an initial measure is specified: either given explicitly or
// quantized from the uniform distribution on a ball.
struct MeasureSpec {
    std::optional<DiscreteMeasure> explicit_measure;
    std::optional<BallSpec> ball;
    int count = 0;
    std::uint64_t seed = 0;
    std::string source_file; // nonempty when loaded from a file, for echoing

    DiscreteMeasure realize() const;
};

struct SimulationConfig {
    int dimension = 3;
    DriftMatrix drift;
    double epsilon = 0.0;
    double tau = 0.0;
    double horizon = 0.0;
    MeasureSpec alpha0;
    MeasureSpec mu0;
    double sinkhorn_tol = 1e-9;
    long sinkhorn_max_iter = 50000;
    bool warm_start = true;
    long snapshot_stride = 1;

    // N = horizon / tau; throws ValidationError unless integral within 1e-9
    // and snapshot_stride divides it.
    long step_count() const;
    void validate() const;
};

// Constants from the a-priori analysis, evaluated for a concrete run and
// used as runtime assertions on the trajectory.
struct TheoryBounds {
    double r0 = 0.0;          // radius bounding both initial supports
    double drift_norm = 0.0;  // operator norm of A
    double growth_c = 0.0;    // C = max(1, r0) * |A|
    double r_t = 0.0;         // (r0 + 1) e^{C T}, the constructive radius
    double r_paper = 0.0;     // 2 r0 e^{|A| T}, the definition-level radius
    double k_bound = 0.0;     // |A| (1 + 2 r0^2 / eps)
};

TheoryBounds compute_bounds(const DriftMatrix& drift, double epsilon, double horizon,
                            double r0);

// Bounds for a concrete config; r0 is the larger of the declared ball radii
// and the measured initial support radii.
TheoryBounds bounds_for_config(const SimulationConfig& config);

struct StepDiagnostics {
    double ot_value = 0.0;          // OT_eps(alpha_k, mu0)
    double potential_energy = 0.0;  // int x_3 d alpha_k (0 when d < 3)
    double support_radius = 0.0;
    long sinkhorn_iterations = 0;
};

struct Snapshot {
    double time = 0.0;
    DiscreteMeasure measure;
    StepDiagnostics diag;
};

struct Trajectory {
    int dimension = 0;
    std::vector<Snapshot> snapshots;
    // Steps whose support exceeded the definition-level radius 2 r0 e^{|A|T}
    // (soft check; the constructive radius aborts instead).
    long soft_radius_warnings = 0;
};

// Raised when a step escapes the a-priori support ball; carries what was
// integrated so far.
struct SupportBoundViolated : SolveFailure {
    SupportBoundViolated(const std::string& msg, std::shared_ptr<Trajectory> partial,
                         long step)
        : SolveFailure("SupportBoundViolated", msg), partial(std::move(partial)),
          step(step) {}
    std::shared_ptr<Trajectory> partial;
    long step;
};

// B[alpha](x) = A (x - int y gamma(dy|x)) = A grad_v(x).
Point velocity(const SchrodingerSolution& sol, const DriftMatrix& drift, const Point& x);

struct EulerStepResult {
    DiscreteMeasure next;
    SchrodingerSolution solution;
    StepDiagnostics diag;
};

// One explicit Euler step: solve OT_eps(alpha_k, mu0), then move every atom
// by tau * velocity. Coordinates whose drift row is zero are copied
// bitwise. A Sinkhorn failure propagates; the step is not taken.
EulerStepResult euler_step(const DiscreteMeasure& alpha_k, const DiscreteMeasure& mu0,
                           const DriftMatrix& drift, double epsilon, double tau,
                           const SinkhornOptions& opts = {});

// Full N-step run with snapshots every snapshot_stride steps (first and
// last always included) and the support-radius assertions from
// TheoryBounds. Deterministic given the config.
Trajectory simulate(const SimulationConfig& config);

} // namespace sgflow

#endif
