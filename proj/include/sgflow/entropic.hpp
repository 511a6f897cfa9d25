#ifndef SGFLOW_ENTROPIC_HPP
#define SGFLOW_ENTROPIC_HPP

#include <Eigen/Core>
#include <optional>

#include "sgflow/measures.hpp"

namespace sgflow {

struct SinkhornOptions {
    double tol = 1e-9;
    long max_iter = 50000;
    // Warm-start potentials; v over alpha's atoms, u over mu's atoms.
    std::optional<Eigen::VectorXd> warm_v;
    std::optional<Eigen::VectorXd> warm_u;
};

// Converged dual potentials of the entropic transport problem between
// alpha and mu with quadratic cost |x-y|^2/2. The Gibbs plan is
//   gamma_ij = alpha_i mu_j exp((v_i + u_j - |x_i-y_j|^2/2) / eps),
// feasible within `marginal_error`, gauged so that sum_j mu_j u_j = 0.
//
// Immutable and shareable; all queries are pure and extend the potentials
// smoothly to arbitrary x, which is what the velocity field needs.
class SchrodingerSolution {
public:
    SchrodingerSolution(DiscreteMeasure alpha, DiscreteMeasure mu, double epsilon,
                        Eigen::VectorXd v, Eigen::VectorXd u,
                        double marginal_error, long iterations);

    const DiscreteMeasure& alpha() const { return alpha_; }
    const DiscreteMeasure& mu() const { return mu_; }
    double epsilon() const { return epsilon_; }
    const Eigen::VectorXd& u() const { return u_; }
    const Eigen::VectorXd& v() const { return v_; }
    double marginal_error() const { return marginal_error_; }
    long iterations() const { return iterations_; }

    // Dense Gibbs plan (n x m).
    Eigen::MatrixXd plan() const;

    // Primal value: 1/2 int |x-y|^2 dgamma + eps H(gamma | alpha (x) mu).
    double ot_value() const;

    // int |x-y|^2 dgamma, the unhalved transport cost of the entropic plan.
    double transport_cost() const;

    // eps + <u, mu> + <v, alpha> - eps * total mass of the Gibbs plan.
    // Equals ot_value at convergence (strong duality), is a lower bound
    // for any potentials (weak duality).
    double dual_value() const;

    // gamma(.|x): conditional weights over mu's atoms for arbitrary x.
    Eigen::VectorXd conditional_plan(const Point& x) const;

    // int y gamma(dy|x)
    Point barycentric(const Point& x) const;

    // grad v(x) = x - barycentric(x)
    Point grad_v(const Point& x) const;

    // D^2 v(x) = Id - eps^{-1} Cov_{gamma(.|x)}(y); symmetric by construction.
    Eigen::MatrixXd hess_v(const Point& x) const;

    // Smooth scalar extension of the potential v to arbitrary x.
    double v_at(const Point& x) const;

private:
    // exponent buffer (u_j - |x-y_j|^2/2)/eps + log mu_j for a query point
    void query_terms(const Point& x, Eigen::VectorXd& terms) const;

    DiscreteMeasure alpha_;
    DiscreteMeasure mu_;
    double epsilon_;
    Eigen::VectorXd v_;
    Eigen::VectorXd u_;
    double marginal_error_;
    long iterations_;
    Eigen::MatrixXd cost_;    // |x_i - y_j|^2 / 2
    Eigen::VectorXd log_a_;   // log alpha_i (-inf allowed)
    Eigen::VectorXd log_b_;   // log mu_j
};

// Alternating log-domain updates of the two potentials until the induced
// plan matches both marginals within tol in max norm (total plan mass is
// verified to the same tolerance). Throws NotConverged after max_iter
// sweeps, carrying the last measured violation.
SchrodingerSolution sinkhorn_solve(const DiscreteMeasure& alpha,
                                   const DiscreteMeasure& mu, double epsilon,
                                   const SinkhornOptions& opts = {});

// H(plan | a (x) b) with the 0 log 0 := 0 convention; +inf when the plan
// puts mass where a (x) b has none.
double relative_entropy(const Eigen::MatrixXd& plan, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b);

} // namespace sgflow

#endif
