#include "sgflow/entropic.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "sgflow/numerics.hpp"

namespace sgflow {

namespace {

Eigen::MatrixXd half_sq_dist(const DiscreteMeasure& alpha, const DiscreteMeasure& mu) {
    const Eigen::Index n = alpha.size();
    const Eigen::Index m = mu.size();
    Eigen::MatrixXd c(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            c(i, j) = 0.5 * (alpha.points().row(i) - mu.points().row(j)).squaredNorm();
    return c;
}

Eigen::VectorXd log_weights(const DiscreteMeasure& m) {
    Eigen::VectorXd lw(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i)
        lw[i] = m.weights()[i] > 0.0 ? std::log(m.weights()[i])
                                     : -std::numeric_limits<double>::infinity();
    return lw;
}

} // namespace

SchrodingerSolution::SchrodingerSolution(DiscreteMeasure alpha, DiscreteMeasure mu,
                                         double epsilon, Eigen::VectorXd v,
                                         Eigen::VectorXd u, double marginal_error,
                                         long iterations)
    : alpha_(std::move(alpha)), mu_(std::move(mu)), epsilon_(epsilon),
      v_(std::move(v)), u_(std::move(u)), marginal_error_(marginal_error),
      iterations_(iterations), cost_(half_sq_dist(alpha_, mu_)),
      log_a_(log_weights(alpha_)), log_b_(log_weights(mu_)) {
    if (epsilon_ <= 0.0)
        throw EpsilonNonPositive("epsilon = " + std::to_string(epsilon_));
    if (v_.size() != alpha_.size() || u_.size() != mu_.size())
        throw DimensionMismatch("potential lengths do not match atom counts");
}

Eigen::MatrixXd SchrodingerSolution::plan() const {
    const Eigen::Index n = alpha_.size();
    const Eigen::Index m = mu_.size();
    Eigen::MatrixXd g(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            g(i, j) = std::exp((v_[i] + u_[j] - cost_(i, j)) / epsilon_ +
                               log_a_[i] + log_b_[j]);
    return g;
}

double SchrodingerSolution::ot_value() const {
    const Eigen::MatrixXd g = plan();
    const Eigen::Index n = g.rows();
    const Eigen::Index m = g.cols();
    std::vector<double> row(m);
    std::vector<double> rows(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) row[j] = g(i, j) * cost_(i, j);
        rows[i] = pairwise_sum(row);
    }
    const double half_cost = pairwise_sum(rows);
    return half_cost + epsilon_ * relative_entropy(g, alpha_.weights(), mu_.weights());
}

double SchrodingerSolution::transport_cost() const {
    const Eigen::MatrixXd g = plan();
    const Eigen::Index n = g.rows();
    const Eigen::Index m = g.cols();
    std::vector<double> row(m);
    std::vector<double> rows(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) row[j] = g(i, j) * 2.0 * cost_(i, j);
        rows[i] = pairwise_sum(row);
    }
    return pairwise_sum(rows);
}

double SchrodingerSolution::dual_value() const {
    const Eigen::Index n = alpha_.size();
    const Eigen::Index m = mu_.size();
    std::vector<double> buf(static_cast<std::size_t>(std::max(n, m)));
    for (Eigen::Index j = 0; j < m; ++j) buf[j] = mu_.weights()[j] * u_[j];
    const double int_u = pairwise_sum(std::span<const double>(buf.data(), m));
    for (Eigen::Index i = 0; i < n; ++i) buf[i] = alpha_.weights()[i] * v_[i];
    const double int_v = pairwise_sum(std::span<const double>(buf.data(), n));

    const Eigen::MatrixXd g = plan();
    std::vector<double> rows(n);
    std::vector<double> row(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) row[j] = g(i, j);
        rows[i] = pairwise_sum(row);
    }
    const double mass = pairwise_sum(rows);
    return epsilon_ + int_u + int_v - epsilon_ * mass;
}

void SchrodingerSolution::query_terms(const Point& x, Eigen::VectorXd& terms) const {
    if (x.size() != mu_.dim())
        throw DimensionMismatch("query point has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(mu_.dim()));
    if (!x.allFinite()) throw NonFinitePoint("query point is not finite");
    const Eigen::Index m = mu_.size();
    terms.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double c = 0.5 * (x.transpose() - mu_.points().row(j)).squaredNorm();
        terms[j] = (u_[j] - c) / epsilon_ + log_b_[j];
    }
}

Eigen::VectorXd SchrodingerSolution::conditional_plan(const Point& x) const {
    Eigen::VectorXd t;
    query_terms(x, t);
    const double mx = t.maxCoeff();
    Eigen::VectorXd w(t.size());
    for (Eigen::Index j = 0; j < t.size(); ++j) w[j] = std::exp(t[j] - mx);
    const double s = pairwise_sum(std::span<const double>(w.data(), w.size()));
    w /= s;
    return w;
}

Point SchrodingerSolution::barycentric(const Point& x) const {
    const Eigen::VectorXd w = conditional_plan(x);
    const Eigen::Index d = mu_.dim();
    const Eigen::Index m = mu_.size();
    Point b(d);
    std::vector<double> buf(m);
    for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index j = 0; j < m; ++j) buf[j] = w[j] * mu_.points()(j, k);
        b[k] = pairwise_sum(buf);
    }
    return b;
}

Point SchrodingerSolution::grad_v(const Point& x) const {
    return x - barycentric(x);
}

Eigen::MatrixXd SchrodingerSolution::hess_v(const Point& x) const {
    const Eigen::VectorXd w = conditional_plan(x);
    const Eigen::Index d = mu_.dim();
    const Eigen::Index m = mu_.size();
    Point b(d);
    std::vector<double> buf(m);
    for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index j = 0; j < m; ++j) buf[j] = w[j] * mu_.points()(j, k);
        b[k] = pairwise_sum(buf);
    }
    // Centered second moments; filling both triangles keeps it symmetric.
    Eigen::MatrixXd cov(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index l = k; l < d; ++l) {
            for (Eigen::Index j = 0; j < m; ++j)
                buf[j] = w[j] * (mu_.points()(j, k) - b[k]) * (mu_.points()(j, l) - b[l]);
            const double c = pairwise_sum(buf);
            cov(k, l) = c;
            cov(l, k) = c;
        }
    }
    return Eigen::MatrixXd::Identity(d, d) - cov / epsilon_;
}

double SchrodingerSolution::v_at(const Point& x) const {
    Eigen::VectorXd t;
    query_terms(x, t);
    return -epsilon_ * logsumexp(std::span<const double>(t.data(), t.size()));
}

double relative_entropy(const Eigen::MatrixXd& plan, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b) {
    const Eigen::Index n = plan.rows();
    const Eigen::Index m = plan.cols();
    if (a.size() != n || b.size() != m)
        throw DimensionMismatch("plan shape does not match marginal lengths");
    std::vector<double> row(m);
    std::vector<double> rows(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double p = plan(i, j);
            if (p < 0.0) throw NegativeWeight("plan entry is negative");
            if (p == 0.0) {
                row[j] = 0.0; // 0 log 0 := 0
            } else {
                const double q = a[i] * b[j];
                if (q == 0.0) return std::numeric_limits<double>::infinity();
                row[j] = p * std::log(p / q);
            }
        }
        rows[i] = pairwise_sum(row);
    }
    return pairwise_sum(rows);
}

SchrodingerSolution sinkhorn_solve(const DiscreteMeasure& alpha,
                                   const DiscreteMeasure& mu, double epsilon,
                                   const SinkhornOptions& opts) {
    if (epsilon <= 0.0)
        throw EpsilonNonPositive("epsilon = " + std::to_string(epsilon));
    if (!(opts.tol > 0.0))
        throw InvalidSolverOption("tol must be positive");
    if (opts.max_iter < 1)
        throw InvalidSolverOption("max_iter must be >= 1");
    if (alpha.dim() != mu.dim())
        throw DimensionMismatch("alpha has dimension " + std::to_string(alpha.dim()) +
                                ", mu has dimension " + std::to_string(mu.dim()));

    const Eigen::Index n = alpha.size();
    const Eigen::Index m = mu.size();
    const Eigen::MatrixXd cost = half_sq_dist(alpha, mu);
    const Eigen::VectorXd la = log_weights(alpha);
    const Eigen::VectorXd lb = log_weights(mu);

    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
    bool have_potentials = false;
    if (opts.warm_v && opts.warm_u) {
        if (opts.warm_v->size() != n || opts.warm_u->size() != m)
            throw DimensionMismatch("warm-start potential lengths do not match");
        v = *opts.warm_v;
        u = *opts.warm_u;
        have_potentials = true;
    }

    // Cost scaled by 1/eps once, in both layouts so each pass scans
    // contiguously; the inner loops are then a subtract and an exp per entry.
    using RowMajorMat =
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajorMat ce_rows = cost / epsilon;              // (n, m)
    const RowMajorMat ce_cols = ce_rows.transpose().eval();  // (m, n)

    // v-hat over alpha's atoms given u (Schroedinger update restricted to
    // the atoms, log-sum-exp with running max).
    Eigen::VectorXd vhat(n), uhat(m);
    Eigen::VectorXd shifted_u(m), shifted_v(n);
    const auto row_update = [&](Eigen::VectorXd& out) {
        for (Eigen::Index j = 0; j < m; ++j) shifted_u[j] = u[j] / epsilon + lb[j];
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
            thread_local std::vector<double> t;
            t.resize(static_cast<std::size_t>(m));
            for (std::size_t i = b; i < e; ++i) {
                const double* crow = ce_rows.data() + static_cast<Eigen::Index>(i) * m;
                for (Eigen::Index j = 0; j < m; ++j)
                    t[static_cast<std::size_t>(j)] = shifted_u[j] - crow[j];
                out[static_cast<Eigen::Index>(i)] =
                    -epsilon * logsumexp(std::span<const double>(t.data(), t.size()));
            }
        });
    };
    const auto col_update = [&](Eigen::VectorXd& out) {
        for (Eigen::Index i = 0; i < n; ++i) shifted_v[i] = v[i] / epsilon + la[i];
        parallel_for(static_cast<std::size_t>(m), [&](std::size_t b, std::size_t e) {
            thread_local std::vector<double> t;
            t.resize(static_cast<std::size_t>(n));
            for (std::size_t j = b; j < e; ++j) {
                const double* ccol = ce_cols.data() + static_cast<Eigen::Index>(j) * n;
                for (Eigen::Index i = 0; i < n; ++i)
                    t[static_cast<std::size_t>(i)] = shifted_v[i] - ccol[i];
                out[static_cast<Eigen::Index>(j)] =
                    -epsilon * logsumexp(std::span<const double>(t.data(), t.size()));
            }
        });
    };

    // Row mass of the current plan is alpha_i exp((v_i - vhat_i)/eps), so a
    // fresh vhat doubles as the feasibility check; likewise for columns.
    const auto row_violation = [&]() {
        double err = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = alpha.weights()[i];
            err = std::max(err, std::abs(a * std::expm1((v[i] - vhat[i]) / epsilon)));
        }
        return err;
    };
    const auto col_violation = [&]() {
        double err = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double b = mu.weights()[j];
            err = std::max(err, std::abs(b * std::expm1((u[j] - uhat[j]) / epsilon)));
        }
        return err;
    };
    const auto plan_mass_error = [&]() {
        std::vector<double> masses(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i)
            masses[static_cast<std::size_t>(i)] =
                alpha.weights()[i] * std::exp((v[i] - vhat[i]) / epsilon);
        return std::abs(pairwise_sum(masses) - 1.0);
    };

    double last_err = std::numeric_limits<double>::infinity();
    for (long iter = 0;; ++iter) {
        row_update(vhat);
        if (have_potentials) {
            const double row_err = row_violation();
            last_err = row_err;
            if (row_err <= opts.tol) {
                col_update(uhat);
                const double err =
                    std::max({row_err, col_violation(), plan_mass_error()});
                last_err = err;
                if (err <= opts.tol) {
                    // Gauge: sum_j mu_j u_j = 0; the plan is unchanged.
                    std::vector<double> gb(static_cast<std::size_t>(m));
                    for (Eigen::Index j = 0; j < m; ++j)
                        gb[static_cast<std::size_t>(j)] = mu.weights()[j] * u[j];
                    const double shift = pairwise_sum(gb);
                    u.array() -= shift;
                    v.array() += shift;
                    return SchrodingerSolution(alpha, mu, epsilon, std::move(v),
                                               std::move(u), err, iter);
                }
            }
        }
        if (iter >= opts.max_iter)
            throw NotConverged("Sinkhorn did not reach tol " +
                                   std::to_string(opts.tol) + " in " +
                                   std::to_string(opts.max_iter) + " sweeps",
                               last_err, iter);
        v = vhat;
        col_update(u);
        if (!v.allFinite() || !u.allFinite())
            throw NonFiniteUpdate("Sinkhorn potentials became non-finite");
        have_potentials = true;
    }
}

} // namespace sgflow
