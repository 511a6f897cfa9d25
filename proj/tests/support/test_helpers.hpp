// Shared test utilities: deterministic random instances and independent
// brute-force oracles. Everything here deliberately avoids the library's
// solver code paths so the checks stay two-sided.
#ifndef SGFLOW_TEST_HELPERS_HPP
#define SGFLOW_TEST_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sgflow/entropic.hpp"
#include "sgflow/measures.hpp"
#include "sgflow/numerics.hpp"

namespace sgtest {

inline sgflow::DiscreteMeasure random_measure(int n, int d, double radius,
                                              std::uint64_t seed,
                                              bool equal_weights = false) {
    sgflow::SplitMix64 rng(seed);
    Eigen::MatrixXd pts(n, d);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k)
            pts(i, k) = radius * (2.0 * rng.next_unit() - 1.0) / std::sqrt(double(d));
    Eigen::VectorXd w(n);
    if (equal_weights) {
        w.setConstant(1.0 / n);
    } else {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            w[i] = 0.05 + rng.next_unit();
            sum += w[i];
        }
        w /= sum;
    }
    return sgflow::DiscreteMeasure(std::move(pts), std::move(w));
}

inline double diameter(const sgflow::DiscreteMeasure& a, const sgflow::DiscreteMeasure& b) {
    double diam = 0.0;
    const auto update = [&](const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            for (Eigen::Index j = 0; j < q.rows(); ++j)
                diam = std::max(diam, (p.row(i) - q.row(j)).norm());
    };
    update(a.points(), a.points());
    update(a.points(), b.points());
    update(b.points(), b.points());
    return diam;
}

// Primal objective 1/2 int |x-y|^2 dplan + eps H(plan | alpha x mu),
// evaluated directly from the points (independent of the solver's cached
// cost matrix).
inline double entropic_objective(const Eigen::MatrixXd& plan,
                                 const sgflow::DiscreteMeasure& alpha,
                                 const sgflow::DiscreteMeasure& mu, double eps) {
    double cost = 0.0;
    for (Eigen::Index i = 0; i < plan.rows(); ++i)
        for (Eigen::Index j = 0; j < plan.cols(); ++j)
            cost += 0.5 * plan(i, j) *
                    (alpha.points().row(i) - mu.points().row(j)).squaredNorm();
    return cost + eps * sgflow::relative_entropy(plan, alpha.weights(), mu.weights());
}

inline Eigen::MatrixXd product_plan(const sgflow::DiscreteMeasure& alpha,
                                    const sgflow::DiscreteMeasure& mu) {
    return alpha.weights() * mu.weights().transpose();
}

// Minimum of sum_i |x_i - y_sigma(i)|^2 / n over all permutations.
inline double brute_force_w2_squared(const sgflow::DiscreteMeasure& alpha,
                                     const sgflow::DiscreteMeasure& mu) {
    const Eigen::Index n = alpha.size();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            total += (alpha.points().row(i) - mu.points().row(perm[static_cast<std::size_t>(i)]))
                         .squaredNorm();
        best = std::min(best, total / static_cast<double>(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Dense grid search (with two refinement passes) over the one-parameter
// family of feasible 2x2 plans with both marginals (1/2, 1/2).
inline Eigen::MatrixXd grid_search_2x2(const sgflow::DiscreteMeasure& alpha,
                                       const sgflow::DiscreteMeasure& mu, double eps) {
    const auto objective = [&](double s) {
        Eigen::MatrixXd plan(2, 2);
        plan << s, 0.5 - s, 0.5 - s, s;
        return entropic_objective(plan, alpha, mu, eps);
    };
    double lo = 1e-12, hi = 0.5 - 1e-12;
    double best_s = lo;
    for (int pass = 0; pass < 3; ++pass) {
        double best = std::numeric_limits<double>::infinity();
        const int steps = 20000;
        for (int k = 0; k <= steps; ++k) {
            const double s = lo + (hi - lo) * k / steps;
            const double f = objective(s);
            if (f < best) {
                best = f;
                best_s = s;
            }
        }
        const double width = (hi - lo) / steps * 4.0;
        lo = std::max(1e-12, best_s - width);
        hi = std::min(0.5 - 1e-12, best_s + width);
    }
    Eigen::MatrixXd plan(2, 2);
    plan << best_s, 0.5 - best_s, 0.5 - best_s, best_s;
    return plan;
}

} // namespace sgtest

#endif
