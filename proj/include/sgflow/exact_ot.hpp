#ifndef SGFLOW_EXACT_OT_HPP
#define SGFLOW_EXACT_OT_HPP

#include <Eigen/Core>

#include "sgflow/measures.hpp"

namespace sgflow {

// Dense transport plan with row sums = alpha weights and column sums =
// mu weights (each within 1e-9).
struct Coupling {
    Eigen::MatrixXd mass;
};

struct ExactOtResult {
    double value = 0.0;
    Coupling coupling;
};

inline constexpr long kExactOtMaxCells = 1'000'000;

// Transportation LP with cost |x_i - y_j|^2, solved by network simplex on
// the dense bipartite graph with deterministic (first eligible arc in
// fixed arc order) pivoting. Desk-scale oracle: refuses instances with
// n*m > max_cells.
ExactOtResult w2_squared_exact(const DiscreteMeasure& alpha, const DiscreteMeasure& mu,
                               long max_cells = kExactOtMaxCells);

// sqrt of the optimal value above.
double w2(const DiscreteMeasure& alpha, const DiscreteMeasure& mu,
          long max_cells = kExactOtMaxCells);

} // namespace sgflow

#endif
