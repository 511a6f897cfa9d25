#include "sgflow/exact_ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "sgflow/numerics.hpp"

namespace sgflow {

namespace {

// Bipartite network simplex for the dense transportation problem.
// Nodes 0..n-1 are alpha's atoms, n..n+m-1 are mu's atoms; arc id for the
// pair (i, j) is i*m + j. Pivoting is Bland-style: the entering arc is
// the first eligible id, the leaving arc the smallest id attaining the
// minimum ratio, which rules out cycling.
class TransportSimplex {
public:
    TransportSimplex(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                     const Eigen::MatrixXd& cost)
        : n_(supply.size()), m_(demand.size()), supply_(supply), demand_(demand),
          cost_(cost), flow_(Eigen::MatrixXd::Zero(n_, m_)), adj_(n_ + m_),
          parent_(n_ + m_), parent_arc_(n_ + m_), depth_(n_ + m_), pot_(n_ + m_) {
        const double scale = cost_.size() > 0 ? cost_.cwiseAbs().maxCoeff() : 0.0;
        pivot_tol_ = 1e-13 * std::max(1.0, scale);
    }

    // Returns false if the pivot cap was hit (suspected cycling).
    bool solve() {
        northwest_corner();
        rebuild_tree();
        const long cap = 1000 + 50 * static_cast<long>(n_ + m_) * (n_ + m_);
        for (long pivots = 0; pivots < cap; ++pivots) {
            const long entering = first_negative_arc();
            if (entering < 0) return true;
            pivot(entering);
            rebuild_tree();
        }
        return false;
    }

    const Eigen::MatrixXd& flow() const { return flow_; }

private:
    long arc_id(Eigen::Index i, Eigen::Index j) const { return i * m_ + j; }
    Eigen::Index arc_row(long id) const { return id / m_; }
    Eigen::Index arc_col(long id) const { return id % m_; }

    void add_arc(Eigen::Index i, Eigen::Index j) {
        const long id = arc_id(i, j);
        adj_[i].push_back(id);
        adj_[n_ + j].push_back(id);
    }

    void remove_arc(long id) {
        auto drop = [id](std::vector<long>& list) {
            list.erase(std::find(list.begin(), list.end(), id));
        };
        drop(adj_[arc_row(id)]);
        drop(adj_[n_ + arc_col(id)]);
    }

    void northwest_corner() {
        Eigen::Index i = 0, j = 0;
        double arem = supply_[0];
        double brem = demand_[0];
        for (;;) {
            const double f = std::min(arem, brem);
            flow_(i, j) = f;
            add_arc(i, j);
            arem -= f;
            brem -= f;
            if (i == n_ - 1 && j == m_ - 1) break;
            if (arem == 0.0 && i < n_ - 1) {
                ++i;
                arem = supply_[i];
            } else {
                ++j;
                brem = demand_[j];
            }
        }
    }

    // BFS from node 0 recomputing parents, depths, and potentials so that
    // every basic arc has zero reduced cost.
    void rebuild_tree() {
        std::fill(parent_.begin(), parent_.end(), Eigen::Index{-1});
        std::fill(parent_arc_.begin(), parent_arc_.end(), long{-1});
        std::vector<Eigen::Index> queue{0};
        parent_[0] = 0;
        depth_[0] = 0;
        pot_[0] = 0.0;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const Eigen::Index node = queue[q];
            for (long id : adj_[node]) {
                const Eigen::Index row = arc_row(id);
                const Eigen::Index col = n_ + arc_col(id);
                const Eigen::Index other = node == row ? col : row;
                if (parent_[other] != -1) continue;
                parent_[other] = node;
                parent_arc_[other] = id;
                depth_[other] = depth_[node] + 1;
                pot_[other] = cost_(row, arc_col(id)) - pot_[node];
                queue.push_back(other);
            }
        }
    }

    long first_negative_arc() const {
        for (Eigen::Index i = 0; i < n_; ++i) {
            const double pi = pot_[i];
            for (Eigen::Index j = 0; j < m_; ++j) {
                if (cost_(i, j) - pi - pot_[n_ + j] < -pivot_tol_)
                    return arc_id(i, j);
            }
        }
        return -1;
    }

    void pivot(long entering) {
        const Eigen::Index erow = arc_row(entering);
        const Eigen::Index ecol = n_ + arc_col(entering);

        // Tree path from the col endpoint to the row endpoint through the
        // lowest common ancestor; bipartite alternation fixes the signs.
        std::vector<long> up_col, up_row;
        Eigen::Index a = ecol, b = erow;
        while (depth_[a] > depth_[b]) {
            up_col.push_back(parent_arc_[a]);
            a = parent_[a];
        }
        while (depth_[b] > depth_[a]) {
            up_row.push_back(parent_arc_[b]);
            b = parent_[b];
        }
        while (a != b) {
            up_col.push_back(parent_arc_[a]);
            a = parent_[a];
            up_row.push_back(parent_arc_[b]);
            b = parent_[b];
        }
        std::vector<long> path = up_col;
        path.insert(path.end(), up_row.rbegin(), up_row.rend());

        // Arcs at even path positions lose theta, odd positions gain it.
        double theta = std::numeric_limits<double>::infinity();
        long leaving = -1;
        for (std::size_t k = 0; k < path.size(); k += 2) {
            const double f = flow_(arc_row(path[k]), arc_col(path[k]));
            if (f < theta || (f == theta && path[k] < leaving)) {
                theta = f;
                leaving = path[k];
            }
        }
        flow_(erow, arc_col(entering)) += theta;
        for (std::size_t k = 0; k < path.size(); ++k) {
            const double delta = (k % 2 == 0) ? -theta : theta;
            flow_(arc_row(path[k]), arc_col(path[k])) += delta;
        }
        flow_(arc_row(leaving), arc_col(leaving)) = 0.0; // exact, despite fp
        remove_arc(leaving);
        add_arc(erow, arc_col(entering));
    }

    Eigen::Index n_, m_;
    Eigen::VectorXd supply_, demand_;
    Eigen::MatrixXd cost_;
    Eigen::MatrixXd flow_;
    double pivot_tol_;
    std::vector<std::vector<long>> adj_;
    std::vector<Eigen::Index> parent_;
    std::vector<long> parent_arc_;
    std::vector<Eigen::Index> depth_;
    std::vector<double> pot_;
};

} // namespace

ExactOtResult w2_squared_exact(const DiscreteMeasure& alpha, const DiscreteMeasure& mu,
                               long max_cells) {
    if (alpha.dim() != mu.dim())
        throw DimensionMismatch("alpha has dimension " + std::to_string(alpha.dim()) +
                                ", mu has dimension " + std::to_string(mu.dim()));
    const Eigen::Index n = alpha.size();
    const Eigen::Index m = mu.size();
    if (static_cast<long>(n) * static_cast<long>(m) > max_cells)
        throw InstanceTooLarge("instance " + std::to_string(n) + "x" +
                               std::to_string(m) + " exceeds the dense-solver guard of " +
                               std::to_string(max_cells) + " cells");

    Eigen::MatrixXd cost(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            cost(i, j) = (alpha.points().row(i) - mu.points().row(j)).squaredNorm();

    const auto finish = [&](const Eigen::MatrixXd& flow) {
        ExactOtResult res;
        res.coupling.mass = flow;
        std::vector<double> rows(static_cast<std::size_t>(n));
        std::vector<double> row(static_cast<std::size_t>(m));
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < m; ++j)
                row[static_cast<std::size_t>(j)] = flow(i, j) * cost(i, j);
            rows[static_cast<std::size_t>(i)] = pairwise_sum(row);
        }
        res.value = pairwise_sum(rows); // original costs, also after perturbed retry
        return res;
    };

    TransportSimplex simplex(alpha.weights(), mu.weights(), cost);
    if (simplex.solve()) return finish(simplex.flow());

    // Deterministic tiny cost perturbation breaks persistent ties.
    Eigen::MatrixXd perturbed = cost;
    const double xi =
        1e-16 * std::max(1.0, cost.maxCoeff()) / static_cast<double>(n * m + 1);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            perturbed(i, j) += xi * static_cast<double>(i * m + j + 1);
    TransportSimplex retry(alpha.weights(), mu.weights(), perturbed);
    if (!retry.solve()) throw Degenerate("network simplex hit the pivot cap twice");
    return finish(retry.flow());
}

double w2(const DiscreteMeasure& alpha, const DiscreteMeasure& mu, long max_cells) {
    return std::sqrt(std::max(0.0, w2_squared_exact(alpha, mu, max_cells).value));
}

} // namespace sgflow
