#include "sgflow/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "sgflow/numerics.hpp"

namespace sgflow {

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.rows() < 1)
        throw DimensionMismatch("a measure needs at least one atom");
    if (points_.cols() < 1)
        throw DimensionMismatch("points must have dimension >= 1");
    if (points_.rows() != weights_.size())
        throw DimensionMismatch("point count " + std::to_string(points_.rows()) +
                                " does not match weight count " +
                                std::to_string(weights_.size()));
    if (!points_.allFinite())
        throw NonFinitePoint("points contain NaN or Inf");
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] >= 0.0))
            throw NegativeWeight("weight " + std::to_string(i) + " = " +
                                 std::to_string(weights_[i]));
    }
    const double sum =
        pairwise_sum(std::span<const double>(weights_.data(), weights_.size()));
    if (std::abs(sum - 1.0) > 1e-9)
        throw BadNormalization("weights sum to " + std::to_string(sum));
    // Keep already-normalized weights bitwise intact (pushforward relies on
    // this); renormalize only when the input deviates beyond the internal
    // 1e-12 tolerance.
    if (std::abs(sum - 1.0) > 1e-12) weights_ /= sum;
}

bool DiscreteMeasure::operator==(const DiscreteMeasure& other) const {
    return points_.rows() == other.points_.rows() &&
           points_.cols() == other.points_.cols() && points_ == other.points_ &&
           weights_ == other.weights_;
}

DiscreteMeasure make_discrete(const std::vector<Point>& points,
                              const std::vector<double>& weights) {
    if (points.empty())
        throw DimensionMismatch("a measure needs at least one atom");
    if (points.size() != weights.size())
        throw DimensionMismatch("point count does not match weight count");
    const Eigen::Index d = points.front().size();
    Eigen::MatrixXd pts(points.size(), d);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != d)
            throw DimensionMismatch("atom " + std::to_string(i) +
                                    " has inconsistent dimension");
        pts.row(i) = points[i].transpose();
    }
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                          static_cast<Eigen::Index>(weights.size()));
    return DiscreteMeasure(std::move(pts), std::move(w));
}

DiscreteMeasure quantize_uniform_ball(const BallSpec& spec, int count, std::uint64_t seed) {
    if (spec.radius <= 0.0)
        throw ValidationError("ball_radius", "must be positive");
    if (spec.dimension < 1)
        throw ValidationError("dimension", "must be >= 1");
    if (count < 1)
        throw ValidationError("count", "must be >= 1");

    const int d = spec.dimension;
    const double R = spec.radius;
    SplitMix64 rng(seed);
    Eigen::MatrixXd pts(count, d);
    Eigen::VectorXd candidate(d);
    for (int i = 0; i < count; ++i) {
        // Rejection from [-R, R]^d; acceptance >= pi/6 for d <= 3.
        for (;;) {
            double norm2 = 0.0;
            for (int k = 0; k < d; ++k) {
                const double c = R * (2.0 * rng.next_unit() - 1.0);
                candidate[k] = c;
                norm2 += c * c;
            }
            if (norm2 <= R * R) break;
        }
        pts.row(i) = candidate.transpose();
    }
    Eigen::VectorXd w = Eigen::VectorXd::Constant(count, 1.0 / count);
    return DiscreteMeasure(std::move(pts), std::move(w));
}

DiscreteMeasure pushforward(const DiscreteMeasure& m,
                            const std::function<Point(const Point&)>& map) {
    const Eigen::Index n = m.size();
    const Eigen::Index d = m.dim();
    Eigen::MatrixXd out(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        Point y = map(m.point(i));
        if (y.size() != d)
            throw DimensionMismatch("map changed the dimension of atom " +
                                    std::to_string(i));
        if (!y.allFinite())
            throw MapProducedNonFinite("image of atom " + std::to_string(i) +
                                       " is not finite");
        out.row(i) = y.transpose();
    }
    return DiscreteMeasure(std::move(out), m.weights());
}

double support_radius(const DiscreteMeasure& m) {
    double r = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i)
        r = std::max(r, m.points().row(i).norm());
    return r;
}

DiscreteMeasure marginal_along_axis(const DiscreteMeasure& m, int axis) {
    if (axis < 0 || axis >= m.dim())
        throw AxisOutOfRange("axis " + std::to_string(axis) + " for dimension " +
                             std::to_string(m.dim()));
    const Eigen::Index n = m.size();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto coord = [&](Eigen::Index i) { return m.points()(i, axis); };
    // Stable so that merge order (and thus weight-summation order) is the
    // original atom order.
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return coord(a) < coord(b); });
    std::vector<double> xs;
    std::vector<double> ws;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double x = coord(order[k]);
        const double w = m.weights()[order[k]];
        if (!xs.empty() && xs.back() == x) {
            ws.back() += w;
        } else {
            xs.push_back(x);
            ws.push_back(w);
        }
    }
    Eigen::MatrixXd pts(xs.size(), 1);
    Eigen::VectorXd w(ws.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        pts(static_cast<Eigen::Index>(k), 0) = xs[k];
        w[static_cast<Eigen::Index>(k)] = ws[k];
    }
    return DiscreteMeasure(std::move(pts), std::move(w));
}

} // namespace sgflow
