#ifndef SGFLOW_MEASURES_HPP
#define SGFLOW_MEASURES_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>

#include "sgflow/errors.hpp"

namespace sgflow {

using Point = Eigen::VectorXd;

// A weighted point cloud on R^d. Immutable after construction; weights are
// nonnegative and sum to 1 (renormalized on input if the deviation is below
// 1e-9, rejected otherwise; maintained to 1e-12 internally).
class DiscreteMeasure {
public:
    // points: n x d, one atom per row. weights: length n.
    DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights);

    Eigen::Index size() const { return points_.rows(); }
    Eigen::Index dim() const { return points_.cols(); }
    const Eigen::MatrixXd& points() const { return points_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    Point point(Eigen::Index i) const { return points_.row(i).transpose(); }

    bool operator==(const DiscreteMeasure& other) const;

private:
    Eigen::MatrixXd points_;
    Eigen::VectorXd weights_;
};

// Closed ball B_R in R^d.
struct BallSpec {
    double radius = 1.0;
    int dimension = 3;
};

// Convenience constructor from per-atom vectors; validates like the
// matrix form.
DiscreteMeasure make_discrete(const std::vector<Point>& points,
                              const std::vector<double>& weights);

// M i.i.d. uniform samples in the ball (rejection from the bounding cube),
// each with weight 1/M. Pure function of (spec, count, seed).
DiscreteMeasure quantize_uniform_ball(const BallSpec& spec, int count, std::uint64_t seed);

// Image measure under a pointwise map. Weights are kept as-is; atoms with
// coincident images are not merged.
DiscreteMeasure pushforward(const DiscreteMeasure& m,
                            const std::function<Point(const Point&)>& map);

// max_i |x_i|
double support_radius(const DiscreteMeasure& m);

// 1-d projection onto a coordinate axis, canonicalized: coordinates sorted
// ascending and exactly-equal atoms merged (weights summed in encounter
// order) so that equality comparison is well defined.
DiscreteMeasure marginal_along_axis(const DiscreteMeasure& m, int axis);

} // namespace sgflow

#endif
