#include <doctest.h>

#include <cmath>

#include "sgflow/measures.hpp"

using namespace sgflow;

namespace {

Point pt(std::initializer_list<double> coords) {
    Point p(static_cast<Eigen::Index>(coords.size()));
    Eigen::Index i = 0;
    for (double c : coords) p[i++] = c;
    return p;
}

} // namespace

TEST_CASE("single Dirac is a valid measure") {
    const DiscreteMeasure m = make_discrete({pt({0, 0, 0})}, {1.0});
    CHECK(m.size() == 1);
    CHECK(m.dim() == 3);
    CHECK(m.weights()[0] == 1.0);
}

TEST_CASE("bad weights are rejected") {
    CHECK_THROWS_AS(make_discrete({pt({0.0}), pt({1.0})}, {0.5, 0.6}), BadNormalization);
    CHECK_THROWS_AS(make_discrete({pt({0.0}), pt({1.0})}, {1.0, -1e-3}), NegativeWeight);
    CHECK_THROWS_AS(make_discrete({pt({0.0})}, {1.0, 0.0}), DimensionMismatch);
    CHECK_THROWS_AS(make_discrete({pt({0.0}), pt({1.0, 2.0})}, {0.5, 0.5}),
                    DimensionMismatch);
    const double nan = std::nan("");
    CHECK_THROWS_AS(make_discrete({pt({nan})}, {1.0}), NonFinitePoint);
}

TEST_CASE("small deviations are renormalized, larger ones rejected") {
    const DiscreteMeasure m = make_discrete({pt({0.0}), pt({1.0})}, {0.5, 0.5 + 4e-10});
    const double sum = m.weights().sum();
    CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("quantize_uniform_ball respects support, weight, and determinism") {
    const DiscreteMeasure one = quantize_uniform_ball({1.0, 3}, 1, 7);
    CHECK(one.size() == 1);
    CHECK(one.weights()[0] == 1.0);
    CHECK(support_radius(one) <= 1.0);

    const DiscreteMeasure big = quantize_uniform_ball({2.0, 3}, 1000, 5);
    CHECK(big.size() == 1000);
    CHECK(support_radius(big) <= 2.0);

    const DiscreteMeasure again = quantize_uniform_ball({2.0, 3}, 1000, 5);
    CHECK(big == again);

    const DiscreteMeasure other_seed = quantize_uniform_ball({2.0, 3}, 1000, 6);
    CHECK_FALSE(big == other_seed);
}

TEST_CASE("same seed yields a prefix when the count grows") {
    const DiscreteMeasure small = quantize_uniform_ball({1.0, 3}, 32, 9);
    const DiscreteMeasure large = quantize_uniform_ball({1.0, 3}, 64, 9);
    CHECK(small.points() == large.points().topRows(32));
}

TEST_CASE("pushforward keeps weights and does not merge atoms") {
    const DiscreteMeasure m = make_discrete({pt({1, 0}), pt({0, 2})}, {0.25, 0.75});

    const DiscreteMeasure id = pushforward(m, [](const Point& x) { return x; });
    CHECK(id == m);

    const Point c = pt({3, -1});
    const DiscreteMeasure shifted =
        pushforward(m, [&](const Point& x) { return Point(x + c); });
    CHECK(shifted.weights() == m.weights());
    CHECK(shifted.point(0) == Point(m.point(0) + c));
    CHECK(shifted.point(1) == Point(m.point(1) + c));

    const DiscreteMeasure collapsed =
        pushforward(m, [](const Point& x) { return Point(Point::Zero(x.size())); });
    CHECK(collapsed.size() == 2); // coincident atoms stay separate
    CHECK(collapsed.weights() == m.weights());

    CHECK_THROWS_AS(
        pushforward(m, [](const Point& x) { return Point(x / 0.0); }),
        MapProducedNonFinite);
}

TEST_CASE("support_radius") {
    CHECK(support_radius(make_discrete({pt({0, 0, 0})}, {1.0})) == 0.0);
    CHECK(support_radius(make_discrete({pt({3, 0, 0}), pt({0, -4, 0})}, {0.5, 0.5})) ==
          4.0);
}

TEST_CASE("support radius grows at most by the shift length") {
    const DiscreteMeasure m = quantize_uniform_ball({1.5, 2}, 64, 3);
    const Point c = pt({0.7, -0.2});
    const DiscreteMeasure shifted =
        pushforward(m, [&](const Point& x) { return Point(x + c); });
    CHECK(support_radius(shifted) <= support_radius(m) + c.norm() + 1e-12);
}

TEST_CASE("marginal_along_axis projects, sorts, and merges") {
    const DiscreteMeasure single = make_discrete({pt({1, 2, 3})}, {1.0});
    const DiscreteMeasure m3 = marginal_along_axis(single, 2);
    CHECK(m3.size() == 1);
    CHECK(m3.point(0)[0] == 3.0);

    const DiscreteMeasure two =
        make_discrete({pt({0, 0, 5}), pt({1, 1, 5})}, {0.5, 0.5});
    const DiscreteMeasure merged = marginal_along_axis(two, 2);
    CHECK(merged.size() == 1);
    CHECK(merged.point(0)[0] == 5.0);
    CHECK(merged.weights()[0] == 1.0);

    CHECK_THROWS_AS(marginal_along_axis(two, 3), AxisOutOfRange);
}

TEST_CASE("marginal of a product-structured cloud equals the direct construction") {
    // Atoms on a grid {0,1} x {10, 20, 30} with product weights.
    std::vector<Point> points;
    std::vector<double> weights;
    const double wx[2] = {0.3, 0.7};
    const double wy[3] = {0.2, 0.5, 0.3};
    const double ys[3] = {10, 20, 30};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) {
            points.push_back(pt({static_cast<double>(i), ys[j]}));
            weights.push_back(wx[i] * wy[j]);
        }
    const DiscreteMeasure product = make_discrete(points, weights);
    const DiscreteMeasure marginal = marginal_along_axis(product, 1);
    const DiscreteMeasure direct =
        make_discrete({pt({10}), pt({20}), pt({30})}, {0.2, 0.5, 0.3});
    CHECK(marginal.size() == 3);
    for (int j = 0; j < 3; ++j) {
        CHECK(marginal.point(j)[0] == direct.point(j)[0]);
        CHECK(marginal.weights()[j] == doctest::Approx(direct.weights()[j]).epsilon(1e-15));
    }
}
