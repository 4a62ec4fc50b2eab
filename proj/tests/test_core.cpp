#include "fwflow/core.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace fwflow;
using testutil::vec;

namespace {

std::vector<FeasibleSet> sample_sets() {
    std::vector<Vector> tri{vec({0, 0}), vec({1, 0}), vec({0, 1})};
    std::vector<Vector> cube;
    for (int b = 0; b < 8; ++b) cube.push_back(vec({double(b & 1), double((b >> 1) & 1), double((b >> 2) & 1)}));
    return {FeasibleSet::l1_ball(6, 2.0),          FeasibleSet::box(vec({-1, 0, 2}), vec({1, 3, 2.5})),
            FeasibleSet::simplex(5, 3.0),          FeasibleSet::l2_ball(4, 1.5),
            FeasibleSet::polytope(tri),            FeasibleSet::polytope(cube)};
}

std::vector<Objective> sample_objectives(Rng& rng) {
    const int n = 6;
    Matrix A(8, n);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    Matrix F(30, n);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < n; ++j) F(i, j) = rng.normal();
    Vector labels(30);
    for (int i = 0; i < 30; ++i) labels[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return {Objective::quadratic(A, testutil::random_vector(rng, 8)),
            Objective::least_squares_target(testutil::random_vector(rng, n)), Objective::logistic(F, labels),
            Objective::huber_toy(0.1, n)};
}

}  // namespace

TEST_CASE("lmo examples") {
    CHECK(FeasibleSet::l1_ball(3, 2.0).lmo(vec({3, -4, 1})) == vec({0, 2, 0}));
    CHECK(FeasibleSet::box(2, -1.0, 1.0).lmo(vec({0.5, -2})) == vec({-1, 1}));
    CHECK(FeasibleSet::simplex(3, 1.0).lmo(vec({3, 1, 2})) == vec({0, 1, 0}));
    const Vector s = FeasibleSet::l2_ball(2, 5.0).lmo(vec({3, 4}));
    CHECK(s[0] == doctest::Approx(-3.0).epsilon(1e-15));
    CHECK(s[1] == doctest::Approx(-4.0).epsilon(1e-15));
}

TEST_CASE("lmo tie-breaking on a zero gradient") {
    const Vector zero = Vector::Zero(3);
    CHECK(FeasibleSet::box(3, -1.0, 1.0).lmo(zero) == vec({-1, -1, -1}));
    CHECK(FeasibleSet::l1_ball(3, 2.0).lmo(zero) == vec({-2, 0, 0}));
    CHECK(FeasibleSet::simplex(3, 1.0).lmo(zero) == vec({1, 0, 0}));
    CHECK(FeasibleSet::l2_ball(3, 1.0).lmo(zero) == vec({-1, 0, 0}));
    // Equal magnitudes: lowest index wins.
    CHECK(FeasibleSet::l1_ball(3, 1.0).lmo(vec({1, -1, 1})) == vec({-1, 0, 0}));
}

TEST_CASE("membership examples") {
    CHECK(membership(FeasibleSet::l1_ball(2, 1.0), vec({0.5, 0.5}), 0.0));
    CHECK_FALSE(membership(FeasibleSet::l1_ball(2, 1.0), vec({0.6, 0.6}), 0.0));
    CHECK(membership(FeasibleSet::l2_ball(2, 1.0), vec({1, 0}), 0.0));
    CHECK_FALSE(membership(FeasibleSet::simplex(2, 1.0), vec({0.5, 0.6}), 1e-12));
    CHECK(membership(FeasibleSet::simplex(2, 1.0), vec({0.5, 0.5}), 1e-12));
    CHECK_FALSE(membership(FeasibleSet::box(2, 0.0, 1.0), vec({0.5, 1.1}), 1e-9));
}

TEST_CASE("polytope membership via distance to the hull") {
    std::vector<Vector> tri{vec({0, 0}), vec({1, 0}), vec({0, 1})};
    const auto set = FeasibleSet::polytope(tri);
    CHECK(set.contains(vec({0.2, 0.3}), 1e-12));
    CHECK(set.contains(vec({0.5, 0.5}), 1e-12));
    CHECK_FALSE(set.contains(vec({0.6, 0.6}), 1e-9));
    // Distance from (1,1) to the hypotenuse is 1/sqrt(2).
    CHECK(distance_to_hull(tri, vec({1, 1})) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(distance_to_hull(tri, vec({-3, -4})) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(distance_to_hull(tri, vec({2, -1})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("objective examples") {
    const auto h = Objective::huber_toy(0.1);
    CHECK(h.value(vec({0.05})) == doctest::Approx(0.00125).epsilon(1e-14));
    CHECK(h.gradient(vec({0.05}))[0] == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(h.value(vec({1.0})) == doctest::Approx(0.095).epsilon(1e-14));
    CHECK(h.gradient(vec({1.0}))[0] == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(h.gradient(vec({-1.0}))[0] == doctest::Approx(-0.1).epsilon(1e-14));

    const auto q = Objective::quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
    CHECK(q.value(vec({1, 0})) == 0.5);
    CHECK(q.gradient(vec({1, 0})) == vec({1, 0}));
    CHECK(q.curvature(vec({-2, 0})).value() == 4.0);
    CHECK_FALSE(h.curvature(vec({1})).has_value());
}

TEST_CASE("diameters are exact") {
    CHECK(FeasibleSet::l1_ball(4, 1.5).diameter() == doctest::Approx(3.0));
    CHECK(FeasibleSet::box(vec({0, 0}), vec({3, 4})).diameter() == doctest::Approx(5.0));
    CHECK(FeasibleSet::simplex(3, 2.0).diameter() == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(FeasibleSet::l2_ball(3, 0.5).diameter() == doctest::Approx(1.0));
    CHECK(FeasibleSet::polytope({vec({0, 0}), vec({1, 0}), vec({0, 1})}).diameter() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("dimension mismatches are rejected") {
    CHECK_THROWS_AS(FeasibleSet::l1_ball(3, 1.0).lmo(Vector::Zero(2)), DimensionError);
    CHECK_THROWS_AS(FeasibleSet::box(2, 0.0, 1.0).contains(Vector::Zero(3)), DimensionError);
    CHECK_THROWS_AS(Objective::least_squares_target(Vector::Zero(2)).value(Vector::Zero(3)), DimensionError);
    CHECK_THROWS_AS(Objective::quadratic(Matrix::Zero(3, 2), Vector::Zero(2)), DimensionError);
    CHECK_THROWS_AS(FeasibleSet::polytope({vec({0, 0}), vec({1})}), DimensionError);
    CHECK_THROWS(FeasibleSet::polytope({}));
}

TEST_CASE("property: lmo minimizes the linear functional and stays feasible") {
    Rng rng(7, "lmo-property");
    for (const auto& set : sample_sets()) {
        CAPTURE(set.name());
        std::vector<Vector> competitors;
        if (const auto* p = std::get_if<Polytope>(&set.variant())) {
            competitors = p->vertices;
        } else {
            for (int i = 0; i < 1000; ++i) competitors.push_back(testutil::random_feasible(rng, set));
        }
        for (int trial = 0; trial < 1000; ++trial) {
            const Vector g = testutil::random_vector(rng, set.dimension());
            const Vector s = set.lmo(g);
            REQUIRE(membership(set, s, 1e-12));
            const double best = g.dot(s);
            for (const auto& v : competitors) REQUIRE(best <= g.dot(v) + 1e-12);
            // Positive homogeneity, same tie-breaking path.
            REQUIRE(testutil::bitwise_equal(set.lmo(2.0 * g), s));
        }
    }
}

TEST_CASE("property: gradients match central differences") {
    Rng rng(11, "fd");
    for (const auto& obj : sample_objectives(rng)) {
        CAPTURE(obj.name());
        for (int trial = 0; trial < 100; ++trial) {
            const Vector x = testutil::random_vector(rng, obj.dimension(), 0.5);
            const Vector g = obj.gradient(x);
            const Vector fd = testutil::fd_gradient(obj, x);
            const double rel = (g - fd).norm() / std::max(g.norm(), 1e-3);
            REQUIRE(rel <= 1e-6);
            const auto vg = obj.value_and_grad(x);
            REQUIRE(vg.value == obj.value(x));
            REQUIRE(vg.grad == g);
        }
    }
}

TEST_CASE("property: huber toy is continuous across the kink and 1-Lipschitz") {
    for (double eps : {1e-3, 0.1, 0.7}) {
        const auto h = Objective::huber_toy(eps);
        for (double side : {1.0, -1.0}) {
            const double kink = side * eps;
            const Vector below = vec({std::nextafter(kink, 0.0)});
            const Vector above = vec({std::nextafter(kink, side * 2)});
            CHECK(std::abs(h.value(below) - h.value(above)) <= 1e-14);
            CHECK(std::abs(h.gradient(below)[0] - h.gradient(above)[0]) <= 1e-14);
        }
        Rng rng(3, "lipschitz");
        for (int i = 0; i < 200; ++i) {
            const double a = 4 * rng.uniform() - 2, b = 4 * rng.uniform() - 2;
            CHECK(std::abs(h.value(vec({a})) - h.value(vec({b}))) <= std::abs(a - b) + 1e-15);
        }
    }
}

TEST_CASE("logistic loss stays finite at extreme margins") {
    Matrix F(2, 1);
    F << 1e4, -1e4;
    const auto obj = Objective::logistic(F, vec({1, 1}));
    for (double x : {-1e3, -1.0, 0.0, 1.0, 1e3}) {
        const auto vg = obj.value_and_grad(vec({x}));
        CHECK(std::isfinite(vg.value));
        CHECK(vg.grad.allFinite());
    }
    // One sample at margin t: log(1 + e^{-t}) at t = 0 is log 2.
    Matrix one(1, 1);
    one << 1.0;
    CHECK(Objective::logistic(one, vec({1})).value(vec({0})) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("objective metadata") {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = 3;
    A(1, 1) = 1;
    const auto q = Objective::quadratic(A, Vector::Zero(2));
    CHECK(q.smoothness().value() == doctest::Approx(9.0));
    CHECK(q.strong_convexity().value() == doctest::Approx(1.0));
    CHECK(Objective::huber_toy(0.2).smoothness().value() == 1.0);
    CHECK(q.is_quadratic());
    CHECK_FALSE(Objective::huber_toy(0.2).is_quadratic());
}

TEST_CASE("support_of") {
    CHECK(support_of(vec({0, 1e-9, -2, 0})) == std::vector<int>{1, 2});
    CHECK(support_of(vec({0, 1e-9, -2, 0}), 1e-8) == std::vector<int>{2});
}

TEST_CASE("rng streams are reproducible and component-separated") {
    Rng a(42, "matrix"), b(42, "matrix"), c(42, "support");
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        differs |= x != c.next();
    }
    CHECK(differs);
    // First SplitMix64 output from state 0.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    Rng r(5);
    double sum = 0, sq = 0;
    for (int i = 0; i < 20000; ++i) {
        const double z = r.normal();
        sum += z;
        sq += z * z;
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
    CHECK(std::abs(sum / 20000) < 0.05);
    CHECK(std::abs(sq / 20000 - 1.0) < 0.05);
    for (int i = 0; i < 1000; ++i) REQUIRE(r.below(7) < 7);
}
