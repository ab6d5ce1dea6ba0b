#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "combcalc/error.hpp"
#include "combcalc/quadrature.hpp"
#include "support/generators.hpp"

using namespace combcalc;

namespace {

// Legendre P_n(x) by the three-term recurrence.
double legendre(int n, double x) {
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) return p0;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

} // namespace

TEST_CASE("Gauss-Legendre rules") {
    CHECK_THROWS_AS(gauss_legendre(0), DomainError);
    const GaussRule one = gauss_legendre(1);
    CHECK(one.nodes.at(0) == 0.0);
    CHECK(one.weights.at(0) == 2.0);
    const GaussRule two = gauss_legendre(2);
    CHECK(std::abs(two.nodes[1] - 1.0 / std::sqrt(3.0)) <= 1e-15);

    for (int order = 1; order <= 32; ++order) {
        const GaussRule r = gauss_legendre(order);
        REQUIRE(r.nodes.size() == static_cast<std::size_t>(order));
        double wsum = 0.0;
        for (int i = 0; i < order; ++i) {
            CHECK(std::abs(legendre(order, r.nodes[static_cast<std::size_t>(i)])) <= 1e-13);
            CHECK(r.weights[static_cast<std::size_t>(i)] > 0.0);
            if (i > 0) CHECK(r.nodes[static_cast<std::size_t>(i)] > r.nodes[static_cast<std::size_t>(i - 1)]);
            wsum += r.weights[static_cast<std::size_t>(i)];
        }
        CHECK(std::abs(wsum - 2.0) <= 1e-13);
    }
}

TEST_CASE("rules are exact up to degree 2*order-1") {
    for (int order = 1; order <= 16; ++order) {
        const GaussRule r = gauss_legendre(order);
        for (int deg = 0; deg <= 2 * order - 1; ++deg) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
            const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            CHECK(std::abs(s - exact) <= 1e-13);
        }
    }
}

TEST_CASE("compensated summation") {
    CompensatedSum s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i) s.add(1e-16);
    s.add(-1.0);
    CHECK(std::abs(s.value() - 1e-13) <= 1e-20);
}

TEST_CASE("tensor-product integrals") {
    const CombSpace r23({2, 3}, 1);
    const CompiledExpr f(parse("x1^3 * x1_2^2 + x2_3", r23), r23);
    const std::vector<double> base(4, 0.0);
    const std::vector<Axis> axes{{0, 0.0, 1.0}, {1, 0.0, 2.0}, {2, -1.0, 1.0}, {3, 0.0, 1.0}};
    // (1/4)(8/3)(2)(1) + (1)(2)(2)(1/2)
    const double exact = 4.0 / 3.0 + 2.0;
    for (int cells : {1, 3}) {
        const QuadratureOptions q{4, cells};
        CHECK(std::abs(integrate_serial(f, base, axes, q) - exact) <= 1e-12);
        CHECK(std::abs(integrate_parallel(f, base, axes, q) - exact) <= 1e-12);
    }

    const std::vector<double> at{0.5, 2.0, 0.0, 7.0};
    CHECK(integrate_serial(f, at, {}, {}) == 7.5);
    CHECK(integrate_parallel(f, at, {}, {}) == 7.5);

    const CompiledExpr s(parse("sin(x1)", r23), r23);
    const std::vector<Axis> one{{0, 0.0, std::numbers::pi}};
    CHECK(std::abs(integrate_serial(s, base, one, {16, 1}) - 2.0) <= 1e-14);
}

TEST_CASE("parallel result equals the serial reference") {
    const CombSpace r23({2, 3}, 1);
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const CompiledExpr f(testing_support::random_smooth(r23, rng, 4), r23);
        const std::vector<double> base(4, 0.25);
        std::vector<Axis> axes;
        const int dims = testing_support::uniform_int(rng, 1, 4);
        for (int d = 0; d < dims; ++d) axes.push_back({d, -0.5, testing_support::uniform(rng, 0.0, 1.0)});
        const QuadratureOptions q{testing_support::uniform_int(rng, 2, 10), testing_support::uniform_int(rng, 1, 3)};
        const double serial = integrate_serial(f, base, axes, q);
        const double parallel = integrate_parallel(f, base, axes, q);
        CHECK(std::abs(serial - parallel) <= 1e-12 * std::max(1.0, std::abs(serial)));
        CHECK(integrate_parallel(f, base, axes, q) == parallel);
    }
}

TEST_CASE("evaluation errors propagate from parallel workers") {
    const CombSpace r1 = CombSpace::euclidean(1);
    const CompiledExpr f(parse("1 / (x1 - x1)", r1), r1);
    const std::vector<double> base{0.0};
    const std::vector<Axis> axes{{0, 0.0, 1.0}};
    CHECK_THROWS_AS(integrate_serial(f, base, axes, {64, 64}), EvalError);
    CHECK_THROWS_AS(integrate_parallel(f, base, axes, {64, 64}), EvalError);
}
