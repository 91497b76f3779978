#include <doctest.h>

#include <cmath>
#include <limits>

#include "qlink/simplex_search.hpp"

using namespace qlink;

TEST_CASE("minimize_simplex solves Rosenbrock") {
    auto rosen = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    SimplexOptions opt;
    opt.max_evaluations = 20000;
    opt.initial_step = {0.5, 0.5};
    const SimplexResult r = minimize_simplex(rosen, {-1.2, 1.0}, opt);
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-5);
    CHECK(std::abs(r.x[1] - 1.0) < 1e-5);
    CHECK(r.value < 1e-10);
    CHECK(r.evaluations <= opt.max_evaluations);
}

TEST_CASE("minimize_simplex handles a 10-dimensional quadratic") {
    auto quad = [](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - 0.1 * static_cast<double>(i);
            s += static_cast<double>(i + 1) * d * d;
        }
        return s;
    };
    SimplexOptions opt;
    opt.max_evaluations = 200000;
    const SimplexResult r = minimize_simplex(quad, std::vector<double>(10, 1.0), opt);
    CHECK(r.converged);
    for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(r.x[i] - 0.1 * static_cast<double>(i)) < 1e-5);
}

TEST_CASE("minimize_simplex with zero dimensions evaluates once") {
    int calls = 0;
    auto f = [&](std::span<const double>) {
        ++calls;
        return 3.5;
    };
    const SimplexResult r = minimize_simplex(f, {}, SimplexOptions{});
    CHECK(r.converged);
    CHECK(r.value == 3.5);
    CHECK(r.evaluations == 1);
    CHECK(calls == 1);
}

TEST_CASE("minimize_simplex reports budget exhaustion") {
    auto rosen = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    SimplexOptions opt;
    opt.max_evaluations = 30;
    const SimplexResult r = minimize_simplex(rosen, {-1.2, 1.0}, opt);
    CHECK_FALSE(r.converged);
    CHECK(r.evaluations <= 30);
    CHECK(std::isfinite(r.value));
}

TEST_CASE("minimize_simplex treats NaN as worse than anything") {
    // Undefined for x < 0; minimum at x = 2.
    auto f = [](std::span<const double> x) {
        if (x[0] < 0.0) return std::numeric_limits<double>::quiet_NaN();
        return (x[0] - 2.0) * (x[0] - 2.0);
    };
    SimplexOptions opt;
    opt.initial_step = {-3.0};
    const SimplexResult r = minimize_simplex(f, {1.0}, opt);
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 2.0) < 1e-6);
}

TEST_CASE("minimize_simplex is deterministic") {
    auto f = [](std::span<const double> x) {
        return std::sin(3.0 * x[0]) + std::cos(2.0 * x[1]) + 0.1 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    };
    const SimplexResult a = minimize_simplex(f, {0.3, -0.2, 0.7}, SimplexOptions{});
    const SimplexResult b = minimize_simplex(f, {0.3, -0.2, 0.7}, SimplexOptions{});
    CHECK(a.x == b.x);
    CHECK(a.value == b.value);
    CHECK(a.evaluations == b.evaluations);
}
