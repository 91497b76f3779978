#include "qlink/simplex_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qlink {

namespace {

struct Coefficients {
    double reflect;
    double expand;
    double contract;
    double shrink;
};

Coefficients coefficients_for(std::size_t n) {
    if (n <= 2) return {1.0, 2.0, 0.5, 0.5};
    const double d = static_cast<double>(n);
    return {1.0, 1.0 + 2.0 / d, 0.75 - 1.0 / (2.0 * d), 1.0 - 1.0 / d};
}

}  // namespace

SimplexResult minimize_simplex(const Objective& f, std::vector<double> x0,
                               const SimplexOptions& options) {
    const std::size_t n = x0.size();
    SimplexResult result;

    auto eval = [&](std::span<const double> x) {
        ++result.evaluations;
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    if (n == 0) {
        result.value = eval(x0);
        result.x = std::move(x0);
        result.converged = true;
        return result;
    }

    const Coefficients c = coefficients_for(n);
    std::vector<std::vector<double>> vertex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        const double step = options.initial_step.empty() ? 1.0 : options.initial_step[i];
        vertex[i + 1][i] += step;
    }
    std::vector<double> value(n + 1);
    for (std::size_t j = 0; j <= n; ++j) value[j] = eval(vertex[j]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n), vertex_sum(n);

    // Running sum of all vertices; rebuilt periodically to bound drift.
    std::size_t since_rebuild = 0;
    auto rebuild_sum = [&] {
        std::fill(vertex_sum.begin(), vertex_sum.end(), 0.0);
        for (const auto& v : vertex) {
            for (std::size_t i = 0; i < n; ++i) vertex_sum[i] += v[i];
        }
        since_rebuild = 0;
    };
    rebuild_sum();

    auto point_along = [&](std::vector<double>& out, double t, const std::vector<double>& from) {
        // out = centroid + t * (from - centroid)
        for (std::size_t i = 0; i < n; ++i) out[i] = centroid[i] + t * (from[i] - centroid[i]);
    };

    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[n - 1];

        if (std::abs(value[worst] - value[best]) <= options.f_tolerance) {
            double x_spread = 0.0;
            for (std::size_t j = 0; j <= n; ++j) {
                for (std::size_t i = 0; i < n; ++i) {
                    x_spread = std::max(x_spread, std::abs(vertex[j][i] - vertex[best][i]));
                }
            }
            if (x_spread <= options.x_tolerance) {
                result.converged = true;
                break;
            }
        }
        if (result.evaluations >= options.max_evaluations) break;

        if (++since_rebuild > 8 * (n + 1)) rebuild_sum();
        for (std::size_t i = 0; i < n; ++i) {
            centroid[i] = (vertex_sum[i] - vertex[worst][i]) / static_cast<double>(n);
        }
        auto replace_worst = [&](const std::vector<double>& x, double fx) {
            for (std::size_t i = 0; i < n; ++i) vertex_sum[i] += x[i] - vertex[worst][i];
            vertex[worst] = x;
            value[worst] = fx;
        };

        point_along(trial, -c.reflect, vertex[worst]);
        const double f_reflect = eval(trial);

        if (f_reflect < value[best]) {
            point_along(trial2, -c.reflect * c.expand, vertex[worst]);
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                replace_worst(trial2, f_expand);
            } else {
                replace_worst(trial, f_reflect);
            }
            continue;
        }
        if (f_reflect < value[second_worst]) {
            replace_worst(trial, f_reflect);
            continue;
        }

        const bool outside = f_reflect < value[worst];
        if (outside) {
            point_along(trial2, -c.reflect * c.contract, vertex[worst]);
        } else {
            point_along(trial2, c.contract, vertex[worst]);
        }
        const double f_contract = eval(trial2);
        if (f_contract < (outside ? f_reflect : value[worst])) {
            replace_worst(trial2, f_contract);
            continue;
        }

        for (std::size_t j = 0; j <= n; ++j) {
            if (j == best) continue;
            for (std::size_t i = 0; i < n; ++i) {
                vertex[j][i] = vertex[best][i] + c.shrink * (vertex[j][i] - vertex[best][i]);
            }
            value[j] = eval(vertex[j]);
        }
        rebuild_sum();
    }

    const auto best_it = std::min_element(value.begin(), value.end());
    const auto best = static_cast<std::size_t>(best_it - value.begin());
    result.x = vertex[best];
    result.value = value[best];
    return result;
}

}  // namespace qlink
