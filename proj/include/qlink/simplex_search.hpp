#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qlink {

using Objective = std::function<double(std::span<const double>)>;

struct SimplexOptions {
    std::size_t max_evaluations = 10000;
    /// Stop when the spread of objective values over the simplex is below
    /// this and the simplex fits inside a box of half-width x_tolerance.
    double f_tolerance = 1e-13;
    double x_tolerance = 1e-8;
    /// Per-coordinate offsets of the initial simplex vertices; empty means 1.
    std::vector<double> initial_step;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Nelder-Mead minimization. Uses the dimension-adaptive coefficients of
/// Gao and Han for n > 2 and the classical (1, 2, 1/2, 1/2) otherwise.
/// NaN objective values are treated as +infinity. Fully deterministic.
[[nodiscard]] SimplexResult minimize_simplex(const Objective& f, std::vector<double> x0,
                                             const SimplexOptions& options);

}  // namespace qlink
