#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qlink/capacity.hpp"
#include "qlink/link_model.hpp"

namespace qlink {

enum class GainMode {
    Saturating,  ///< every gain pinned to saturating_gain; spans are the only variables
    Free,        ///< gains are variables too, projected into [1, G_sat]
};

struct OptimizerSettings {
    int starts = 8;
    std::uint64_t seed = 1;
    /// Objective calls per start; 0 selects 200 * (dim + 1)^2 where dim is
    /// the node count (Saturating) or twice the node count (Free).
    std::size_t evaluation_budget = 0;
    /// Objective values within this many bits count as ties.
    double tie_tolerance = 1e-9;
};

struct OptimizationProblem {
    double total_length_km = 0.0;
    int node_count = 0;
    double alpha_per_km = 0.05;
    InputPower n_bar{100.0};
    Criterion criterion = Criterion::Holevo;
    GainMode gain_mode = GainMode::Saturating;
    OptimizerSettings settings;

    void validate() const;
};

struct OptimizationResult {
    LinkConfig config;
    double se = 0.0;
    Criterion criterion = Criterion::Holevo;
    bool converged = false;
    std::size_t evaluations = 0;
    std::vector<double> constraint_margins;

    /// Spans L_1..L_N followed by the tail L_{N+1}.
    [[nodiscard]] std::vector<double> spans_with_tail() const;
    /// Cumulative amplifier positions measured from the link input.
    [[nodiscard]] std::vector<double> node_positions_km() const;
};

/// Maximizes the chosen spectral efficiency over amplifier locations (and,
/// in Free mode, gains) for a fixed node count and total length.
///
/// Spans live on the simplex sum(L_i) = L through a softmax map of N
/// unconstrained coordinates, searched by Nelder-Mead with restarts from:
/// equal spacing, a near-zero tail, and settings.starts - 2 Dirichlet(1)
/// points drawn from a seeded generator. The exact loss-only vertex is also
/// scored. Candidates within tie_tolerance of the best are ranked by longer
/// tail, then lexicographically smaller span vector.
///
/// Running out of budget is reported through `converged = false`.
[[nodiscard]] OptimizationResult optimize(const OptimizationProblem& problem);

/// Exhaustive search over span compositions on a grid of `grid_step_km`
/// with saturating gains. Limited to N <= 3; throws std::invalid_argument
/// beyond that or for a non-positive step.
[[nodiscard]] OptimizationResult brute_force_grid(const OptimizationProblem& problem,
                                                  double grid_step_km);

struct LossOnlyThreshold {
    double length_km = 0.0;
    double attenuation_db = 0.0;
};

/// Bisects (to 0.01 km) for the link length at which the Holevo-optimal
/// N-node configuration first beats the loss-only channel by > 1e-9 bits.
[[nodiscard]] LossOnlyThreshold loss_only_threshold(double alpha_per_km, InputPower n_bar,
                                                    int node_count,
                                                    const OptimizerSettings& settings = {});

struct GainGap {
    double gain = 0.0;
    double saturating_gain = 0.0;
    /// |G_sat - G| / G_sat
    double relative_gap = 0.0;
};

struct MaxGainReport {
    std::vector<GainGap> nodes;
    bool holds = true;
};

/// Compares each node's gain with the saturating gain at that node, given the
/// actual gains upstream. The rule holds when every gap is <= 1e-4.
[[nodiscard]] MaxGainReport verify_max_gain_rule(const OptimizationResult& result);

}  // namespace qlink
