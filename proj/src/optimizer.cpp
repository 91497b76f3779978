#include "qlink/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "qlink/simplex_search.hpp"

namespace qlink {

namespace {

constexpr double kMaxGainRuleTolerance = 1e-4;
constexpr double kZeroTailLogit = 10.0;
constexpr double kRestartImprovement = 1e-12;
constexpr double kThresholdResolutionKm = 0.01;

struct Candidate {
    LinkConfig config;
    double se = 0.0;
    bool converged = false;
};

// Softmax of (z_1..z_N, 0) scaled to the total length.
void spans_from_logits(std::span<const double> z, double total, std::vector<double>& spans) {
    const std::size_t n = z.size();
    spans.resize(n + 1);
    double shift = 0.0;
    for (double v : z) shift = std::max(shift, v);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        spans[i] = std::exp(z[i] - shift);
        sum += spans[i];
    }
    spans[n] = std::exp(-shift);
    sum += spans[n];
    for (double& s : spans) s = total * (s / sum);
}

double fraction_or_clamp(double u) { return std::clamp(u, 0.0, 1.0); }

// Link whose gain at node i is 1 + u_i (G_sat,i - 1), u_i projected to [0,1].
LinkConfig projected_config(double alpha, InputPower n_bar, std::span<const double> spans,
                            std::span<const double> fractions) {
    LinkConfig cfg{alpha, n_bar, {}, spans.back()};
    const std::size_t n = spans.size() - 1;
    cfg.stages.reserve(n);
    NoisyChannel ch{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double g_sat = saturating_gain(attenuate(ch, spans[i], alpha), n_bar);
        const double u = fraction_or_clamp(fractions[i]);
        const double gain = u >= 1.0 ? g_sat : 1.0 + u * (g_sat - 1.0);
        cfg.stages.push_back({spans[i], gain});
        ch = propagate_stage(ch, cfg.stages.back(), alpha);
    }
    return cfg;
}

// Allocation-free evaluation of a saturated chain; mirrors saturated_config
// followed by end_to_end. Final results are always re-evaluated on the
// materialized LinkConfig.
double saturated_se(double alpha, InputPower p, Criterion criterion,
                    std::span<const double> spans) {
    const double n_bar = p.value();
    double tau = 1.0;
    double nu = 0.0;
    const std::size_t n = spans.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::exp(-alpha * spans[i]);
        const double pre_tau = t * tau;
        const double pre_nu = t * nu;
        const double g = std::max(1.0, (1.0 + n_bar) / (1.0 + (pre_tau * n_bar + pre_nu)));
        tau = g * pre_tau;
        nu = g * pre_nu + (g - 1.0);
    }
    const double t = std::exp(-alpha * spans[n]);
    return spectral_efficiency(criterion, {t * tau, t * nu}, p);
}

// Dirichlet(1, ..., 1) point expressed as softmax logits relative to the tail.
std::vector<double> random_logits(std::mt19937_64& rng, std::size_t n) {
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<double> e(n + 1);
    for (double& v : e) v = -std::log1p(-unit()) + 1e-300;
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = std::log(e[i]) - std::log(e[n]);
    return z;
}

std::size_t default_budget(std::size_t dim) { return 200 * (dim + 1) * (dim + 1); }

// Picks the winner: highest SE, with candidates inside the tie window ranked
// by longer tail, then lexicographically smaller span vector.
std::size_t select_candidate(const std::vector<Candidate>& candidates, double tie_tolerance) {
    double best_se = -std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) best_se = std::max(best_se, c.se);
    std::size_t chosen = candidates.size();
    auto spans_of = [](const LinkConfig& cfg) {
        std::vector<double> s;
        for (const auto& st : cfg.stages) s.push_back(st.span_km);
        return s;
    };
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].se < best_se - tie_tolerance) continue;
        if (chosen == candidates.size()) {
            chosen = i;
            continue;
        }
        const auto& a = candidates[i].config;
        const auto& b = candidates[chosen].config;
        if (a.tail_span_km != b.tail_span_km) {
            if (a.tail_span_km > b.tail_span_km) chosen = i;
            continue;
        }
        if (spans_of(a) < spans_of(b)) chosen = i;
    }
    return chosen;
}

OptimizationResult finish(const Candidate& c, Criterion criterion, std::size_t evaluations) {
    OptimizationResult r;
    r.config = c.config;
    r.se = evaluate(r.config, criterion);
    r.criterion = criterion;
    r.converged = c.converged;
    r.evaluations = evaluations;
    r.constraint_margins = check_power_constraint(r.config);
    return r;
}

LinkConfig loss_only_vertex(const OptimizationProblem& p) {
    std::vector<double> spans(static_cast<std::size_t>(p.node_count) + 1, 0.0);
    spans.back() = p.total_length_km;
    return saturated_config(p.alpha_per_km, p.n_bar, spans);
}

}  // namespace

void OptimizationProblem::validate() const {
    if (node_count < 0) throw std::invalid_argument("node_count must be >= 0");
    if (!std::isfinite(total_length_km) || total_length_km < 0.0) {
        throw DomainError("total_length_km must be finite and non-negative");
    }
    if (!std::isfinite(alpha_per_km) || alpha_per_km <= 0.0) {
        throw DomainError("alpha_per_km must be finite and positive");
    }
    if (settings.starts < 1) throw std::invalid_argument("at least one start is required");
}

std::vector<double> OptimizationResult::spans_with_tail() const {
    std::vector<double> s;
    s.reserve(config.stages.size() + 1);
    for (const auto& st : config.stages) s.push_back(st.span_km);
    s.push_back(config.tail_span_km);
    return s;
}

std::vector<double> OptimizationResult::node_positions_km() const {
    std::vector<double> pos;
    double at = 0.0;
    for (const auto& st : config.stages) {
        at += st.span_km;
        pos.push_back(at);
    }
    return pos;
}

OptimizationResult optimize(const OptimizationProblem& problem) {
    problem.validate();
    const auto n = static_cast<std::size_t>(problem.node_count);
    const double length = problem.total_length_km;
    const double alpha = problem.alpha_per_km;
    const InputPower n_bar = problem.n_bar;
    const Criterion criterion = problem.criterion;
    const bool free_gains = problem.gain_mode == GainMode::Free;

    std::vector<Candidate> candidates;
    candidates.push_back({loss_only_vertex(problem), 0.0, true});
    candidates.back().se = evaluate(candidates.back().config, criterion);
    if (n == 0 || length == 0.0) return finish(candidates.front(), criterion, 1);

    const std::size_t dim = free_gains ? 2 * n : n;
    const std::size_t budget = problem.settings.evaluation_budget > 0
                                   ? problem.settings.evaluation_budget
                                   : default_budget(dim);

    std::vector<double> spans;
    Objective objective;
    if (free_gains) {
        objective = [&](std::span<const double> x) {
            spans_from_logits(x.first(n), length, spans);
            return -evaluate(projected_config(alpha, n_bar, spans, x.subspan(n)), criterion);
        };
    } else {
        objective = [&](std::span<const double> x) {
            spans_from_logits(x, length, spans);
            return -saturated_se(alpha, n_bar, criterion, spans);
        };
    }
    auto config_at = [&](std::span<const double> x) {
        spans_from_logits(x.first(n), length, spans);
        if (free_gains) return projected_config(alpha, n_bar, spans, x.subspan(n));
        return saturated_config(alpha, n_bar, spans);
    };

    std::vector<std::vector<double>> starts;
    starts.emplace_back(n, 0.0);
    if (problem.settings.starts > 1) starts.emplace_back(n, kZeroTailLogit);
    std::mt19937_64 rng(problem.settings.seed);
    while (starts.size() < static_cast<std::size_t>(problem.settings.starts)) {
        starts.push_back(random_logits(rng, n));
    }

    SimplexOptions options;
    options.initial_step.assign(n, 1.0);
    if (free_gains) {
        for (auto& s : starts) s.resize(2 * n, 0.5);
        options.initial_step.resize(2 * n, 0.25);
    }

    std::size_t evaluations = 1;
    bool any_converged = false;
    for (const auto& start : starts) {
        std::vector<double> x = start;
        double value = std::numeric_limits<double>::infinity();
        bool converged = false;
        std::size_t used = 0;
        while (used < budget) {
            options.max_evaluations = budget - used;
            SimplexResult r = minimize_simplex(objective, x, options);
            used += r.evaluations;
            const double improvement = value - r.value;
            x = std::move(r.x);
            value = std::min(value, r.value);
            if (!r.converged) break;
            if (improvement <= kRestartImprovement) {
                converged = true;
                break;
            }
        }
        evaluations += used;
        any_converged = any_converged || converged;
        Candidate c{config_at(x), 0.0, converged};
        c.se = evaluate(c.config, criterion);
        candidates.push_back(std::move(c));
    }
    candidates.front().converged = any_converged;

    const std::size_t chosen = select_candidate(candidates, problem.settings.tie_tolerance);
    return finish(candidates[chosen], criterion, evaluations);
}

OptimizationResult brute_force_grid(const OptimizationProblem& problem, double grid_step_km) {
    problem.validate();
    if (problem.node_count > 3) {
        throw std::invalid_argument("brute_force_grid is limited to N <= 3, got N=" +
                                    std::to_string(problem.node_count));
    }
    if (!std::isfinite(grid_step_km) || grid_step_km <= 0.0) {
        throw std::invalid_argument("grid_step_km must be positive");
    }
    const auto n = static_cast<std::size_t>(problem.node_count);
    const double length = problem.total_length_km;
    const auto cells = static_cast<long long>(std::floor(length / grid_step_km + 1e-9));

    std::vector<double> spans(n + 1);
    std::size_t evaluations = 0;

    // Visits every composition k_1 + ... + k_N <= cells in lexicographic
    // order; the tail takes whatever length is left.
    auto for_each_point = [&](auto&& visit) {
        auto recurse = [&](auto&& self, std::size_t depth, long long used) -> void {
            if (depth == n) {
                spans[n] = std::max(0.0, length - static_cast<double>(used) * grid_step_km);
                visit();
                return;
            }
            for (long long k = 0; used + k <= cells; ++k) {
                spans[depth] = static_cast<double>(k) * grid_step_km;
                self(self, depth + 1, used + k);
            }
        };
        recurse(recurse, 0, 0);
    };

    double best_se = -std::numeric_limits<double>::infinity();
    for_each_point([&] {
        ++evaluations;
        best_se = std::max(best_se,
                           saturated_se(problem.alpha_per_km, problem.n_bar, problem.criterion, spans));
    });

    std::vector<Candidate> finalists;
    for_each_point([&] {
        const double se = saturated_se(problem.alpha_per_km, problem.n_bar, problem.criterion, spans);
        if (se >= best_se - problem.settings.tie_tolerance) {
            Candidate c{saturated_config(problem.alpha_per_km, problem.n_bar, spans), 0.0, true};
            c.se = evaluate(c.config, problem.criterion);
            finalists.push_back(std::move(c));
        }
    });
    const std::size_t chosen = select_candidate(finalists, problem.settings.tie_tolerance);
    return finish(finalists[chosen], problem.criterion, evaluations);
}

LossOnlyThreshold loss_only_threshold(double alpha_per_km, InputPower n_bar, int node_count,
                                      const OptimizerSettings& settings) {
    if (node_count < 1) throw std::invalid_argument("loss_only_threshold needs N >= 1");
    if (!std::isfinite(alpha_per_km) || alpha_per_km <= 0.0) {
        throw DomainError("alpha_per_km must be finite and positive");
    }
    auto amplification_helps = [&](double length) {
        OptimizationProblem p{length,       node_count,       alpha_per_km, n_bar,
                              Criterion::Holevo, GainMode::Saturating, settings};
        const OptimizationResult r = optimize(p);
        const double loss_only = holevo_se({std::exp(-alpha_per_km * length), 0.0}, n_bar);
        return r.se > loss_only + 1e-9;
    };

    double lo = 0.0;
    double hi = 1.0 / alpha_per_km;
    while (!amplification_helps(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e4 / alpha_per_km) {
            throw std::runtime_error("no loss-only crossover below " + std::to_string(hi) + " km");
        }
    }
    while (hi - lo > kThresholdResolutionKm) {
        const double mid = 0.5 * (lo + hi);
        (amplification_helps(mid) ? hi : lo) = mid;
    }
    const double length = 0.5 * (lo + hi);
    return {length, attenuation_db(length, alpha_per_km)};
}

MaxGainReport verify_max_gain_rule(const OptimizationResult& result) {
    MaxGainReport report;
    const LinkConfig& cfg = result.config;
    NoisyChannel ch{1.0, 0.0};
    for (const auto& stage : cfg.stages) {
        GainGap gap;
        gap.gain = stage.gain;
        const double n_bar = cfg.n_bar.value();
        const double power = attenuate(ch, stage.span_km, cfg.alpha_per_km).total_power(n_bar);
        gap.saturating_gain = std::max(1.0, (1.0 + n_bar) / (1.0 + power));
        gap.relative_gap = std::abs(gap.saturating_gain - gap.gain) / gap.saturating_gain;
        report.holds = report.holds && gap.relative_gap <= kMaxGainRuleTolerance;
        report.nodes.push_back(gap);
        ch = propagate_stage(ch, stage, cfg.alpha_per_km);
    }
    return report;
}

}  // namespace qlink
