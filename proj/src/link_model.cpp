#include "qlink/link_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qlink {

namespace {

// 10 / ln(10): dB per neper of power attenuation.
constexpr double kDbPerNeper = 10.0 / std::numbers::ln10;

void require_nonnegative_length(double length_km, const char* what) {
    if (!std::isfinite(length_km) || length_km < 0.0) {
        throw DomainError(std::string(what) + " must be finite and non-negative, got " +
                          std::to_string(length_km));
    }
}

}  // namespace

double LinkConfig::total_length_km() const {
    double total = 0.0;
    for (const auto& s : stages) total += s.span_km;
    return total + tail_span_km;
}

void LinkConfig::validate() const {
    if (!std::isfinite(alpha_per_km) || alpha_per_km <= 0.0) {
        throw DomainError("alpha_per_km must be finite and positive, got " +
                          std::to_string(alpha_per_km));
    }
    require_nonnegative_length(tail_span_km, "tail_span_km");
    for (std::size_t i = 0; i < stages.size(); ++i) {
        require_nonnegative_length(stages[i].span_km, "stage span_km");
        if (!std::isfinite(stages[i].gain) || stages[i].gain < 1.0) {
            throw DomainError("stage " + std::to_string(i + 1) + " gain must be >= 1, got " +
                              std::to_string(stages[i].gain));
        }
    }
}

NoisyChannel attenuate(const NoisyChannel& ch, double length_km, double alpha_per_km) {
    const double t = std::exp(-alpha_per_km * length_km);
    return {t * ch.tau, t * ch.nu};
}

NoisyChannel propagate_stage(const NoisyChannel& ch, const AmplifierStage& stage,
                             double alpha_per_km) {
    const NoisyChannel pre = attenuate(ch, stage.span_km, alpha_per_km);
    const double g = stage.gain;
    return {g * pre.tau, g * pre.nu + (g - 1.0)};
}

NoisyChannel end_to_end(const LinkConfig& cfg) {
    NoisyChannel ch{1.0, 0.0};
    for (const auto& stage : cfg.stages) ch = propagate_stage(ch, stage, cfg.alpha_per_km);
    return attenuate(ch, cfg.tail_span_km, cfg.alpha_per_km);
}

std::vector<NoisyChannel> node_outputs(const LinkConfig& cfg) {
    std::vector<NoisyChannel> out;
    out.reserve(cfg.stages.size());
    NoisyChannel ch{1.0, 0.0};
    for (const auto& stage : cfg.stages) {
        ch = propagate_stage(ch, stage, cfg.alpha_per_km);
        out.push_back(ch);
    }
    return out;
}

double saturating_gain(const NoisyChannel& pre_amp, InputPower p) {
    validate(pre_amp);
    const double n_bar = p.value();
    const double power = pre_amp.total_power(n_bar);
    if (power > n_bar + kFeasibilityTolerance) {
        throw ConstraintViolation("power entering amplifier (" + std::to_string(power) +
                                  ") already exceeds the cap n_bar=" + std::to_string(n_bar));
    }
    return std::max(1.0, (1.0 + n_bar) / (1.0 + power));
}

std::vector<double> check_power_constraint(const LinkConfig& cfg) {
    const double n_bar = cfg.n_bar.value();
    std::vector<double> margins;
    margins.reserve(cfg.stages.size());
    for (const auto& ch : node_outputs(cfg)) margins.push_back(n_bar - ch.total_power(n_bar));
    return margins;
}

bool is_feasible(std::span<const double> margins, double tolerance) {
    for (double m : margins) {
        if (!(m >= -tolerance)) return false;
    }
    return true;
}

double attenuation_db(double length_km, double alpha_per_km) {
    require_nonnegative_length(length_km, "length_km");
    return kDbPerNeper * alpha_per_km * length_km;
}

double length_for_attenuation_db(double db, double alpha_per_km) {
    return db / (kDbPerNeper * alpha_per_km);
}

double evaluate(const LinkConfig& cfg, Criterion c) {
    return spectral_efficiency(c, end_to_end(cfg), cfg.n_bar);
}

LinkConfig saturated_config(double alpha_per_km, InputPower n_bar,
                            std::span<const double> spans_with_tail) {
    if (spans_with_tail.empty()) throw DomainError("span list must contain at least the tail");
    LinkConfig cfg{alpha_per_km, n_bar, {}, spans_with_tail.back()};
    const std::size_t n = spans_with_tail.size() - 1;
    cfg.stages.reserve(n);
    NoisyChannel ch{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double span = spans_with_tail[i];
        const double gain = saturating_gain(attenuate(ch, span, alpha_per_km), n_bar);
        cfg.stages.push_back({span, gain});
        ch = propagate_stage(ch, cfg.stages.back(), alpha_per_km);
    }
    return cfg;
}

}  // namespace qlink
