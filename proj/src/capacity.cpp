#include "qlink/capacity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace qlink {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

void require_finite_nonnegative(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
        throw DomainError(std::string(what) + " must be finite and non-negative, got " +
                          std::to_string(v));
    }
}

// x * ln(1 + 1/x) without overflow at small x or cancellation at large x.
double x_log1p_inv(double x) {
    if (x == 0.0) return 0.0;
    if (x >= 1.0) return x * std::log1p(1.0 / x);
    return x * (std::log1p(x) - std::log(x));
}

// Natural-log entropy: g(x) * ln 2.
double g_nats(double x) { return std::log1p(x) + x_log1p_inv(x); }

}  // namespace

void validate(const NoisyChannel& ch) {
    require_finite_nonnegative(ch.tau, "channel transmittance tau");
    require_finite_nonnegative(ch.nu, "channel excess noise nu");
}

InputPower::InputPower(double n_bar) : n_bar_(n_bar) {
    if (!std::isfinite(n_bar) || n_bar <= 0.0) {
        throw DomainError("input power n_bar must be finite and positive, got " +
                          std::to_string(n_bar));
    }
}

std::string_view to_string(Criterion c) {
    switch (c) {
        case Criterion::Shannon: return "shannon";
        case Criterion::Holevo: return "holevo";
    }
    return "unknown";
}

Criterion parse_criterion(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lower == "shannon") return Criterion::Shannon;
    if (lower == "holevo") return Criterion::Holevo;
    throw std::invalid_argument("unknown criterion '" + std::string(name) +
                                "' (expected shannon or holevo)");
}

double g_function(double x) {
    require_finite_nonnegative(x, "g(x) argument");
    return g_nats(x) * kInvLn2;
}

double shannon_se(const NoisyChannel& ch, InputPower p) {
    validate(ch);
    return std::log1p(ch.tau * p.value() / (1.0 + ch.nu)) * kInvLn2;
}

double holevo_se(const NoisyChannel& ch, InputPower p) {
    validate(ch);
    const double signal = ch.tau * p.value();
    const double nu = ch.nu;
    if (nu == 0.0) return g_nats(signal) * kInvLn2;
    if (signal == 0.0) return 0.0;
    const double out = nu + signal;
    if (signal >= nu) return std::max(0.0, g_nats(out) - g_nats(nu)) * kInvLn2;

    // Weak signal on a noisy channel: g(nu + s) - g(nu) regrouped so the
    // large g(nu) terms cancel analytically,
    //   (nu+1) ln(1 + s/(nu+1)) - nu ln(1 + s/nu) + s ln(1 + 1/(nu+s)).
    const double head = (nu + 1.0) * std::log1p(signal / (nu + 1.0));
    const double noise_term = nu * std::log1p(signal / nu);
    const double tail = signal * std::log1p(1.0 / out);
    return std::max(0.0, head - noise_term + tail) * kInvLn2;
}

double spectral_efficiency(Criterion c, const NoisyChannel& ch, InputPower p) {
    return c == Criterion::Shannon ? shannon_se(ch, p) : holevo_se(ch, p);
}

double asymptotic_gap() { return std::numbers::log2e; }

}  // namespace qlink
