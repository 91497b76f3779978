#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qlink {

/// Raised when an argument lies outside the domain of a formula
/// (negative or non-finite photon numbers, transmittances, lengths).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// End-to-end (or partial) phase-insensitive Gaussian channel.
///
/// `tau` is the power transmittance of the signal and `nu` the excess-noise
/// power spectral density in photons/(s*Hz) on top of the shot noise. Both
/// must be finite and non-negative. The type does not enforce the total
/// power cap; intermediate pre-amplifier states are legitimately below it
/// and arbitrary test channels may be above it.
struct NoisyChannel {
    double tau = 1.0;
    double nu = 0.0;

    /// Total output PSD for a given input PSD: tau*n_bar + nu.
    [[nodiscard]] double total_power(double n_bar) const { return tau * n_bar + nu; }

    friend bool operator==(const NoisyChannel&, const NoisyChannel&) = default;
};

/// Throws DomainError unless both channel parameters are finite and >= 0.
void validate(const NoisyChannel& ch);

/// Input signal power spectral density n_bar in photons/(s*Hz); strictly positive.
class InputPower {
public:
    explicit InputPower(double n_bar);

    [[nodiscard]] double value() const { return n_bar_; }

    friend bool operator==(const InputPower&, const InputPower&) = default;

private:
    double n_bar_;
};

enum class Criterion { Shannon, Holevo };

[[nodiscard]] std::string_view to_string(Criterion c);

/// Accepts "shannon" / "holevo" (case-insensitive).
[[nodiscard]] Criterion parse_criterion(std::string_view name);

/// Entropy of a thermal state with mean photon number x, in bits:
/// g(x) = log2(1+x) + x*log2(1+1/x), with g(0) = 0.
[[nodiscard]] double g_function(double x);

/// Spectral efficiency with shot-noise limited coherent detection of both
/// quadratures, log2(1 + tau*n_bar/(1+nu)).
[[nodiscard]] double shannon_se(const NoisyChannel& ch, InputPower p);

/// Ultimate (Holevo) spectral efficiency g(tau*n_bar + nu) - g(nu).
[[nodiscard]] double holevo_se(const NoisyChannel& ch, InputPower p);

[[nodiscard]] double spectral_efficiency(Criterion c, const NoisyChannel& ch, InputPower p);

/// Limit of holevo_se - shannon_se for a loss-only channel as tau*n_bar grows: log2(e).
[[nodiscard]] double asymptotic_gap();

}  // namespace qlink
