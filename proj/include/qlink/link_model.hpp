#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "qlink/capacity.hpp"

namespace qlink {

/// Default feasibility tolerance on node margins, photons/(s*Hz).
inline constexpr double kFeasibilityTolerance = 1e-9;

/// Raised when an operation would push the total PSD above the input cap.
class ConstraintViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One regeneration node: the fiber span preceding it and its power gain.
struct AmplifierStage {
    double span_km = 0.0;
    double gain = 1.0;

    friend bool operator==(const AmplifierStage&, const AmplifierStage&) = default;
};

/// A full point-to-point link. `alpha_per_km` is in natural-log units, i.e.
/// the power transmittance of a span of length L is exp(-alpha*L).
/// An empty stage list is the loss-only channel.
struct LinkConfig {
    double alpha_per_km = 0.05;
    InputPower n_bar{100.0};
    std::vector<AmplifierStage> stages;
    double tail_span_km = 0.0;

    [[nodiscard]] double total_length_km() const;

    /// Throws DomainError when an invariant is broken (alpha <= 0, negative
    /// spans, gains below 1, non-finite values).
    void validate() const;
};

/// Pure fiber loss over `length_km`; scales both tau and nu.
[[nodiscard]] NoisyChannel attenuate(const NoisyChannel& ch, double length_km, double alpha_per_km);

/// Fiber span followed by a quantum-limited phase-insensitive amplifier:
///   tau' = G e^{-aL} tau,  nu' = G e^{-aL} nu + G - 1.
[[nodiscard]] NoisyChannel propagate_stage(const NoisyChannel& ch, const AmplifierStage& stage,
                                           double alpha_per_km);

/// Folds all stages from (tau=1, nu=0) and applies the unamplified tail.
[[nodiscard]] NoisyChannel end_to_end(const LinkConfig& cfg);

/// Channel at the output of every amplifier, in order (size N).
[[nodiscard]] std::vector<NoisyChannel> node_outputs(const LinkConfig& cfg);

/// Largest gain that keeps the post-amplifier PSD at the cap:
/// G = (1 + n_bar) / (1 + tau'*n_bar + nu'), where (tau', nu') is the channel
/// entering the amplifier. Throws ConstraintViolation if that channel already
/// carries more than n_bar (beyond kFeasibilityTolerance).
[[nodiscard]] double saturating_gain(const NoisyChannel& pre_amp, InputPower p);

/// Margins n_bar - (tau_i n_bar + nu_i) at each amplifier output. Between
/// nodes the total PSD only decays, so the node outputs are the only places
/// the cap can be exceeded.
[[nodiscard]] std::vector<double> check_power_constraint(const LinkConfig& cfg);

[[nodiscard]] bool is_feasible(std::span<const double> margins,
                               double tolerance = kFeasibilityTolerance);

/// Attenuation of `length_km` of fiber in dB: 10 log10(e^{alpha L}).
[[nodiscard]] double attenuation_db(double length_km, double alpha_per_km);

/// Inverse of attenuation_db.
[[nodiscard]] double length_for_attenuation_db(double db, double alpha_per_km);

/// Spectral efficiency of the link under the chosen criterion.
[[nodiscard]] double evaluate(const LinkConfig& cfg, Criterion c);

/// Builds a link with the given spans (L_1..L_N followed by the tail
/// L_{N+1}) and every gain set by saturating_gain.
[[nodiscard]] LinkConfig saturated_config(double alpha_per_km, InputPower n_bar,
                                          std::span<const double> spans_with_tail);

}  // namespace qlink
