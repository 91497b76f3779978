#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>

#include "qlink/capacity.hpp"

namespace qlink {

/// Gain density gamma(l) in 1/km as a function of position l in km.
using GainProfile = std::function<double(double)>;

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DistributedState {
    double tau = 1.0;
    double nu = 0.0;
    double position_km = 0.0;

    [[nodiscard]] NoisyChannel channel() const { return {tau, nu}; }
};

inline constexpr double kDefaultOdeStepKm = 0.01;

/// Integrates
///   dtau/dl = (gamma(l) - alpha) tau
///   dnu/dl  = (gamma(l) - alpha) nu + gamma(l)
/// from (1, 0) at l = 0 to l = length_km with fixed-step classical RK4.
/// The last step is shortened to land exactly on length_km.
[[nodiscard]] DistributedState ode_propagate(const GainProfile& profile, double alpha_per_km,
                                             double length_km, double step_km = kDefaultOdeStepKm);

/// Gain density that holds the total PSD at n_bar: alpha n_bar / (1 + n_bar).
[[nodiscard]] double constant_power_gain_density(double alpha_per_km, InputPower p);

/// Closed form under constant_power_gain_density:
/// tau(l) = exp(-alpha l / (1 + n_bar)), nu(l) = n_bar (1 - tau(l)).
[[nodiscard]] DistributedState constant_power_solution(double alpha_per_km, InputPower p,
                                                       double length_km);

/// Distributed amplification over total - unamplified, then pure loss over
/// the final `unamplified_km`.
[[nodiscard]] NoisyChannel terminated_channel(double alpha_per_km, InputPower p,
                                              double total_length_km, double unamplified_km);

struct Termination {
    double unamplified_km = 0.0;  ///< L', the unamplified final section
    double se = 0.0;
    std::size_t evaluations = 0;
};

/// Best split of the link into a distributed-amplification section followed
/// by an unamplified section of length L' in [0, total_length_km]. Position
/// tolerance 1e-4 km. Ties go to the longer unamplified section.
[[nodiscard]] Termination optimal_termination(double alpha_per_km, InputPower p,
                                              double total_length_km, Criterion criterion);

/// Shortest link on which distributed amplification beats the loss-only
/// channel by more than 1e-9 bits (Holevo criterion), bisected to 0.01 km.
[[nodiscard]] double distributed_loss_only_threshold_km(double alpha_per_km, InputPower p);

}  // namespace qlink
