#include "qlink/distributed.hpp"

#include <array>
#include <cmath>
#include <string>

namespace qlink {

namespace {

using State = std::array<double, 2>;

State rhs(double gamma, double alpha, const State& y) {
    const double net = gamma - alpha;
    return {net * y[0], net * y[1] + gamma};
}

double gain_at(const GainProfile& profile, double l) {
    const double gamma = profile(l);
    if (!std::isfinite(gamma)) {
        throw IntegrationError("gain profile is not finite at l=" + std::to_string(l) + " km");
    }
    if (gamma < 0.0) {
        throw IntegrationError("gain profile is negative at l=" + std::to_string(l) + " km");
    }
    return gamma;
}

constexpr double kPositionTolerance = 1e-4;
constexpr int kScanCells = 256;
constexpr double kTieTolerance = 1e-12;

}  // namespace

DistributedState ode_propagate(const GainProfile& profile, double alpha_per_km, double length_km,
                               double step_km) {
    if (!std::isfinite(length_km) || length_km < 0.0) {
        throw DomainError("length_km must be finite and non-negative");
    }
    if (!std::isfinite(step_km) || step_km <= 0.0) throw DomainError("step_km must be positive");

    State y{1.0, 0.0};
    const auto steps = static_cast<long long>(std::ceil(length_km / step_km - 1e-9));
    for (long long k = 0; k < steps; ++k) {
        const double l = static_cast<double>(k) * step_km;
        const double h = std::min(step_km, length_km - l);
        if (h <= 0.0) break;
        const double g0 = gain_at(profile, l);
        const double gm = gain_at(profile, l + 0.5 * h);
        const double g1 = gain_at(profile, l + h);

        const State k1 = rhs(g0, alpha_per_km, y);
        const State k2 = rhs(gm, alpha_per_km, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
        const State k3 = rhs(gm, alpha_per_km, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
        const State k4 = rhs(g1, alpha_per_km, {y[0] + h * k3[0], y[1] + h * k3[1]});
        for (int i = 0; i < 2; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return {y[0], y[1], length_km};
}

double constant_power_gain_density(double alpha_per_km, InputPower p) {
    return alpha_per_km * p.value() / (1.0 + p.value());
}

DistributedState constant_power_solution(double alpha_per_km, InputPower p, double length_km) {
    if (!std::isfinite(length_km) || length_km < 0.0) {
        throw DomainError("length_km must be finite and non-negative");
    }
    const double n_bar = p.value();
    const double tau = std::exp(-alpha_per_km * length_km / (1.0 + n_bar));
    // n_bar (1 - tau) without cancellation for short lengths.
    const double nu = -n_bar * std::expm1(-alpha_per_km * length_km / (1.0 + n_bar));
    return {tau, nu, length_km};
}

NoisyChannel terminated_channel(double alpha_per_km, InputPower p, double total_length_km,
                                double unamplified_km) {
    const double amplified = std::max(0.0, total_length_km - unamplified_km);
    const DistributedState s = constant_power_solution(alpha_per_km, p, amplified);
    const double loss = std::exp(-alpha_per_km * unamplified_km);
    return {loss * s.tau, loss * s.nu};
}

Termination optimal_termination(double alpha_per_km, InputPower p, double total_length_km,
                                Criterion criterion) {
    if (!std::isfinite(total_length_km) || total_length_km < 0.0) {
        throw DomainError("total_length_km must be finite and non-negative");
    }
    Termination best;
    auto se_at = [&](double unamplified) {
        ++best.evaluations;
        return spectral_efficiency(
            criterion, terminated_channel(alpha_per_km, p, total_length_km, unamplified), p);
    };
    const double length = total_length_km;
    if (length == 0.0) {
        best.se = se_at(0.0);
        return best;
    }

    // Coarse scan to bracket the global maximum; near the loss-only threshold
    // the L' = L endpoint and an interior point are competing local maxima.
    const double cell = length / kScanCells;
    int best_cell = 0;
    double best_scan = -1.0;
    for (int i = 0; i <= kScanCells; ++i) {
        const double v = se_at(cell * i);
        if (v >= best_scan) {
            best_scan = v;
            best_cell = i;
        }
    }

    // Golden-section refinement on the neighbouring cells.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = cell * std::max(0, best_cell - 1);
    double hi = cell * std::min(kScanCells, best_cell + 1);
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = se_at(x1);
    double f2 = se_at(x2);
    while (hi - lo > kPositionTolerance) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = se_at(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = se_at(x1);
        }
    }
    const double interior = 0.5 * (lo + hi);

    // Candidates in order of decreasing L'; a later candidate must win
    // strictly to displace an earlier one.
    const double candidates[] = {length, interior, 0.0};
    best.se = -1.0;
    for (double c : candidates) {
        const double v = se_at(c);
        if (v > best.se + kTieTolerance) {
            best.se = v;
            best.unamplified_km = c;
        }
    }
    return best;
}

double distributed_loss_only_threshold_km(double alpha_per_km, InputPower p) {
    auto amplification_helps = [&](double length) {
        const Termination t = optimal_termination(alpha_per_km, p, length, Criterion::Holevo);
        const double loss_only = holevo_se({std::exp(-alpha_per_km * length), 0.0}, p);
        return t.se > loss_only + 1e-9;
    };
    double lo = 0.0;
    double hi = 1.0 / alpha_per_km;
    while (!amplification_helps(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e4 / alpha_per_km) throw IntegrationError("no loss-only crossover found");
    }
    while (hi - lo > 0.01) {
        const double mid = 0.5 * (lo + hi);
        (amplification_helps(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace qlink
