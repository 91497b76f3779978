#include <doctest.h>

#include <cmath>
#include <limits>

#include "qlink/distributed.hpp"
#include "qlink/link_model.hpp"

using namespace qlink;

namespace {

constexpr double kAlpha = 0.05;

struct GridBest {
    double unamplified_km;
    double se;
};

// Dense scan of L' with a locally written composite channel.
GridBest grid_termination(double total, InputPower p, Criterion c, double step) {
    const double n = p.value();
    GridBest best{0.0, -1.0};
    const auto cells = static_cast<long long>(std::llround(total / step));
    for (long long k = 0; k <= cells; ++k) {
        const double lp = std::min(total, static_cast<double>(k) * step);
        const double tau_amp = std::exp(-kAlpha * (total - lp) / (1.0 + n));
        const double loss = std::exp(-kAlpha * lp);
        const NoisyChannel ch{loss * tau_amp, loss * n * (1.0 - tau_amp)};
        const double se = spectral_efficiency(c, ch, p);
        if (se >= best.se) best = {lp, se};
    }
    return best;
}

double max_error_vs_closed_form(double length, double step, InputPower p) {
    const double gamma = constant_power_gain_density(kAlpha, p);
    const DistributedState num = ode_propagate([gamma](double) { return gamma; }, kAlpha, length, step);
    const DistributedState ref = constant_power_solution(kAlpha, p, length);
    return std::max(std::abs(num.tau - ref.tau), std::abs(num.nu - ref.nu));
}

}  // namespace

TEST_CASE("ode_propagate examples") {
    const DistributedState lossy = ode_propagate([](double) { return 0.0; }, kAlpha, 20.0, 0.01);
    CHECK(std::abs(lossy.tau - std::exp(-1.0)) < 1e-9);
    CHECK(lossy.nu == 0.0);
    CHECK(lossy.position_km == 20.0);

    const DistributedState transparent = ode_propagate([](double) { return kAlpha; }, kAlpha, 20.0, 0.01);
    CHECK(transparent.tau == 1.0);
    CHECK(std::abs(transparent.nu - 1.0) < 1e-8);

    const InputPower p(100.0);
    const double gamma = constant_power_gain_density(kAlpha, p);
    const DistributedState cp = ode_propagate([gamma](double) { return gamma; }, kAlpha, 101.0, 0.01);
    CHECK(std::abs(cp.tau - 0.9512294) < 1e-7);
    CHECK(std::abs(cp.tau - std::exp(-0.05)) < 1e-8);
    CHECK(std::abs(cp.nu - 4.877058) < 1e-6);
}

TEST_CASE("ode_propagate handles lengths that are not a step multiple") {
    const DistributedState s = ode_propagate([](double) { return 0.0; }, kAlpha, 1.234, 0.1);
    CHECK(s.position_km == 1.234);
    CHECK(std::abs(s.tau - std::exp(-kAlpha * 1.234)) < 1e-12);
    const DistributedState zero = ode_propagate([](double) { return 0.0; }, kAlpha, 0.0, 0.5);
    CHECK(zero.tau == 1.0);
    CHECK(zero.nu == 0.0);
}

TEST_CASE("ode_propagate rejects bad profiles and arguments") {
    CHECK_THROWS_AS((void)ode_propagate([](double) { return std::numeric_limits<double>::quiet_NaN(); },
                                        kAlpha, 1.0, 0.1),
                    IntegrationError);
    CHECK_THROWS_AS((void)ode_propagate([](double l) { return l > 0.5 ? INFINITY : 0.0; }, kAlpha, 1.0, 0.1),
                    IntegrationError);
    CHECK_THROWS_AS((void)ode_propagate([](double) { return -1.0; }, kAlpha, 1.0, 0.1), IntegrationError);
    CHECK_THROWS_AS((void)ode_propagate([](double) { return 0.0; }, kAlpha, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS((void)ode_propagate([](double) { return 0.0; }, kAlpha, -1.0, 0.1), DomainError);
}

TEST_CASE("ode_propagate follows a position-dependent profile") {
    // gamma(l) = alpha l / L: tau(L) = exp(-alpha L / 2).
    const double length = 40.0;
    auto profile = [length](double l) { return kAlpha * l / length; };
    const DistributedState s = ode_propagate(profile, kAlpha, length, 0.1);
    CHECK(std::abs(s.tau - std::exp(-kAlpha * length / 2.0)) < 1e-10);
    const DistributedState fine = ode_propagate(profile, kAlpha, length, 0.001);
    CHECK(std::abs(s.nu - fine.nu) < 1e-10);
    CHECK(s.nu > 0.0);
}

TEST_CASE("constant_power_solution examples and power identity") {
    const InputPower p(100.0);
    const DistributedState start = constant_power_solution(kAlpha, p, 0.0);
    CHECK(start.tau == 1.0);
    CHECK(start.nu == 0.0);

    const DistributedState s = constant_power_solution(kAlpha, p, 101.0);
    CHECK(std::abs(s.tau - 0.9512294) < 1e-7);
    CHECK(std::abs(s.nu - 4.877058) < 1e-6);

    for (double l = 0.0; l <= 5000.0; l += 17.0) {
        const DistributedState x = constant_power_solution(kAlpha, p, l);
        CHECK(std::abs(x.tau * 100.0 + x.nu - 100.0) < 1e-12);
    }
}

TEST_CASE("closed form satisfies its differential equations") {
    const InputPower p(100.0);
    const double gamma = constant_power_gain_density(kAlpha, p);
    const double h = 1.0;
    for (double l = 5.0; l <= 500.0; l += 45.0) {
        const auto lo = constant_power_solution(kAlpha, p, l - h);
        const auto mid = constant_power_solution(kAlpha, p, l);
        const auto hi = constant_power_solution(kAlpha, p, l + h);
        const double dtau = (hi.tau - lo.tau) / (2.0 * h);
        const double dnu = (hi.nu - lo.nu) / (2.0 * h);
        CHECK(std::abs(dtau - (gamma - kAlpha) * mid.tau) < 1e-8);
        CHECK(std::abs(dnu - ((gamma - kAlpha) * mid.nu + gamma)) < 1e-8);
    }
}

TEST_CASE("RK4 tracks the closed form and converges at fourth order") {
    const InputPower p(100.0);
    const double gamma = constant_power_gain_density(kAlpha, p);
    double worst = 0.0;
    DistributedState num{1.0, 0.0, 0.0};
    // Integrate 0..500 km at 0.1 km, comparing at every 10 km.
    for (int k = 1; k <= 50; ++k) {
        num = ode_propagate([gamma](double) { return gamma; }, kAlpha, 10.0 * k, 0.1);
        const DistributedState ref = constant_power_solution(kAlpha, p, 10.0 * k);
        worst = std::max({worst, std::abs(num.tau - ref.tau), std::abs(num.nu - ref.nu)});
    }
    CHECK(worst <= 1e-8);

    const double e1 = max_error_vs_closed_form(500.0, 100.0, p);
    const double e2 = max_error_vs_closed_form(500.0, 50.0, p);
    const double e3 = max_error_vs_closed_form(500.0, 25.0, p);
    CHECK(std::abs(std::log2(e1 / e2) - 4.0) < 0.2);
    CHECK(std::abs(std::log2(e2 / e3) - 4.0) < 0.2);
}

TEST_CASE("optimal_termination leaves short links unamplified") {
    const InputPower p(100.0);
    for (double length : {0.0, 5.0, 20.0, 30.0}) {
        const Termination t = optimal_termination(kAlpha, p, length, Criterion::Holevo);
        CHECK(t.unamplified_km == length);
        CHECK(t.se == doctest::Approx(holevo_se({std::exp(-kAlpha * length), 0.0}, p)).epsilon(1e-15));
    }
}

TEST_CASE("optimal_termination on a 1000 km Holevo link") {
    const InputPower p(100.0);
    const Termination t = optimal_termination(kAlpha, p, 1000.0, Criterion::Holevo);
    CHECK(std::abs(attenuation_db(t.unamplified_km, kAlpha) - 3.0) < 0.5);
    const GridBest grid = grid_termination(1000.0, p, Criterion::Holevo, 0.01);
    CHECK(std::abs(t.unamplified_km - grid.unamplified_km) < 0.01);
    CHECK(t.se >= grid.se - 1e-12);
    CHECK(std::abs(t.unamplified_km - 14.1) < 0.05);
}

TEST_CASE("optimal_termination under Shannon amplifies to the very end") {
    const InputPower p(100.0);
    const Termination t = optimal_termination(kAlpha, p, 1000.0, Criterion::Shannon);
    const GridBest grid = grid_termination(1000.0, p, Criterion::Shannon, 0.01);
    CHECK(grid.unamplified_km == 0.0);
    // Position resolution of the search is 1e-4 km.
    CHECK(t.unamplified_km <= 1e-4);
    CHECK(std::abs(t.se - 1.3346278762748793) < 1e-12);
}

TEST_CASE("golden-section termination agrees with a dense grid") {
    const InputPower p(100.0);
    for (double length : {31.5, 35.0, 50.0, 120.0, 300.0, 700.0}) {
        const Termination t = optimal_termination(kAlpha, p, length, Criterion::Holevo);
        const GridBest grid = grid_termination(length, p, Criterion::Holevo, 0.01);
        CHECK(t.se >= grid.se - 1e-12);
        CHECK(std::abs(t.unamplified_km - grid.unamplified_km) <= 0.01 + 1e-4);
    }
}

TEST_CASE("distributed loss-only threshold sits near 31 km") {
    const double km = distributed_loss_only_threshold_km(kAlpha, InputPower(100.0));
    CHECK(std::abs(km - 30.95) < 0.05);
    CHECK(std::abs(attenuation_db(km, kAlpha) - 6.73) < 0.15);
}
