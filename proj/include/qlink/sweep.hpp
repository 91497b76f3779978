#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qlink/capacity.hpp"
#include "qlink/link_model.hpp"

namespace qlink {

/// n_nodes value used for distributed-amplification rows ("inf" in output).
inline constexpr int kDistributedNodes = -1;

/// Grid of total lengths x node counts x criteria. Defaults are the
/// reference scenario: n_bar = 100 photons/(s*Hz) (12.8 uW/THz at 1550 nm),
/// alpha = 0.05 /km (SMF-28), L = 0..1000 km in 5 km steps.
struct SweepSpec {
    double l_min_km = 0.0;
    double l_max_km = 1000.0;
    double l_step_km = 5.0;
    std::vector<int> node_counts{2, 4, 8, 16, 64};
    double alpha_per_km = 0.05;
    double n_bar = 100.0;
    std::vector<Criterion> criteria{Criterion::Holevo, Criterion::Shannon};
    bool include_loss_only = false;
    bool include_distributed = false;
    std::uint64_t seed = 1;
    int starts = 8;
    /// Objective calls per optimizer start; 0 = automatic.
    std::size_t evaluation_budget = 0;
    /// Worker threads for independent cells; 0 = hardware concurrency.
    unsigned threads = 0;

    /// Throws ConfigError describing the first broken invariant.
    void validate() const;
    [[nodiscard]] std::vector<double> lengths() const;
};

struct SweepRow {
    Criterion criterion = Criterion::Holevo;
    int n_nodes = 0;  ///< 0 = loss-only, kDistributedNodes = distributed
    double length_km = 0.0;
    double se_bits = 0.0;
    double tail_span_km = 0.0;
    bool converged = true;
    std::size_t evaluations = 0;
};

/// Optimizes every (criterion, N, L) cell; rows sorted by criterion name,
/// then N (loss-only first, distributed last), then L. Cells are evaluated
/// concurrently and written back by index, so the output does not depend on
/// scheduling.
[[nodiscard]] std::vector<SweepRow> run_sweep(const SweepSpec& spec);

struct LocationRow {
    double length_km = 0.0;
    /// Cumulative amplifier positions; empty where the amplifier is unused (G = 1).
    std::vector<std::optional<double>> positions;
    double distributed_termination_km = 0.0;
    bool converged = true;
};

/// Optimal amplifier positions for the single node count in `spec` (Holevo
/// unless the spec selects Shannon only), plus the end of the distributed
/// amplification section L - L'.
[[nodiscard]] std::vector<LocationRow> run_locations(const SweepSpec& spec);

struct SingleReport {
    LinkConfig config;
    NoisyChannel channel;
    double shannon_se = 0.0;
    double holevo_se = 0.0;
    double length_km = 0.0;
    double attenuation_db = 0.0;
    std::vector<double> margins;
    bool feasible = true;
};

[[nodiscard]] SingleReport run_single(const LinkConfig& cfg);
/// Loads a LinkConfig document; throws ConfigError on schema violations.
[[nodiscard]] SingleReport run_single(const std::filesystem::path& path);

/// Nine significant digits, '.' decimal separator, independent of locale.
[[nodiscard]] std::string format_number(double v);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_sweep_json(std::ostream& out, const std::vector<SweepRow>& rows);
void write_locations_csv(std::ostream& out, const std::vector<LocationRow>& rows);
void write_locations_json(std::ostream& out, const std::vector<LocationRow>& rows);
void write_single_text(std::ostream& out, const SingleReport& report);
void write_single_json(std::ostream& out, const SingleReport& report);

}  // namespace qlink
