#pragma once

#include <filesystem>
#include <string_view>

#include "qlink/sweep.hpp"

namespace qlink {

// Scenario files are plain text, one `key = value` per line, '#' starts a
// comment. Recognized keys:
//
//   link.alpha_per_km     attenuation coefficient, 1/km (natural-log units)
//   link.n_bar            input PSD, photons/(s*Hz)
//   sweep.l_min_km        first total length
//   sweep.l_max_km        last total length
//   sweep.l_step_km       length step
//   sweep.nodes           comma-separated node counts, may be empty
//   sweep.criterion       shannon | holevo | both
//   sweep.loss_only       true | false
//   sweep.distributed     true | false
//   optimizer.seed        unsigned integer
//   optimizer.starts      starts per optimization
//   optimizer.budget      objective calls per start, 0 = automatic
//
// Keys left out keep the value already present in the spec passed in.

/// Applies scenario text to `base`. Errors are ConfigError with a
/// "line N" or "line N: key" location.
[[nodiscard]] SweepSpec apply_scenario(SweepSpec base, std::string_view text);
[[nodiscard]] SweepSpec load_scenario(SweepSpec base, const std::filesystem::path& path);

/// Parses "2,4,8" style lists; empty string gives an empty list.
[[nodiscard]] std::vector<int> parse_node_list(std::string_view text);
/// "shannon", "holevo" or "both".
[[nodiscard]] std::vector<Criterion> parse_criteria(std::string_view text);

}  // namespace qlink
