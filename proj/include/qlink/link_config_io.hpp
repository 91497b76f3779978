#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qlink/link_model.hpp"

namespace qlink {

/// Configuration or document error. `where` is a field path such as
/// "stages[1].gain" or a "line N, column M" location for syntax errors.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}

    [[nodiscard]] const std::string& where() const { return where_; }

private:
    std::string where_;
};

// LinkConfig document schema:
//   {
//     "alpha_per_km": 0.05,
//     "n_bar": 100,
//     "stages": [ {"span_km": 20, "gain": 2.7}, ... ],
//     "tail_span_km": 10
//   }
// All four keys are required; unknown keys are rejected.

[[nodiscard]] nlohmann::json to_json(const LinkConfig& cfg);
[[nodiscard]] LinkConfig link_config_from_json(const nlohmann::json& doc);
[[nodiscard]] LinkConfig parse_link_config(std::string_view text);
[[nodiscard]] LinkConfig load_link_config(const std::filesystem::path& path);

}  // namespace qlink
