#include "qlink/scenario.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "qlink/link_config_io.hpp"

namespace qlink {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw std::invalid_argument("expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

template <typename Int>
Int to_integer(std::string_view v) {
    Int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw std::invalid_argument("expected an integer, got '" + std::string(v) + "'");
    }
    return out;
}

bool to_bool(std::string_view v) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw std::invalid_argument("expected true or false, got '" + std::string(v) + "'");
}

}  // namespace

std::vector<int> parse_node_list(std::string_view text) {
    std::vector<int> out;
    text = trim(text);
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string_view item = trim(text.substr(0, comma));
        out.push_back(to_integer<int>(item));
        if (comma == std::string_view::npos) break;
        text = text.substr(comma + 1);
    }
    return out;
}

std::vector<Criterion> parse_criteria(std::string_view text) {
    text = trim(text);
    if (text == "both") return {Criterion::Holevo, Criterion::Shannon};
    return {parse_criterion(text)};
}

SweepSpec apply_scenario(SweepSpec spec, std::string_view text) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = "line " + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));

        try {
            if (key == "link.alpha_per_km") {
                spec.alpha_per_km = to_double(value);
            } else if (key == "link.n_bar") {
                spec.n_bar = to_double(value);
            } else if (key == "sweep.l_min_km") {
                spec.l_min_km = to_double(value);
            } else if (key == "sweep.l_max_km") {
                spec.l_max_km = to_double(value);
            } else if (key == "sweep.l_step_km") {
                spec.l_step_km = to_double(value);
            } else if (key == "sweep.nodes") {
                spec.node_counts = parse_node_list(value);
            } else if (key == "sweep.criterion") {
                spec.criteria = parse_criteria(value);
            } else if (key == "sweep.loss_only") {
                spec.include_loss_only = to_bool(value);
            } else if (key == "sweep.distributed") {
                spec.include_distributed = to_bool(value);
            } else if (key == "optimizer.seed") {
                spec.seed = to_integer<std::uint64_t>(value);
            } else if (key == "optimizer.starts") {
                spec.starts = to_integer<int>(value);
            } else if (key == "optimizer.budget") {
                spec.evaluation_budget = to_integer<std::size_t>(value);
            } else {
                throw ConfigError(where + ": " + key, "unknown key");
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ": " + key, e.what());
        }
    }
    return spec;
}

SweepSpec load_scenario(SweepSpec base, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return apply_scenario(std::move(base), buf.str());
}

}  // namespace qlink
