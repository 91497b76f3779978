#include "qlink/link_config_io.hpp"

#include <fstream>
#include <sstream>

namespace qlink {

using nlohmann::json;

namespace {

double number_field(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(path + key, "missing required field");
    if (!it->is_number()) throw ConfigError(path + key, "expected a number");
    return it->get<double>();
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                    const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (auto k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(path + key, "unknown field");
    }
}

// Maps a byte offset into "line L, column C" (both 1-based).
std::string text_location(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

json to_json(const LinkConfig& cfg) {
    json stages = json::array();
    for (const auto& s : cfg.stages) stages.push_back({{"span_km", s.span_km}, {"gain", s.gain}});
    return {{"alpha_per_km", cfg.alpha_per_km},
            {"n_bar", cfg.n_bar.value()},
            {"stages", std::move(stages)},
            {"tail_span_km", cfg.tail_span_km}};
}

LinkConfig link_config_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
    reject_unknown(doc, {"alpha_per_km", "n_bar", "stages", "tail_span_km"}, "");

    LinkConfig cfg;
    cfg.alpha_per_km = number_field(doc, "alpha_per_km", "");
    cfg.tail_span_km = number_field(doc, "tail_span_km", "");
    try {
        cfg.n_bar = InputPower(number_field(doc, "n_bar", ""));
    } catch (const DomainError& e) {
        throw ConfigError("n_bar", e.what());
    }

    const auto it = doc.find("stages");
    if (it == doc.end()) throw ConfigError("stages", "missing required field");
    if (!it->is_array()) throw ConfigError("stages", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string path = "stages[" + std::to_string(i) + "].";
        const json& entry = (*it)[i];
        if (!entry.is_object()) throw ConfigError(path.substr(0, path.size() - 1), "expected an object");
        reject_unknown(entry, {"span_km", "gain"}, path);
        AmplifierStage stage{number_field(entry, "span_km", path), number_field(entry, "gain", path)};
        if (!(stage.span_km >= 0.0)) throw ConfigError(path + "span_km", "must be >= 0");
        if (!(stage.gain >= 1.0)) throw ConfigError(path + "gain", "must be >= 1");
        cfg.stages.push_back(stage);
    }

    if (!(cfg.alpha_per_km > 0.0)) throw ConfigError("alpha_per_km", "must be > 0");
    if (!(cfg.tail_span_km >= 0.0)) throw ConfigError("tail_span_km", "must be >= 0");
    try {
        cfg.validate();
    } catch (const DomainError& e) {
        throw ConfigError("<root>", e.what());
    }
    return cfg;
}

LinkConfig parse_link_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(text_location(text, e.byte == 0 ? 0 : e.byte - 1), "syntax error");
    }
    return link_config_from_json(doc);
}

LinkConfig load_link_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_link_config(buf.str());
}

}  // namespace qlink
