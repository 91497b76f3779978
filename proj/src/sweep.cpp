#include "qlink/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include <json.hpp>

#include "qlink/distributed.hpp"
#include "qlink/link_config_io.hpp"
#include "qlink/optimizer.hpp"

namespace qlink {

using nlohmann::json;

namespace {

constexpr double kUnusedGain = 1e-9;

// Runs task(i) for i in [0, count) on a small worker pool. Results must be
// written to per-index slots by the task. The lowest-index exception wins.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::vector<Criterion> sorted_criteria(const std::vector<Criterion>& criteria) {
    std::vector<Criterion> out = criteria;
    std::sort(out.begin(), out.end(),
              [](Criterion a, Criterion b) { return to_string(a) < to_string(b); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

OptimizerSettings settings_for(const SweepSpec& spec) {
    OptimizerSettings s;
    s.seed = spec.seed;
    s.starts = spec.starts;
    s.evaluation_budget = spec.evaluation_budget;
    return s;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::string nodes_label(int n) { return n == kDistributedNodes ? "inf" : std::to_string(n); }

// JSON numbers mirror the CSV text exactly.
double rounded(double v) {
    const std::string text = format_number(v);
    double parsed = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), parsed);
    return parsed;
}

}  // namespace

void SweepSpec::validate() const {
    auto fail = [](const char* field, const std::string& why) { throw ConfigError(field, why); };
    if (!std::isfinite(l_min_km) || l_min_km < 0.0) fail("l_min_km", "must be finite and >= 0");
    if (!std::isfinite(l_max_km) || l_max_km < l_min_km) fail("l_max_km", "must be >= l_min_km");
    if (!std::isfinite(l_step_km) || l_step_km <= 0.0) fail("l_step_km", "must be > 0");
    if (!std::isfinite(alpha_per_km) || alpha_per_km <= 0.0) fail("alpha_per_km", "must be > 0");
    if (!std::isfinite(n_bar) || n_bar <= 0.0) fail("n_bar", "must be > 0");
    if (node_counts.empty() && !include_loss_only && !include_distributed) {
        fail("nodes", "no node counts given and neither loss-only nor distributed requested");
    }
    for (int n : node_counts) {
        if (n < 0 || n > 64) fail("nodes", "node counts must lie in 0..64, got " + std::to_string(n));
    }
    if (criteria.empty()) fail("criterion", "at least one criterion is required");
    if (starts < 1) fail("starts", "must be >= 1");
}

std::vector<double> SweepSpec::lengths() const {
    const auto count = static_cast<std::size_t>(std::floor((l_max_km - l_min_km) / l_step_km + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = l_min_km + static_cast<double>(i) * l_step_km;
    return out;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<int> nodes = spec.node_counts;
    if (spec.include_loss_only) nodes.push_back(0);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (spec.include_distributed) nodes.push_back(kDistributedNodes);

    std::vector<SweepRow> rows;
    for (Criterion c : sorted_criteria(spec.criteria)) {
        for (int n : nodes) {
            for (double l : spec.lengths()) rows.push_back({c, n, l, 0.0, 0.0, true, 0});
        }
    }

    const InputPower p(spec.n_bar);
    const OptimizerSettings settings = settings_for(spec);
    parallel_for(rows.size(), spec.threads, [&](std::size_t i) {
        SweepRow& row = rows[i];
        if (row.n_nodes == kDistributedNodes) {
            const Termination t = optimal_termination(spec.alpha_per_km, p, row.length_km, row.criterion);
            row.se_bits = t.se;
            row.tail_span_km = t.unamplified_km;
            row.evaluations = t.evaluations;
            return;
        }
        OptimizationProblem problem{row.length_km, row.n_nodes, spec.alpha_per_km, p,
                                    row.criterion, GainMode::Saturating, settings};
        const OptimizationResult r = optimize(problem);
        row.se_bits = r.se;
        row.tail_span_km = r.config.tail_span_km;
        row.converged = r.converged;
        row.evaluations = r.evaluations;
    });
    return rows;
}

std::vector<LocationRow> run_locations(const SweepSpec& spec) {
    spec.validate();
    if (spec.node_counts.size() != 1) {
        throw ConfigError("nodes", "locations needs exactly one node count");
    }
    const int n = spec.node_counts.front();
    const Criterion criterion =
        spec.criteria.size() == 1 ? spec.criteria.front() : Criterion::Holevo;
    const InputPower p(spec.n_bar);
    const OptimizerSettings settings = settings_for(spec);

    const std::vector<double> lengths = spec.lengths();
    std::vector<LocationRow> rows(lengths.size());
    parallel_for(lengths.size(), spec.threads, [&](std::size_t i) {
        LocationRow& row = rows[i];
        row.length_km = lengths[i];
        OptimizationProblem problem{lengths[i], n, spec.alpha_per_km, p,
                                    criterion, GainMode::Saturating, settings};
        const OptimizationResult r = optimize(problem);
        const std::vector<double> pos = r.node_positions_km();
        row.positions.resize(pos.size());
        for (std::size_t k = 0; k < pos.size(); ++k) {
            if (r.config.stages[k].gain - 1.0 > kUnusedGain) row.positions[k] = pos[k];
        }
        row.converged = r.converged;
        const Termination t = optimal_termination(spec.alpha_per_km, p, lengths[i], criterion);
        row.distributed_termination_km = lengths[i] - t.unamplified_km;
    });
    return rows;
}

SingleReport run_single(const LinkConfig& cfg) {
    cfg.validate();
    SingleReport r;
    r.config = cfg;
    r.channel = end_to_end(cfg);
    r.shannon_se = shannon_se(r.channel, cfg.n_bar);
    r.holevo_se = holevo_se(r.channel, cfg.n_bar);
    r.length_km = cfg.total_length_km();
    r.attenuation_db = attenuation_db(r.length_km, cfg.alpha_per_km);
    r.margins = check_power_constraint(cfg);
    r.feasible = is_feasible(r.margins);
    return r;
}

SingleReport run_single(const std::filesystem::path& path) { return run_single(load_link_config(path)); }

std::string format_number(double v) {
    if (v == 0.0) return "0";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "criterion,n_nodes,length_km,se_bits,tail_span_km,converged,evaluations\n";
    for (const auto& r : rows) {
        out << csv_field(std::string(to_string(r.criterion))) << ',' << nodes_label(r.n_nodes) << ','
            << format_number(r.length_km) << ',' << format_number(r.se_bits) << ','
            << format_number(r.tail_span_km) << ',' << (r.converged ? "true" : "false") << ','
            << r.evaluations << '\n';
    }
}

void write_sweep_json(std::ostream& out, const std::vector<SweepRow>& rows) {
    json doc = json::array();
    for (const auto& r : rows) {
        json n = r.n_nodes == kDistributedNodes ? json("inf") : json(r.n_nodes);
        doc.push_back({{"criterion", std::string(to_string(r.criterion))},
                       {"n_nodes", std::move(n)},
                       {"length_km", rounded(r.length_km)},
                       {"se_bits", rounded(r.se_bits)},
                       {"tail_span_km", rounded(r.tail_span_km)},
                       {"converged", r.converged},
                       {"evaluations", r.evaluations}});
    }
    out << doc.dump(2) << '\n';
}

void write_locations_csv(std::ostream& out, const std::vector<LocationRow>& rows) {
    const std::size_t n = rows.empty() ? 0 : rows.front().positions.size();
    out << "length_km";
    for (std::size_t k = 1; k <= n; ++k) out << ",pos_" << k;
    out << ",distributed_termination_km\n";
    for (const auto& r : rows) {
        out << format_number(r.length_km);
        for (const auto& p : r.positions) {
            out << ',';
            if (p) out << format_number(*p);
        }
        out << ',' << format_number(r.distributed_termination_km) << '\n';
    }
}

void write_locations_json(std::ostream& out, const std::vector<LocationRow>& rows) {
    json doc = json::array();
    for (const auto& r : rows) {
        json row = {{"length_km", rounded(r.length_km)}};
        for (std::size_t k = 0; k < r.positions.size(); ++k) {
            row["pos_" + std::to_string(k + 1)] =
                r.positions[k] ? json(rounded(*r.positions[k])) : json(nullptr);
        }
        row["distributed_termination_km"] = rounded(r.distributed_termination_km);
        doc.push_back(std::move(row));
    }
    out << doc.dump(2) << '\n';
}

void write_single_text(std::ostream& out, const SingleReport& r) {
    out << "tau             " << format_number(r.channel.tau) << '\n'
        << "nu              " << format_number(r.channel.nu) << '\n'
        << "length_km       " << format_number(r.length_km) << '\n'
        << "attenuation_db  " << format_number(r.attenuation_db) << '\n'
        << "shannon_se      " << format_number(r.shannon_se) << '\n'
        << "holevo_se       " << format_number(r.holevo_se) << '\n';
    for (std::size_t i = 0; i < r.margins.size(); ++i) {
        out << "margin[" << (i + 1) << "]       " << format_number(r.margins[i]);
        if (r.margins[i] < -kFeasibilityTolerance) out << "  VIOLATION";
        out << '\n';
    }
    out << "feasible        " << (r.feasible ? "yes" : "no") << '\n';
}

void write_single_json(std::ostream& out, const SingleReport& r) {
    json margins = json::array();
    for (double m : r.margins) margins.push_back(rounded(m));
    json doc = {{"tau", rounded(r.channel.tau)},
                {"nu", rounded(r.channel.nu)},
                {"length_km", rounded(r.length_km)},
                {"attenuation_db", rounded(r.attenuation_db)},
                {"shannon_se", rounded(r.shannon_se)},
                {"holevo_se", rounded(r.holevo_se)},
                {"margins", std::move(margins)},
                {"feasible", r.feasible}};
    out << doc.dump(2) << '\n';
}

}  // namespace qlink
