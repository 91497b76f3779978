// qlink: capacity limits and optimal amplifier placement for multi-span
// optical links with quantum-limited phase-insensitive amplification.
//
//   qlink sweep      [options]   SE vs. length for several node counts
//   qlink locations  [options]   optimal amplifier positions vs. length
//   qlink threshold  [options]   loss-only crossover length for one N
//   qlink single     CONFIG.json evaluate one explicit link
//
// Exit codes: 0 success, 1 usage/config error, 2 power-constraint
// violation, 3 non-convergence under --strict.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlink/link_config_io.hpp"
#include "qlink/optimizer.hpp"
#include "qlink/scenario.hpp"
#include "qlink/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConstraint = 2;
constexpr int kExitNotConverged = 3;

struct CommonOptions {
    std::string config_path;
    std::optional<double> alpha;
    std::optional<double> n_bar;
    std::optional<std::string> nodes;
    std::optional<double> l_min;
    std::optional<double> l_max;
    std::optional<double> l_step;
    std::optional<std::string> criterion;
    bool loss_only = false;
    bool distributed = false;
    std::optional<std::uint64_t> seed;
    std::optional<int> starts;
    std::optional<std::size_t> budget;
    unsigned threads = 0;
    std::string out_path;
    std::string format = "csv";
    bool strict = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Scenario file (key = value lines)");
    cmd->add_option("--alpha", o.alpha, "Attenuation coefficient, 1/km (natural-log units)");
    cmd->add_option("--nbar", o.n_bar, "Input PSD, photons/(s*Hz)");
    cmd->add_option("--nodes", o.nodes, "Comma-separated node counts");
    cmd->add_option("--lmin", o.l_min, "First total length, km");
    cmd->add_option("--lmax", o.l_max, "Last total length, km");
    cmd->add_option("--lstep", o.l_step, "Length step, km");
    cmd->add_option("--criterion", o.criterion, "shannon | holevo | both")
        ->check(CLI::IsMember({"shannon", "holevo", "both"}));
    cmd->add_flag("--loss-only", o.loss_only, "Add loss-only rows");
    cmd->add_flag("--distributed", o.distributed, "Add distributed-amplification rows");
    cmd->add_option("--seed", o.seed, "Seed for randomized optimizer starts");
    cmd->add_option("--starts", o.starts, "Optimizer starts per cell");
    cmd->add_option("--budget", o.budget, "Objective calls per optimizer start (0 = automatic)");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    cmd->add_option("--out", o.out_path, "Output file (default stdout)");
    cmd->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--strict", o.strict, "Exit 3 if any cell fails to converge");
}

qlink::SweepSpec build_spec(const CommonOptions& o) {
    qlink::SweepSpec spec;
    if (!o.config_path.empty()) spec = qlink::load_scenario(spec, o.config_path);
    if (o.alpha) spec.alpha_per_km = *o.alpha;
    if (o.n_bar) spec.n_bar = *o.n_bar;
    if (o.nodes) spec.node_counts = qlink::parse_node_list(*o.nodes);
    if (o.l_min) spec.l_min_km = *o.l_min;
    if (o.l_max) spec.l_max_km = *o.l_max;
    if (o.l_step) spec.l_step_km = *o.l_step;
    if (o.criterion) spec.criteria = qlink::parse_criteria(*o.criterion);
    if (o.loss_only) spec.include_loss_only = true;
    if (o.distributed) spec.include_distributed = true;
    if (o.seed) spec.seed = *o.seed;
    if (o.starts) spec.starts = *o.starts;
    if (o.budget) spec.evaluation_budget = *o.budget;
    spec.threads = o.threads;
    spec.validate();
    return spec;
}

// Writes to --out when given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw qlink::ConfigError(path, "cannot open output file");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

int run_sweep_cmd(const CommonOptions& o) {
    const auto rows = qlink::run_sweep(build_spec(o));
    Output out(o.out_path);
    if (o.format == "json") {
        qlink::write_sweep_json(out.stream(), rows);
    } else {
        qlink::write_sweep_csv(out.stream(), rows);
    }
    if (o.strict) {
        for (const auto& r : rows) {
            if (!r.converged) return kExitNotConverged;
        }
    }
    return kExitOk;
}

int run_locations_cmd(const CommonOptions& o) {
    CommonOptions with_default = o;
    if (!with_default.nodes && with_default.config_path.empty()) with_default.nodes = "16";
    if (!with_default.criterion && with_default.config_path.empty()) with_default.criterion = "holevo";
    const auto rows = qlink::run_locations(build_spec(with_default));
    Output out(o.out_path);
    if (o.format == "json") {
        qlink::write_locations_json(out.stream(), rows);
    } else {
        qlink::write_locations_csv(out.stream(), rows);
    }
    if (o.strict) {
        for (const auto& r : rows) {
            if (!r.converged) return kExitNotConverged;
        }
    }
    return kExitOk;
}

int run_threshold_cmd(const CommonOptions& o) {
    CommonOptions with_default = o;
    if (!with_default.nodes) with_default.nodes = "1";
    const qlink::SweepSpec spec = build_spec(with_default);
    if (spec.node_counts.size() != 1 || spec.node_counts.front() < 1) {
        throw qlink::ConfigError("nodes", "threshold needs exactly one node count >= 1");
    }
    qlink::OptimizerSettings settings;
    settings.seed = spec.seed;
    settings.starts = spec.starts;
    settings.evaluation_budget = spec.evaluation_budget;
    const int n = spec.node_counts.front();
    const auto t = qlink::loss_only_threshold(spec.alpha_per_km, qlink::InputPower(spec.n_bar), n, settings);
    Output out(o.out_path);
    if (o.format == "json") {
        nlohmann::json doc = {{"n_nodes", n},
                              {"length_km", nlohmann::json::parse(qlink::format_number(t.length_km))},
                              {"attenuation_db", nlohmann::json::parse(qlink::format_number(t.attenuation_db))}};
        out.stream() << doc.dump(2) << '\n';
    } else {
        out.stream() << "n_nodes,length_km,attenuation_db\n"
                     << n << ',' << qlink::format_number(t.length_km) << ','
                     << qlink::format_number(t.attenuation_db) << '\n';
    }
    return kExitOk;
}

int run_single_cmd(const std::string& path, const std::string& format) {
    const qlink::SingleReport report = qlink::run_single(std::filesystem::path(path));
    if (format == "json") {
        qlink::write_single_json(std::cout, report);
    } else {
        qlink::write_single_text(std::cout, report);
    }
    return report.feasible ? kExitOk : kExitConstraint;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shannon and Holevo limits of amplified multi-span optical links"};
    app.require_subcommand(1);

    CommonOptions sweep_opts;
    CommonOptions locations_opts;
    CommonOptions threshold_opts;
    add_common(app.add_subcommand("sweep", "Optimized SE over a length x node-count grid"), sweep_opts);
    add_common(app.add_subcommand("locations", "Optimal amplifier positions vs. length"), locations_opts);
    add_common(app.add_subcommand("threshold", "Loss-only crossover length (Holevo)"), threshold_opts);

    std::string single_path;
    std::string single_format = "text";
    auto* single = app.add_subcommand("single", "Evaluate one LinkConfig JSON document");
    single->add_option("config", single_path, "LinkConfig document")->required();
    single->add_option("--format", single_format, "text | json")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand("sweep")) return run_sweep_cmd(sweep_opts);
        if (app.got_subcommand("locations")) return run_locations_cmd(locations_opts);
        if (app.got_subcommand("threshold")) return run_threshold_cmd(threshold_opts);
        if (app.got_subcommand("single")) return run_single_cmd(single_path, single_format);
    } catch (const qlink::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const qlink::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
