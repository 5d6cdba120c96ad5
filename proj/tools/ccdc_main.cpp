// ccdc: build lattice placements for cascaded coded distributed computing,
// run the coded shuffle bit-exactly, and verify measured load against the
// closed forms. Subcommands: design, simulate, verify, sweep.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ccdc/io.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<int> s;
    std::string x;
    std::optional<int> eta1, eta2;
    std::optional<int> t_bits;
    std::optional<std::uint64_t> seed, coeff_seed;
    std::string strategy;
    std::string sender_policy;
    std::optional<int> jobs;
    bool map_digests = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "key = value config file");
    cmd->add_option("--s", flags.s, "number of node groups (>= 2)");
    cmd->add_option("--x", flags.x, "group sizes, e.g. 4,6");
    cmd->add_option("--eta1", flags.eta1, "files per file set");
    cmd->add_option("--eta2", flags.eta2, "functions per function set");
    cmd->add_option("--t-bits", flags.t_bits, "intermediate value size in bits (default: auto)");
    cmd->add_option("--seed", flags.seed, "payload seed");
    cmd->add_option("--coeff-seed", flags.coeff_seed, "coefficient seed for packet combining");
    cmd->add_option("--strategy", flags.strategy, "default | all-b");
    cmd->add_option("--sender-policy", flags.sender_policy,
                    "lowest | round-robin (coded-pair sender choice)");
    cmd->add_option("--jobs", flags.jobs, "worker threads for the shuffle");
    cmd->add_flag("--map-digests", flags.map_digests, "include per-node map digests in reports");
}

// Config file first, then flags on top.
ccdc::io::RunConfig merge_config(const CommonFlags& flags) {
    ccdc::io::RunConfig config;
    if (!flags.config_path.empty()) config = ccdc::io::parse_config_file(flags.config_path);
    if (flags.s) config.params.s = *flags.s;
    if (!flags.x.empty()) config.params.x = ccdc::io::parse_int_list(flags.x);
    if (flags.eta1) config.params.eta1 = *flags.eta1;
    if (flags.eta2) config.params.eta2 = *flags.eta2;
    if (flags.t_bits) config.t_bits = *flags.t_bits;
    if (flags.seed) config.seed = *flags.seed;
    if (flags.coeff_seed) config.coeff_seed = *flags.coeff_seed;
    if (!flags.strategy.empty()) config.strategy = ccdc::io::strategy_from_string(flags.strategy);
    if (!flags.sender_policy.empty())
        config.sender_policy = ccdc::io::sender_policy_from_string(flags.sender_policy);
    if (flags.jobs) config.jobs = *flags.jobs;
    config.map_digests = flags.map_digests;
    return config;
}

void write_output(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << body;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cascaded coded distributed computing simulator"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string out_path;
    std::string format = "json";

    auto* cmd_design = app.add_subcommand("design", "construct and dump a placement");
    add_common_flags(cmd_design, flags);
    cmd_design->add_option("--out", out_path, "output path (default stdout)");
    cmd_design->add_option("--format", format, "json | table")
        ->check(CLI::IsMember({"json", "table"}));

    auto* cmd_simulate = app.add_subcommand("simulate", "map, shuffle, decode and audit one run");
    add_common_flags(cmd_simulate, flags);
    cmd_simulate->add_option("--out", out_path, "output path (default stdout)");
    cmd_simulate->add_option("--format", format, "json report | csv transmission ledger")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* cmd_verify = app.add_subcommand("verify", "simulate plus brute-force oracle checks");
    add_common_flags(cmd_verify, flags);
    cmd_verify->add_option("--out", out_path, "output path (default stdout)");

    auto* cmd_sweep = app.add_subcommand("sweep", "emit a CSV over a family of configurations");
    add_common_flags(cmd_sweep, flags);
    std::string x_range, x_list;
    bool sweep_simulate = false;
    cmd_sweep->add_option("--x-range", x_range,
                          "lo:hi, all x-vectors with s entries in [lo, hi]");
    cmd_sweep->add_option("--x-list", x_list, "explicit x-vectors, e.g. 4,6;2,2,4");
    cmd_sweep->add_flag("--simulate", sweep_simulate, "add measured-load columns");
    cmd_sweep->add_option("--out", out_path, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_design->parsed()) {
            ccdc::io::RunConfig config = merge_config(flags);
            config.params.validate();
            ccdc::Design design = ccdc::Design::build(config.params);
            write_output(out_path, format == "table"
                                       ? ccdc::io::design_table(design)
                                       : ccdc::io::design_to_json(design).dump(2) + "\n");
            return 0;
        }

        if (cmd_simulate->parsed()) {
            ccdc::io::RunConfig config = merge_config(flags);
            if (format == "csv") {
                // the full ledger needs the shuffle outputs, so rerun at this level
                config.params.validate();
                ccdc::Design design = ccdc::Design::build(config.params);
                int t_bits =
                    config.t_bits.value_or(ccdc::auto_t_bits(config.params, config.strategy));
                ccdc::MapOutput mapout = ccdc::run_map(design, t_bits, config.seed);
                ccdc::ShuffleOptions opts;
                opts.strategy = config.strategy;
                opts.sender_policy = config.sender_policy;
                opts.coeff_seed = config.coeff_seed;
                opts.jobs = config.jobs;
                ccdc::ShuffleResult result = ccdc::run_shuffle(design, mapout, opts);
                write_output(out_path, ccdc::io::ledger_to_csv(result.ledger));
                return 0;
            }
            ccdc::io::RunReport report = ccdc::io::simulate(config);
            write_output(out_path, ccdc::io::report_to_json(report).dump(2) + "\n");
            return report.ok() ? 0 : 1;
        }

        if (cmd_verify->parsed()) {
            ccdc::io::RunConfig config = merge_config(flags);
            ccdc::io::VerifyReport report = ccdc::io::verify(config);
            write_output(out_path, ccdc::io::verify_to_json(report).dump(2) + "\n");
            return report.ok() ? 0 : 1;
        }

        if (cmd_sweep->parsed()) {
            ccdc::io::RunConfig base = merge_config(flags);
            ccdc::io::SweepSpec spec;
            spec.simulate = sweep_simulate;
            spec.seed = base.seed;
            spec.coeff_seed = base.coeff_seed;
            spec.jobs = base.jobs;
            int s = base.params.s;
            if (!x_list.empty()) {
                std::string token;
                auto flush = [&]() {
                    if (token.empty()) return;
                    ccdc::DesignParams p = base.params;
                    p.x = ccdc::io::parse_int_list(token);
                    p.s = (int)p.x.size();
                    spec.configs.push_back(p);
                    token.clear();
                };
                for (char c : x_list) {
                    if (c == ';') flush();
                    else token += c;
                }
                flush();
            }
            if (!x_range.empty()) {
                auto colon = x_range.find(':');
                if (colon == std::string::npos || s < 2)
                    throw std::invalid_argument("--x-range needs lo:hi and --s");
                int lo = std::stoi(x_range.substr(0, colon));
                int hi = std::stoi(x_range.substr(colon + 1));
                if (lo > hi) throw std::invalid_argument("--x-range lo exceeds hi");
                std::vector<int> x(s, lo);
                while (true) {
                    ccdc::DesignParams p = base.params;
                    p.x = x;
                    spec.configs.push_back(p);
                    int i = s - 1;
                    while (i >= 0 && x[i] == hi) --i;
                    if (i < 0) break;
                    ++x[i];
                    for (int z = i + 1; z < s; ++z) x[z] = lo;
                }
            }
            std::vector<std::string> warnings;
            std::string csv = ccdc::io::run_sweep_csv(spec, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
            write_output(out_path, csv);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
