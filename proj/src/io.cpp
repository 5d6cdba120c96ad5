#include "ccdc/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "ccdc/mapper.hpp"

namespace ccdc::io {

Strategy strategy_from_string(const std::string& name) {
    if (name == "default") return Strategy::kDefault;
    if (name == "all-b" || name == "all_b" || name == "allb") return Strategy::kAllB;
    throw std::invalid_argument("unknown strategy '" + name + "' (expected default or all-b)");
}

std::string strategy_to_string(Strategy strategy) {
    return strategy == Strategy::kDefault ? "default" : "all-b";
}

SenderPolicy sender_policy_from_string(const std::string& name) {
    if (name == "lowest") return SenderPolicy::kLowestId;
    if (name == "round-robin" || name == "round_robin") return SenderPolicy::kRoundRobin;
    throw std::invalid_argument("unknown sender policy '" + name +
                                "' (expected lowest or round-robin)");
}

std::string sender_policy_to_string(SenderPolicy policy) {
    return policy == SenderPolicy::kLowestId ? "lowest" : "round-robin";
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::string token;
    auto flush = [&]() {
        if (token.empty()) return;
        size_t pos = 0;
        int v = std::stoi(token, &pos);
        if (pos != token.size()) throw std::invalid_argument("bad integer '" + token + "'");
        out.push_back(v);
        token.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t') flush();
        else token += c;
    }
    flush();
    return out;
}

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "s") config.params.s = std::stoi(value);
    else if (key == "x") config.params.x = parse_int_list(value);
    else if (key == "eta1") config.params.eta1 = std::stoi(value);
    else if (key == "eta2") config.params.eta2 = std::stoi(value);
    else if (key == "t_bits") config.t_bits = std::stoi(value);
    else if (key == "seed") config.seed = std::stoull(value);
    else if (key == "coeff_seed") config.coeff_seed = std::stoull(value);
    else if (key == "strategy") config.strategy = strategy_from_string(value);
    else if (key == "sender_policy") config.sender_policy = sender_policy_from_string(value);
    else if (key == "jobs") config.jobs = std::stoi(value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    RunConfig config;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto strip = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string body = strip(line);
        if (body.empty()) continue;
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        try {
            apply_config_entry(config, strip(body.substr(0, eq)), strip(body.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return config;
}

json rational_to_json(const Rational& r) {
    json j;
    j["num"] = std::to_string(r.num());
    j["den"] = std::to_string(r.den());
    j["decimal"] = r.to_decimal_string();
    return j;
}

namespace {

json params_to_json(const DesignParams& params) {
    json j;
    j["s"] = params.s;
    j["x"] = params.x;
    j["eta1"] = params.eta1;
    j["eta2"] = params.eta2;
    j["K"] = params.num_nodes();
    j["X"] = params.num_cells();
    j["N"] = params.num_files();
    j["Q"] = params.num_functions();
    return j;
}

std::string join_ints(const std::vector<int>& v, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(v[i]);
    }
    return out;
}

}  // namespace

json design_to_json(const Design& design) {
    json j;
    j["params"] = params_to_json(design.params());
    j["groups"] = design.groups();
    json cells = json::array();
    for (std::int64_t c = 1; c <= design.num_cells(); ++c) {
        json cell;
        cell["cell"] = c;
        cell["tuple"] = design.tuple_of(c);
        cell["nodes"] = design.members(c);
        auto [flo, fhi] = design.file_range(c);
        auto [qlo, qhi] = design.function_range(c);
        json files = json::array(), funcs = json::array();
        for (std::int64_t f = flo; f <= fhi; ++f) files.push_back(f);
        for (std::int64_t q = qlo; q <= qhi; ++q) funcs.push_back(q);
        cell["files"] = files;
        cell["functions"] = funcs;
        cells.push_back(std::move(cell));
    }
    j["cells"] = std::move(cells);
    json nodes = json::array();
    for (int node = 1; node <= design.num_nodes(); ++node) {
        NodeView view = design.node_view(node);
        json n;
        n["node"] = node;
        n["group"] = design.group_of(node);
        n["files"] = view.files;
        n["functions"] = view.functions;
        nodes.push_back(std::move(n));
    }
    j["nodes"] = std::move(nodes);
    return j;
}

std::string design_table(const Design& design) {
    std::ostringstream out;
    const auto& params = design.params();
    out << params.describe() << "  K=" << params.num_nodes() << " X=" << params.num_cells()
        << " N=" << params.num_files() << " Q=" << params.num_functions() << "\n";
    out << std::setw(5) << "node" << std::setw(7) << "group" << std::setw(8) << "files"
        << std::setw(11) << "functions" << "\n";
    for (int node = 1; node <= design.num_nodes(); ++node) {
        int m = design.group_of(node);
        out << std::setw(5) << node << std::setw(7) << m << std::setw(8)
            << design.num_files() / params.x[m - 1] << std::setw(11)
            << design.num_functions() / params.x[m - 1] << "\n";
    }
    return out.str();
}

std::string ledger_to_csv(const ShuffleLedger& ledger) {
    std::string out = "round,method,sender,receivers,bits\n";
    for (const auto& rec : ledger.records) {
        out += std::to_string(rec.round);
        out += rec.method == Method::kA ? ",A," : ",B,";
        out += std::to_string(rec.sender);
        out += ",";
        out += join_ints(rec.receivers, "|");
        out += "," + std::to_string(rec.bits) + "\n";
    }
    return out;
}

json ledger_summary_json(const ShuffleLedger& ledger, const Design& design) {
    json j;
    j["t_bits"] = ledger.t_bits;
    json rounds = json::array();
    for (const auto& r : ledger.rounds) {
        json jr;
        jr["round"] = r.round;
        jr["method"] = r.method == Method::kA ? "A" : "B";
        jr["transmissions"] = r.transmissions;
        jr["bits"] = r.bits;
        jr["bits_in_T"] = rational_to_json(ledger.round_bits_in_t(r.round));
        rounds.push_back(std::move(jr));
    }
    j["rounds"] = std::move(rounds);
    j["total_bits"] = ledger.total_bits();
    j["wasted_receptions"] = ledger.wasted_receptions;
    j["normalized_load"] = rational_to_json(ledger.normalized_load);
    j["QN"] = design.num_functions() * design.num_files();
    return j;
}

namespace {

struct RunOutputs {
    RunReport report;
    ShuffleLedger ledger;
    std::unique_ptr<Design> design;  // owned on the heap: MapOutput refers to it
    std::unique_ptr<MapOutput> mapout;
    DeliveredStore delivered;
};

RunOutputs run_pipeline(const RunConfig& config) {
    config.params.validate();
    RunOutputs out;
    out.design = std::make_unique<Design>(Design::build(config.params));
    int t_bits = config.t_bits.value_or(auto_t_bits(config.params, config.strategy));
    validate_t_bits(t_bits, config.params, config.strategy);
    out.mapout = std::make_unique<MapOutput>(run_map(*out.design, t_bits, config.seed));

    ShuffleOptions opts;
    opts.strategy = config.strategy;
    opts.sender_policy = config.sender_policy;
    opts.coeff_seed = config.coeff_seed;
    opts.jobs = config.jobs;
    ShuffleResult shuffled = run_shuffle(*out.design, *out.mapout, opts);

    RunReport report;
    report.params = config.params;
    report.strategy = config.strategy;
    report.sender_policy = config.sender_policy;
    report.t_bits = t_bits;
    report.seed = config.seed;
    report.coeff_seed = config.coeff_seed;
    report.total_map_computations = out.mapout->total_computed();
    report.measured_computation_load = out.mapout->computation_load();
    report.formula_computation_load = computation_load(config.params);
    report.rounds = shuffled.ledger.rounds;
    report.measured_load = shuffled.ledger.normalized_load;
    report.formula_load = communication_load_formula(config.params);
    report.load_matches_formula = report.measured_load == report.formula_load;
    report.wasted_receptions = shuffled.ledger.wasted_receptions;
    report.audit = oracle::audit_delivery(*out.design, *out.mapout, shuffled.delivered);
    if (config.map_digests)
        for (int node = 1; node <= out.design->num_nodes(); ++node)
            report.map_digests.push_back(node_map_digest(*out.mapout, node));

    out.report = std::move(report);
    out.ledger = std::move(shuffled.ledger);
    out.delivered = std::move(shuffled.delivered);
    return out;
}

}  // namespace

RunReport simulate(const RunConfig& config) { return run_pipeline(config).report; }

json report_to_json(const RunReport& report, const ShuffleLedger* ledger) {
    json j;
    j["params"] = params_to_json(report.params);
    j["strategy"] = strategy_to_string(report.strategy);
    j["sender_policy"] = sender_policy_to_string(report.sender_policy);
    j["t_bits"] = report.t_bits;
    j["seed"] = report.seed;
    j["coeff_seed"] = report.coeff_seed;
    j["map"] = {{"total_computed", report.total_map_computations},
                {"computation_load", report.measured_computation_load},
                {"computation_load_formula", report.formula_computation_load}};
    json rounds = json::array();
    for (const auto& r : report.rounds) {
        json jr;
        jr["round"] = r.round;
        jr["method"] = r.method == Method::kA ? "A" : "B";
        jr["transmissions"] = r.transmissions;
        jr["bits"] = r.bits;
        jr["bits_in_T"] = Rational(r.bits, report.t_bits).to_decimal_string();
        rounds.push_back(std::move(jr));
    }
    j["rounds"] = std::move(rounds);
    j["measured_load"] = rational_to_json(report.measured_load);
    j["formula_load"] = rational_to_json(report.formula_load);
    j["load_matches_formula"] = report.load_matches_formula;
    j["wasted_receptions"] = report.wasted_receptions;
    j["audit"] = {{"values_required", report.audit.values_required},
                  {"locally_computed", report.audit.locally_computed},
                  {"remotely_required", report.audit.remotely_required},
                  {"present", report.audit.present},
                  {"missing", report.audit.missing},
                  {"corrupt", report.audit.corrupt},
                  {"delivered_total", report.audit.delivered_total}};
    if (!report.audit.failures.empty()) {
        json fails = json::array();
        for (const auto& f : report.audit.failures) {
            fails.push_back({{"node", f.node},
                             {"function", f.function_id},
                             {"file", f.file_id},
                             {"kind", f.corrupt ? "corrupt" : "missing"},
                             {"provenance", f.provenance}});
        }
        j["audit"]["failures"] = std::move(fails);
    }
    if (!report.map_digests.empty()) {
        json digests = json::array();
        for (auto d : report.map_digests) {
            char buf[19];
            std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)d);
            digests.push_back(std::string(buf));
        }
        j["map_digests"] = std::move(digests);
    }
    j["ok"] = report.ok();
    if (ledger) j["ledger"] = ledger_summary_json(*ledger, Design::build(report.params));
    return j;
}

VerifyReport verify(const RunConfig& config) {
    RunOutputs outputs = run_pipeline(config);
    const Design& design = *outputs.design;
    VerifyReport v;
    v.run = std::move(outputs.report);

    v.requester_mismatches = oracle::verify_requesters(design);
    oracle::Histogram h = oracle::requester_histogram(design);
    v.histogram = h.by_requesters;

    // design-side histogram from the lattice classification
    std::vector<std::int64_t> lattice(design.params().s + 1, 0);
    for (std::int64_t i = 1; i <= design.num_functions(); ++i)
        for (std::int64_t j = 1; j <= design.num_files(); ++j)
            ++lattice.at(design.requester_count(i, j));
    v.histogram_matches_design = lattice == v.histogram;

    v.brute = oracle::count_load_bruteforce_detailed(design, config.strategy);
    v.brute_matches_ledger = v.brute.load == outputs.ledger.normalized_load;
    for (int round = 1; round <= design.params().s && v.brute_matches_ledger; ++round)
        if (v.brute.round_bits_in_t[round - 1] != outputs.ledger.round_bits_in_t(round))
            v.brute_matches_ledger = false;
    return v;
}

json verify_to_json(const VerifyReport& report) {
    json j;
    j["run"] = report_to_json(report.run);
    j["oracle"] = {{"requester_mismatches", report.requester_mismatches},
                   {"histogram", report.histogram},
                   {"histogram_matches_design", report.histogram_matches_design},
                   {"bruteforce_load", rational_to_json(report.brute.load)},
                   {"bruteforce_matches_ledger", report.brute_matches_ledger}};
    j["ok"] = report.ok();
    return j;
}

std::string run_sweep_csv(const SweepSpec& spec, std::vector<std::string>* warnings) {
    std::string csv =
        "K,s,x,eta1,eta2,X,N,Q,r,load,load_num,load_den,per_round_bits_T,"
        "simulated_load,simulated_matches\n";
    for (const auto& params : spec.configs) {
        try {
            params.validate();
        } catch (const std::exception& e) {
            if (warnings)
                warnings->push_back("skipping " + params.describe() + ": " + e.what());
            continue;
        }
        LoadFormulaResult formula = load_formula(params);
        std::string per_round;
        for (int g = 1; g <= params.s; ++g) {
            if (g > 1) per_round += ";";
            Rational bits = g < params.s ? formula.per_round_pair_bits[g - 1]
                                         : formula.final_round_bits;
            per_round += bits.to_decimal_string();
        }
        csv += std::to_string(params.num_nodes()) + "," + std::to_string(params.s) + "," +
               join_ints(params.x, "x") + "," + std::to_string(params.eta1) + "," +
               std::to_string(params.eta2) + "," + std::to_string(params.num_cells()) + "," +
               std::to_string(params.num_files()) + "," + std::to_string(params.num_functions()) +
               "," + std::to_string(formula.computation_load) + "," +
               formula.communication_load.to_decimal_string() + "," +
               std::to_string(formula.communication_load.num()) + "," +
               std::to_string(formula.communication_load.den()) + "," + per_round;
        if (spec.simulate) {
            RunConfig rc;
            rc.params = params;
            rc.seed = spec.seed;
            rc.coeff_seed = spec.coeff_seed;
            rc.jobs = spec.jobs;
            try {
                RunReport run = simulate(rc);
                csv += "," + run.measured_load.to_decimal_string() + "," +
                       (run.load_matches_formula && run.audit.ok() ? "true" : "false");
            } catch (const std::exception& e) {
                if (warnings)
                    warnings->push_back("simulation failed for " + params.describe() + ": " +
                                        e.what());
                csv += ",,false";
            }
        } else {
            csv += ",,";
        }
        csv += "\n";
    }
    return csv;
}

}  // namespace ccdc::io
