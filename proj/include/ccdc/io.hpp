#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccdc/analysis.hpp"
#include "ccdc/design.hpp"
#include "ccdc/oracle.hpp"
#include "ccdc/rational.hpp"
#include "ccdc/shuffle.hpp"

namespace ccdc::io {

using json = nlohmann::ordered_json;

Strategy strategy_from_string(const std::string& name);  // "default" / "all-b"
std::string strategy_to_string(Strategy strategy);
SenderPolicy sender_policy_from_string(const std::string& name);  // "lowest" / "round-robin"
std::string sender_policy_to_string(SenderPolicy policy);

std::vector<int> parse_int_list(const std::string& text);  // "4,6" or "4 6"

// Everything one end-to-end run needs. Flat key/value config files feed
// this; CLI flags overwrite fields afterwards.
struct RunConfig {
    DesignParams params;
    std::optional<int> t_bits;  // empty -> auto_t_bits for the strategy
    std::uint64_t seed = 1;
    std::uint64_t coeff_seed = 1;
    Strategy strategy = Strategy::kDefault;
    SenderPolicy sender_policy = SenderPolicy::kLowestId;
    int jobs = 1;
    bool map_digests = false;  // adds a per-node map digest to the report
};

// Accepted keys: s, x, eta1, eta2, t_bits, seed, coeff_seed, strategy,
// jobs. Lines are "key = value"; '#' starts a comment. Unknown keys are
// rejected.
RunConfig parse_config_file(const std::string& path);
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

json rational_to_json(const Rational& r);
json design_to_json(const Design& design);
std::string design_table(const Design& design);  // human-readable per-node summary

std::string ledger_to_csv(const ShuffleLedger& ledger);
json ledger_summary_json(const ShuffleLedger& ledger, const Design& design);

struct RunReport {
    DesignParams params;
    Strategy strategy = Strategy::kDefault;
    SenderPolicy sender_policy = SenderPolicy::kLowestId;
    int t_bits = 0;
    std::uint64_t seed = 0;
    std::uint64_t coeff_seed = 0;
    std::int64_t total_map_computations = 0;
    std::int64_t measured_computation_load = 0;
    int formula_computation_load = 0;
    std::vector<RoundStats> rounds;
    Rational measured_load;
    Rational formula_load;
    bool load_matches_formula = false;
    std::int64_t wasted_receptions = 0;
    oracle::AuditReport audit;
    std::vector<std::uint64_t> map_digests;  // per node, only when requested

    bool ok() const {
        return audit.ok() && wasted_receptions == 0 &&
               (strategy != Strategy::kDefault || load_matches_formula);
    }
};

// map -> shuffle -> decode -> audit, plus the closed-form comparison.
RunReport simulate(const RunConfig& config);
json report_to_json(const RunReport& report, const ShuffleLedger* ledger = nullptr);

struct VerifyReport {
    RunReport run;
    std::int64_t requester_mismatches = 0;
    std::vector<std::int64_t> histogram;
    bool histogram_matches_design = false;
    oracle::BruteForceLoad brute;
    bool brute_matches_ledger = false;

    bool ok() const {
        return run.ok() && requester_mismatches == 0 && histogram_matches_design &&
               brute_matches_ledger;
    }
};

// simulate() plus the independent oracle: exhaustive requester
// classification and brute-force load recount against the ledger.
VerifyReport verify(const RunConfig& config);
json verify_to_json(const VerifyReport& report);

struct SweepSpec {
    std::vector<DesignParams> configs;
    bool simulate = false;  // adds measured-load columns (slower)
    std::uint64_t seed = 1;
    std::uint64_t coeff_seed = 1;
    int jobs = 1;
};

// One CSV row per valid configuration; invalid entries are skipped and
// reported through `warnings`. Header is always emitted.
std::string run_sweep_csv(const SweepSpec& spec, std::vector<std::string>* warnings = nullptr);

}  // namespace ccdc::io
