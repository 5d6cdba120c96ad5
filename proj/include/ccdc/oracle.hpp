#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccdc/design.hpp"
#include "ccdc/mapper.hpp"
#include "ccdc/rational.hpp"
#include "ccdc/shuffle.hpp"

// Brute-force verification paths. Everything here works from exhaustive
// membership tests and its own enumeration loops; it deliberately shares
// no plan machinery with the shuffle so the two can disagree.
namespace ccdc::oracle {

// Instances above this many lattice cells are refused unless the caller
// passes override_guard: the exhaustive paths are quadratic in X.
inline constexpr std::int64_t kDefaultCellGuard = 10000;

struct Histogram {
    // by_requesters[g] = number of (function, file) pairs requested by
    // exactly g nodes, g = 0..s. Sums to Q*N.
    std::vector<std::int64_t> by_requesters;
};

Histogram requester_histogram(const Design& design,
                              std::int64_t cell_guard = kDefaultCellGuard,
                              bool override_guard = false);

// Exhaustively re-derives the requester set of every (function, file)
// pair from per-node membership and compares with Design::requesters.
// Returns the number of disagreeing pairs (0 when consistent).
std::int64_t verify_requesters(const Design& design,
                               std::int64_t cell_guard = kDefaultCellGuard,
                               bool override_guard = false);

struct AuditFailure {
    int node = 0;
    std::int64_t function_id = 0;
    std::int64_t file_id = 0;
    bool corrupt = false;  // present but wrong bytes (else missing)
    std::string provenance;
};

struct AuditReport {
    std::int64_t values_required = 0;    // sum over nodes of |W_k| * N
    std::int64_t locally_computed = 0;
    std::int64_t remotely_required = 0;
    std::int64_t present = 0;
    std::int64_t missing = 0;
    std::int64_t corrupt = 0;
    std::int64_t delivered_total = 0;    // entries in the store
    std::vector<AuditFailure> failures;  // capped at kMaxFailuresKept
    bool ok() const { return missing == 0 && corrupt == 0; }

    static constexpr std::size_t kMaxFailuresKept = 200;
};

// Confirms, bit for bit, that every node can assemble v_{i,j} for all of
// its assigned functions i and every file j, either locally or from the
// delivered store. Failures carry the cell pair that should have covered
// the value.
AuditReport audit_delivery(const Design& design, const MapOutput& mapout,
                           const DeliveredStore& delivered);

struct BruteForceLoad {
    std::vector<Rational> round_bits_in_t;        // index round-1, units of T
    std::vector<std::int64_t> round_transmissions;
    Rational load;                                // total / (Q*N), units of T cancel
};

BruteForceLoad count_load_bruteforce_detailed(const Design& design, Strategy strategy,
                                              std::int64_t cell_guard = kDefaultCellGuard,
                                              bool override_guard = false);

Rational count_load_bruteforce(const Design& design, Strategy strategy,
                               std::int64_t cell_guard = kDefaultCellGuard,
                               bool override_guard = false);

}  // namespace ccdc::oracle
