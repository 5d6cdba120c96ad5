#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ccdc/design.hpp"
#include "ccdc/gf256.hpp"
#include "ccdc/mapper.hpp"
#include "ccdc/rational.hpp"

namespace ccdc {

// Default: coded-pair multicasts (method A) for rounds 1..s-1 and packet
// linear combinations (method B) for round s. AllB: method B every round.
enum class Strategy { kDefault, kAllB };

enum class Method : std::uint8_t { kA, kB };

// Any node of Y can send a method-A multicast. kLowestId picks the
// smallest id (reproducible reference ledgers); kRoundRobin rotates
// through Y by plan ordinal to spread per-node transmit counts. The
// choice never changes the traffic totals.
enum class SenderPolicy { kLowestId, kRoundRobin };

// One method-A multicast: a node of Y sends the XOR of two value sets to
// the 2*gamma nodes of S. s_prime is the side of the pair that shares
// T_ell with Y; by convention it holds the lower node of the lowest
// group in A, so each unordered pair is planned exactly once.
struct RoundPlanA {
    int gamma = 0;
    std::vector<int> group_ids;   // A, ascending
    std::vector<int> s_nodes;     // S, ascending, 2*gamma nodes
    std::vector<int> y_nodes;     // Y, ascending, s-gamma nodes
    std::vector<int> s_prime;     // ascending, gamma nodes
    int sender = 0;               // lowest node of Y
    std::int64_t alpha_cell = 0;  // cell of (S \ S') union Y
    std::int64_t ell_cell = 0;    // cell of S' union Y
};

// One method-B group: 2*gamma nodes, two per group in A, exchanging
// linear combinations of the packets of 2^gamma value sets. Value set
// `mask` takes, in each group slot g, the higher node of the pair when
// bit g of mask is set. Its intermediate values are stored flat in
// iv_pairs[mask*vset_size .. (mask+1)*vset_size), ascending (i, j).
struct RoundPlanB {
    int gamma = 0;
    std::vector<int> group_ids;                  // A, ascending
    std::vector<std::array<int, 2>> node_pairs;  // per group slot, {lo, hi}
    std::int64_t vset_size = 0;                  // eta1*eta2*prod_{m not in A} x_m
    std::vector<std::pair<std::int64_t, std::int64_t>> iv_pairs;

    int num_vsets() const { return 1 << gamma; }
    int num_packets() const { return 2 * gamma - 1; }
    int sender_node(int slot) const { return node_pairs[slot / 2][slot % 2]; }
    std::vector<int> s_prime_nodes(int mask) const;
    const std::pair<std::int64_t, std::int64_t>* vset_ivs(int mask) const {
        return iv_pairs.data() + (std::size_t)mask * vset_size;
    }
};

struct TransmissionRecord {
    int round = 0;
    Method method = Method::kA;
    int sender = 0;
    std::vector<int> receivers;  // ascending
    std::int64_t bits = 0;
    std::vector<std::uint8_t> payload;
    // method A decode context
    std::int64_t alpha_cell = -1;
    std::int64_t ell_cell = -1;
    // method B decode context
    std::int64_t plan_index = -1;
    int sender_slot = -1;
    int combo_index = -1;
};

struct RoundStats {
    int round = 0;
    Method method = Method::kA;
    std::int64_t transmissions = 0;
    std::int64_t bits = 0;
};

struct ShuffleLedger {
    int t_bits = 0;
    std::vector<TransmissionRecord> records;
    std::vector<RoundStats> rounds;  // index round-1
    Rational normalized_load;        // total bits / (Q*N*T)
    std::int64_t wasted_receptions = 0;  // receivers that already held everything; 0 by design

    std::int64_t total_bits() const;
    // Per-round traffic in units of T (exact).
    Rational round_bits_in_t(int round) const;
};

// Bit-exact store of everything a node received and decoded during the
// shuffle. One entry per (node, function, file); payload length is the
// same for all entries.
class DeliveredStore {
public:
    DeliveredStore() = default;
    DeliveredStore(int num_nodes, int payload_bytes);

    int payload_bytes() const { return payload_bytes_; }
    void add(int node, std::int64_t function_id, std::int64_t file_id,
             const std::uint8_t* bytes);
    void finalize();  // sorts the per-node indexes; throws on duplicates
    const std::uint8_t* find(int node, std::int64_t function_id,
                             std::int64_t file_id) const;
    bool erase(int node, std::int64_t function_id, std::int64_t file_id);
    std::int64_t count(int node) const;
    std::int64_t total() const;

private:
    struct NodeStore {
        std::vector<std::pair<std::uint64_t, std::uint32_t>> index;  // key -> byte offset
        std::vector<std::uint8_t> bytes;
    };
    int payload_bytes_ = 0;
    bool finalized_ = false;
    std::vector<NodeStore> nodes_;
};

// Deterministic coefficient schedule for one method-B round. Coefficients
// are drawn from coeff_seed and the decoding system of every receiver
// position is verified invertible before use; on a singular draw the
// whole schedule is redrawn (bounded by retry_limit). The same schedule
// serves every node group of the round, so the verified inverses are
// computed once and reused.
class RoundCoding {
public:
    static RoundCoding build(int gamma, std::uint64_t coeff_seed, int retry_limit = 16);

    int gamma() const { return gamma_; }
    int num_combos() const { return 1 << (gamma_ - 1); }
    int system_size() const { return (2 * gamma_ - 1) * (1 << (gamma_ - 1)); }
    int attempts_used() const { return attempts_; }

    std::uint8_t coeff(int sender_slot, int combo, int mask, int packet) const;
    static bool slot_holds_mask(int slot, int mask) {
        return ((mask >> (slot / 2)) & 1) == (slot & 1);
    }
    const gf256::Matrix& receiver_inverse(int receiver_slot) const {
        return inverses_[receiver_slot];
    }

private:
    int gamma_ = 0;
    int attempts_ = 0;
    std::vector<std::uint8_t> tensor_;
    std::vector<gf256::Matrix> inverses_;
};

// --- round enumeration / coding ---

// All method-A plans of round gamma (1 <= gamma <= s-1), in lexicographic
// (A, S, S', Y) order. Plan count per A is X * prod_{i in A}(x_i - 1) / 2.
std::vector<RoundPlanA> enumerate_method_a(const Design& design, int gamma,
                                           SenderPolicy policy = SenderPolicy::kLowestId);

// All method-B plans of round gamma (1 <= gamma <= s), lexicographic (A, S).
std::vector<RoundPlanB> enumerate_method_b(const Design& design, int gamma);

TransmissionRecord encode_method_a(const Design& design, const RoundPlanA& plan,
                                   const MapOutput& mapout);

// Recovers the side of the coded pair the receiver requests. A receiver
// that already holds both sides gets an empty result and *wasted = true;
// a receiver holding neither side is a scheme violation and throws.
std::vector<IntermediateValue> decode_method_a(const Design& design,
                                               const TransmissionRecord& record,
                                               int receiver, const MapOutput& mapout,
                                               bool* wasted = nullptr);

std::vector<TransmissionRecord> encode_method_b(const Design& design, const RoundPlanB& plan,
                                                std::int64_t plan_index,
                                                const MapOutput& mapout,
                                                const RoundCoding& coding);

std::vector<IntermediateValue> decode_method_b(const Design& design, const RoundPlanB& plan,
                                               const std::vector<TransmissionRecord>& records,
                                               int receiver, const MapOutput& mapout,
                                               const RoundCoding& coding);

// --- full shuffle ---

struct ShuffleOptions {
    Strategy strategy = Strategy::kDefault;
    SenderPolicy sender_policy = SenderPolicy::kLowestId;
    std::uint64_t coeff_seed = 1;
    int jobs = 1;
    bool decode = true;  // false measures the ledger without receivers
    int rank_retry_limit = 16;
};

struct ShuffleResult {
    ShuffleLedger ledger;
    DeliveredStore delivered;
};

ShuffleResult run_shuffle(const Design& design, const MapOutput& mapout,
                          const ShuffleOptions& options = {});

// Smallest t_bits compatible with the strategy: 8 * lcm{2g-1 : rounds g
// where method B runs}. Any valid t_bits must be a multiple of it.
int auto_t_bits(const DesignParams& params, Strategy strategy);
void validate_t_bits(int t_bits, const DesignParams& params, Strategy strategy);

}  // namespace ccdc
