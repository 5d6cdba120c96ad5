#pragma once

#include <cstdint>
#include <vector>

#include "ccdc/design.hpp"

namespace ccdc {

struct IntermediateValue {
    std::int64_t function_id = 0;
    std::int64_t file_id = 0;
    std::vector<std::uint8_t> payload;
};

// Deterministic synthetic payload of v_{i,j}: t_bits/8 bytes drawn from a
// splitmix64 stream keyed by (function_id, file_id, seed). The same pair
// always yields the same bytes, so recomputation stands in for storage.
std::vector<std::uint8_t> iv_payload(std::int64_t function_id, std::int64_t file_id,
                                     int t_bits, std::uint64_t seed);
void iv_payload_into(std::int64_t function_id, std::int64_t file_id, int t_bits,
                     std::uint64_t seed, std::uint8_t* out);

// Result of the Map phase. Availability is derived from the placement
// (node k holds v_{i,j} for every function i iff it stores file j);
// payloads are recomputed on demand, bit-identical at every holder.
class MapOutput {
public:
    MapOutput(const Design& design, int t_bits, std::uint64_t seed);

    int t_bits() const { return t_bits_; }
    int payload_bytes() const { return t_bits_ / 8; }
    std::uint64_t seed() const { return seed_; }
    std::int64_t total_computed() const { return total_computed_; }  // s*N*Q
    // total_computed / (Q*N); equals s for every valid design
    std::int64_t computation_load() const;

    bool holds(int node, std::int64_t function_id, std::int64_t file_id) const;
    // Throws std::logic_error if the node cannot compute that value locally.
    std::vector<std::uint8_t> value(int node, std::int64_t function_id,
                                    std::int64_t file_id) const;
    void value_into(int node, std::int64_t function_id, std::int64_t file_id,
                    std::uint8_t* out) const;

    const Design& design() const { return *design_; }

private:
    const Design* design_;
    int t_bits_;
    std::uint64_t seed_;
    std::int64_t total_computed_;
};

// Validates t_bits > 0 and t_bits % 8 == 0 and runs the Map phase.
// Strategy-specific packet divisibility is enforced by the shuffle.
MapOutput run_map(const Design& design, int t_bits, std::uint64_t seed);

// FNV-1a digest over every intermediate value the node computes, for
// debug comparison across hosts without serializing the map output.
std::uint64_t node_map_digest(const MapOutput& mapout, int node);

}  // namespace ccdc
