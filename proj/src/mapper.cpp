#include "ccdc/mapper.hpp"

#include <stdexcept>

namespace ccdc {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t stream_key(std::int64_t function_id, std::int64_t file_id, std::uint64_t seed) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (std::uint64_t)function_id);
    h = splitmix64(h ^ (std::uint64_t)file_id);
    return h;
}

}  // namespace

void iv_payload_into(std::int64_t function_id, std::int64_t file_id, int t_bits,
                     std::uint64_t seed, std::uint8_t* out) {
    std::uint64_t key = stream_key(function_id, file_id, seed);
    int bytes = t_bits / 8;
    int full = bytes / 8;
    for (int b = 0; b < full; ++b) {
        std::uint64_t w = splitmix64(key + (std::uint64_t)b);
        for (int i = 0; i < 8; ++i) out[b * 8 + i] = (std::uint8_t)(w >> (8 * i));
    }
    int tail = bytes - full * 8;
    if (tail > 0) {
        std::uint64_t w = splitmix64(key + (std::uint64_t)full);
        for (int i = 0; i < tail; ++i) out[full * 8 + i] = (std::uint8_t)(w >> (8 * i));
    }
}

std::vector<std::uint8_t> iv_payload(std::int64_t function_id, std::int64_t file_id,
                                     int t_bits, std::uint64_t seed) {
    if (t_bits <= 0 || t_bits % 8 != 0)
        throw std::invalid_argument("iv_payload: t_bits must be a positive multiple of 8");
    std::vector<std::uint8_t> out(t_bits / 8);
    iv_payload_into(function_id, file_id, t_bits, seed, out.data());
    return out;
}

MapOutput::MapOutput(const Design& design, int t_bits, std::uint64_t seed)
    : design_(&design), t_bits_(t_bits), seed_(seed) {
    total_computed_ = (std::int64_t)design.params().s * design.num_files() * design.num_functions();
}

std::int64_t MapOutput::computation_load() const {
    return total_computed_ / (design_->num_files() * design_->num_functions());
}

bool MapOutput::holds(int node, std::int64_t function_id, std::int64_t file_id) const {
    design_->function_set_of(function_id);  // id range check
    return design_->node_has_file(node, file_id);
}

std::vector<std::uint8_t> MapOutput::value(int node, std::int64_t function_id,
                                           std::int64_t file_id) const {
    if (!holds(node, function_id, file_id))
        throw std::logic_error("MapOutput: node does not store the file for that value");
    return iv_payload(function_id, file_id, t_bits_, seed_);
}

void MapOutput::value_into(int node, std::int64_t function_id, std::int64_t file_id,
                           std::uint8_t* out) const {
    if (!holds(node, function_id, file_id))
        throw std::logic_error("MapOutput: node does not store the file for that value");
    iv_payload_into(function_id, file_id, t_bits_, seed_, out);
}

MapOutput run_map(const Design& design, int t_bits, std::uint64_t seed) {
    if (t_bits <= 0 || t_bits % 8 != 0)
        throw std::invalid_argument("run_map: t_bits must be a positive multiple of 8");
    return MapOutput(design, t_bits, seed);
}

std::uint64_t node_map_digest(const MapOutput& mapout, int node) {
    const Design& d = mapout.design();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    std::vector<std::uint8_t> buf(mapout.payload_bytes());
    for (std::int64_t j : d.files_of(node)) {
        for (std::int64_t i = 1; i <= d.num_functions(); ++i) {
            mix((std::uint64_t)i);
            mix((std::uint64_t)j);
            iv_payload_into(i, j, mapout.t_bits(), mapout.seed(), buf.data());
            for (std::uint8_t b : buf) {
                h ^= b;
                h *= 0x100000001b3ULL;
            }
        }
    }
    return h;
}

}  // namespace ccdc
