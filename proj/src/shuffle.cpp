#include "ccdc/shuffle.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace ccdc {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Visits all k-subsets of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_combination(int n, int k, Fn&& fn) {
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    if (k > n) return;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// Visits all assignments of digits[i] in 0..radix[i]-1, first digit slowest.
template <typename Fn>
void for_each_mixed_radix(const std::vector<int>& radix, Fn&& fn) {
    std::vector<int> digits(radix.size(), 0);
    while (true) {
        fn(digits);
        int i = (int)radix.size() - 1;
        while (i >= 0 && digits[i] == radix[i] - 1) --i;
        if (i < 0) return;
        ++digits[i];
        for (size_t j = i + 1; j < radix.size(); ++j) digits[j] = 0;
    }
}

std::uint64_t iv_key(std::int64_t function_id, std::int64_t file_id) {
    return ((std::uint64_t)function_id << 32) | (std::uint64_t)file_id;
}

std::int64_t odd_lcm_upto(int top) {
    std::int64_t l = 1;
    for (int v = 1; v <= top; v += 2) l = std::lcm(l, (std::int64_t)v);
    return l;
}

}  // namespace

// --- RoundPlanB helpers ---

std::vector<int> RoundPlanB::s_prime_nodes(int mask) const {
    std::vector<int> out;
    out.reserve(gamma);
    for (int g = 0; g < gamma; ++g) out.push_back(node_pairs[g][(mask >> g) & 1]);
    std::sort(out.begin(), out.end());
    return out;
}

// --- ShuffleLedger ---

std::int64_t ShuffleLedger::total_bits() const {
    std::int64_t t = 0;
    for (const auto& r : rounds) t += r.bits;
    return t;
}

Rational ShuffleLedger::round_bits_in_t(int round) const {
    if (round < 1 || round > (int)rounds.size())
        throw std::out_of_range("ShuffleLedger: round out of range");
    return Rational(rounds[round - 1].bits, t_bits);
}

// --- DeliveredStore ---

DeliveredStore::DeliveredStore(int num_nodes, int payload_bytes)
    : payload_bytes_(payload_bytes), nodes_(num_nodes) {}

void DeliveredStore::add(int node, std::int64_t function_id, std::int64_t file_id,
                         const std::uint8_t* bytes) {
    NodeStore& ns = nodes_.at(node - 1);
    if (ns.bytes.size() > std::numeric_limits<std::uint32_t>::max() - payload_bytes_)
        throw std::length_error("DeliveredStore: per-node arena exceeds 4 GiB");
    ns.index.emplace_back(iv_key(function_id, file_id), (std::uint32_t)ns.bytes.size());
    ns.bytes.insert(ns.bytes.end(), bytes, bytes + payload_bytes_);
    finalized_ = false;
}

void DeliveredStore::finalize() {
    for (auto& ns : nodes_) {
        std::sort(ns.index.begin(), ns.index.end());
        for (size_t i = 1; i < ns.index.size(); ++i)
            if (ns.index[i].first == ns.index[i - 1].first)
                throw std::logic_error("DeliveredStore: duplicate delivery of one value");
    }
    finalized_ = true;
}

const std::uint8_t* DeliveredStore::find(int node, std::int64_t function_id,
                                         std::int64_t file_id) const {
    if (!finalized_) throw std::logic_error("DeliveredStore: finalize() before lookups");
    const NodeStore& ns = nodes_.at(node - 1);
    std::uint64_t key = iv_key(function_id, file_id);
    auto it = std::lower_bound(ns.index.begin(), ns.index.end(),
                               std::make_pair(key, (std::uint32_t)0));
    if (it == ns.index.end() || it->first != key) return nullptr;
    return ns.bytes.data() + it->second;
}

bool DeliveredStore::erase(int node, std::int64_t function_id, std::int64_t file_id) {
    NodeStore& ns = nodes_.at(node - 1);
    std::uint64_t key = iv_key(function_id, file_id);
    auto match = [key](const auto& e) { return e.first == key; };
    auto it = std::find_if(ns.index.begin(), ns.index.end(), match);
    if (it == ns.index.end()) return false;
    ns.index.erase(it);  // bytes stay orphaned; the store is append-only
    return true;
}

std::int64_t DeliveredStore::count(int node) const { return nodes_.at(node - 1).index.size(); }

std::int64_t DeliveredStore::total() const {
    std::int64_t t = 0;
    for (const auto& ns : nodes_) t += ns.index.size();
    return t;
}

// --- t_bits contract ---

int auto_t_bits(const DesignParams& params, Strategy strategy) {
    params.validate();
    int top = 2 * params.s - 1;
    std::int64_t l = strategy == Strategy::kDefault ? top : odd_lcm_upto(top);
    std::int64_t bits = 8 * l;
    if (bits > std::numeric_limits<int>::max() / 2)
        throw std::invalid_argument("auto_t_bits: s too large for an in-memory payload");
    return (int)bits;
}

void validate_t_bits(int t_bits, const DesignParams& params, Strategy strategy) {
    int divisor = auto_t_bits(params, strategy);
    if (t_bits <= 0 || t_bits % divisor != 0)
        throw std::invalid_argument(
            "t_bits must be a positive multiple of " + std::to_string(divisor) +
            " bits for this strategy (8 x lcm of the packet counts 2g-1)");
}

// --- method A ---

std::vector<RoundPlanA> enumerate_method_a(const Design& design, int gamma,
                                           SenderPolicy policy) {
    const auto& params = design.params();
    if (gamma < 1 || gamma > params.s - 1)
        throw std::out_of_range(
            "enumerate_method_a: round must be in 1..s-1 (round s has no outside node)");

    std::vector<RoundPlanA> plans;
    std::vector<std::vector<int>> sorted_groups = design.groups();
    for (auto& g : sorted_groups) std::sort(g.begin(), g.end());

    for_each_combination(params.s, gamma, [&](const std::vector<int>& a_idx) {
        // per A-group list of node pairs, lexicographic
        std::vector<std::vector<std::array<int, 2>>> pair_lists(gamma);
        for (int g = 0; g < gamma; ++g) {
            const auto& nodes = sorted_groups[a_idx[g]];
            for (size_t i = 0; i < nodes.size(); ++i)
                for (size_t j = i + 1; j < nodes.size(); ++j)
                    pair_lists[g].push_back({nodes[i], nodes[j]});
        }
        std::vector<int> outside;  // group indices not in A
        for (int m = 0; m < params.s; ++m)
            if (!std::binary_search(a_idx.begin(), a_idx.end(), m)) outside.push_back(m);

        std::vector<int> pair_radix(gamma);
        for (int g = 0; g < gamma; ++g) pair_radix[g] = (int)pair_lists[g].size();
        std::vector<int> y_radix(outside.size());
        for (size_t i = 0; i < outside.size(); ++i) y_radix[i] = params.x[outside[i]];

        for_each_mixed_radix(pair_radix, [&](const std::vector<int>& pick) {
            std::vector<std::array<int, 2>> pairs(gamma);
            std::vector<int> s_nodes;
            for (int g = 0; g < gamma; ++g) {
                pairs[g] = pair_lists[g][pick[g]];
                s_nodes.push_back(pairs[g][0]);
                s_nodes.push_back(pairs[g][1]);
            }
            std::sort(s_nodes.begin(), s_nodes.end());

            // S' ranges over one node per pair with the first slot pinned
            // to the lower node, so each unordered split appears once.
            for (int free = 0; free < (1 << (gamma - 1)); ++free) {
                int mask = free << 1;
                std::vector<int> s_prime, s_rest;
                for (int g = 0; g < gamma; ++g) {
                    int side = (mask >> g) & 1;
                    s_prime.push_back(pairs[g][side]);
                    s_rest.push_back(pairs[g][1 - side]);
                }
                std::sort(s_prime.begin(), s_prime.end());
                std::sort(s_rest.begin(), s_rest.end());

                for_each_mixed_radix(y_radix, [&](const std::vector<int>& ypick) {
                    RoundPlanA plan;
                    plan.gamma = gamma;
                    for (int g = 0; g < gamma; ++g) plan.group_ids.push_back(a_idx[g] + 1);
                    plan.s_nodes = s_nodes;
                    plan.s_prime = s_prime;
                    for (size_t i = 0; i < outside.size(); ++i)
                        plan.y_nodes.push_back(design.node_at(outside[i] + 1, ypick[i] + 1));
                    std::sort(plan.y_nodes.begin(), plan.y_nodes.end());
                    plan.sender = policy == SenderPolicy::kLowestId
                                      ? plan.y_nodes.front()
                                      : plan.y_nodes[plans.size() % plan.y_nodes.size()];

                    std::vector<int> ell_members = s_prime;
                    ell_members.insert(ell_members.end(), plan.y_nodes.begin(), plan.y_nodes.end());
                    std::vector<int> alpha_members = s_rest;
                    alpha_members.insert(alpha_members.end(), plan.y_nodes.begin(),
                                         plan.y_nodes.end());
                    plan.ell_cell = design.cell_of_members(ell_members);
                    plan.alpha_cell = design.cell_of_members(alpha_members);
                    plans.push_back(std::move(plan));
                });
            }
        });
    });
    return plans;
}

TransmissionRecord encode_method_a(const Design& design, const RoundPlanA& plan,
                                   const MapOutput& mapout) {
    int ivb = mapout.payload_bytes();
    auto [fa_lo, fa_hi] = design.function_range(plan.alpha_cell);
    auto [bl_lo, bl_hi] = design.file_range(plan.ell_cell);
    auto [fl_lo, fl_hi] = design.function_range(plan.ell_cell);
    auto [ba_lo, ba_hi] = design.file_range(plan.alpha_cell);

    std::int64_t count = (fa_hi - fa_lo + 1) * (bl_hi - bl_lo + 1);
    std::vector<std::uint8_t> payload((size_t)count * ivb);
    std::vector<std::uint8_t> buf(ivb);

    size_t off = 0;
    for (std::int64_t i = fa_lo; i <= fa_hi; ++i)
        for (std::int64_t j = bl_lo; j <= bl_hi; ++j) {
            mapout.value_into(plan.sender, i, j, payload.data() + off);
            off += ivb;
        }
    off = 0;
    for (std::int64_t i = fl_lo; i <= fl_hi; ++i)
        for (std::int64_t j = ba_lo; j <= ba_hi; ++j) {
            mapout.value_into(plan.sender, i, j, buf.data());
            for (int b = 0; b < ivb; ++b) payload[off + b] ^= buf[b];
            off += ivb;
        }

    TransmissionRecord rec;
    rec.round = plan.gamma;
    rec.method = Method::kA;
    rec.sender = plan.sender;
    rec.receivers = plan.s_nodes;
    rec.bits = count * mapout.t_bits();
    rec.payload = std::move(payload);
    rec.alpha_cell = plan.alpha_cell;
    rec.ell_cell = plan.ell_cell;
    return rec;
}

std::vector<IntermediateValue> decode_method_a(const Design& design,
                                               const TransmissionRecord& record,
                                               int receiver, const MapOutput& mapout,
                                               bool* wasted) {
    if (wasted) *wasted = false;
    const auto& ell_members = design.members(record.ell_cell);
    const auto& alpha_members = design.members(record.alpha_cell);
    bool in_ell = std::binary_search(ell_members.begin(), ell_members.end(), receiver);
    bool in_alpha = std::binary_search(alpha_members.begin(), alpha_members.end(), receiver);
    if (in_ell && in_alpha) {
        if (wasted) *wasted = true;
        return {};
    }
    if (!in_ell && !in_alpha)
        throw std::logic_error("decode_method_a: receiver holds neither side of the pair");

    // Holding the ell side means the receiver computed the whole first set
    // and recovers the second; holding the alpha side is the mirror case.
    std::int64_t local_func_cell = in_ell ? record.alpha_cell : record.ell_cell;
    std::int64_t local_file_cell = in_ell ? record.ell_cell : record.alpha_cell;
    std::int64_t out_func_cell = in_ell ? record.ell_cell : record.alpha_cell;
    std::int64_t out_file_cell = in_ell ? record.alpha_cell : record.ell_cell;

    int ivb = mapout.payload_bytes();
    auto [li_lo, li_hi] = design.function_range(local_func_cell);
    auto [lj_lo, lj_hi] = design.file_range(local_file_cell);
    auto [oi_lo, oi_hi] = design.function_range(out_func_cell);
    auto [oj_lo, oj_hi] = design.file_range(out_file_cell);

    std::vector<std::uint8_t> recovered = record.payload;
    std::vector<std::uint8_t> buf(ivb);
    size_t off = 0;
    for (std::int64_t i = li_lo; i <= li_hi; ++i)
        for (std::int64_t j = lj_lo; j <= lj_hi; ++j) {
            mapout.value_into(receiver, i, j, buf.data());
            for (int b = 0; b < ivb; ++b) recovered[off + b] ^= buf[b];
            off += ivb;
        }

    // The two concatenations pair position-for-position: entry (a, b) of
    // the local (i, j) grid aligns with entry (a, b) of the output grid.
    std::vector<IntermediateValue> out;
    out.reserve((oi_hi - oi_lo + 1) * (oj_hi - oj_lo + 1));
    off = 0;
    for (std::int64_t i = oi_lo; i <= oi_hi; ++i)
        for (std::int64_t j = oj_lo; j <= oj_hi; ++j) {
            IntermediateValue iv;
            iv.function_id = i;
            iv.file_id = j;
            iv.payload.assign(recovered.begin() + off, recovered.begin() + off + ivb);
            out.push_back(std::move(iv));
            off += ivb;
        }
    return out;
}

// --- method B ---

std::vector<RoundPlanB> enumerate_method_b(const Design& design, int gamma) {
    const auto& params = design.params();
    if (gamma < 1 || gamma > params.s)
        throw std::out_of_range("enumerate_method_b: round must be in 1..s");

    std::vector<RoundPlanB> plans;
    std::vector<std::vector<int>> sorted_groups = design.groups();
    for (auto& g : sorted_groups) std::sort(g.begin(), g.end());

    for_each_combination(params.s, gamma, [&](const std::vector<int>& a_idx) {
        std::vector<std::vector<std::array<int, 2>>> pair_lists(gamma);
        for (int g = 0; g < gamma; ++g) {
            const auto& nodes = sorted_groups[a_idx[g]];
            for (size_t i = 0; i < nodes.size(); ++i)
                for (size_t j = i + 1; j < nodes.size(); ++j)
                    pair_lists[g].push_back({nodes[i], nodes[j]});
        }
        std::vector<int> outside;
        for (int m = 0; m < params.s; ++m)
            if (!std::binary_search(a_idx.begin(), a_idx.end(), m)) outside.push_back(m);
        std::vector<int> outside_radix(outside.size());
        std::int64_t shared = 1;
        for (size_t i = 0; i < outside.size(); ++i) {
            outside_radix[i] = params.x[outside[i]];
            shared *= params.x[outside[i]];
        }

        std::vector<int> pair_radix(gamma);
        for (int g = 0; g < gamma; ++g) pair_radix[g] = (int)pair_lists[g].size();

        for_each_mixed_radix(pair_radix, [&](const std::vector<int>& pick) {
            RoundPlanB plan;
            plan.gamma = gamma;
            for (int g = 0; g < gamma; ++g) plan.group_ids.push_back(a_idx[g] + 1);
            plan.node_pairs.resize(gamma);
            for (int g = 0; g < gamma; ++g) plan.node_pairs[g] = pair_lists[g][pick[g]];
            plan.vset_size = (std::int64_t)params.eta1 * params.eta2 * shared;
            plan.iv_pairs.reserve((size_t)plan.num_vsets() * plan.vset_size);

            std::vector<int> positions(params.s);
            for (int mask = 0; mask < plan.num_vsets(); ++mask) {
                size_t begin = plan.iv_pairs.size();
                for_each_mixed_radix(outside_radix, [&](const std::vector<int>& opick) {
                    // ell takes the S' side of each pair, alpha the other
                    for (size_t i = 0; i < outside.size(); ++i)
                        positions[outside[i]] = opick[i] + 1;
                    for (int g = 0; g < gamma; ++g)
                        positions[a_idx[g]] =
                            design.position_of(plan.node_pairs[g][(mask >> g) & 1]);
                    std::int64_t ell = design.cell_of_tuple(positions);
                    for (int g = 0; g < gamma; ++g)
                        positions[a_idx[g]] =
                            design.position_of(plan.node_pairs[g][1 - ((mask >> g) & 1)]);
                    std::int64_t alpha = design.cell_of_tuple(positions);

                    auto [fi_lo, fi_hi] = design.function_range(alpha);
                    auto [fj_lo, fj_hi] = design.file_range(ell);
                    for (std::int64_t i = fi_lo; i <= fi_hi; ++i)
                        for (std::int64_t j = fj_lo; j <= fj_hi; ++j)
                            plan.iv_pairs.emplace_back(i, j);
                });
                std::sort(plan.iv_pairs.begin() + begin, plan.iv_pairs.end());
            }
            plans.push_back(std::move(plan));
        });
    });
    return plans;
}

RoundCoding RoundCoding::build(int gamma, std::uint64_t coeff_seed, int retry_limit) {
    if (gamma < 1) throw std::out_of_range("RoundCoding: gamma must be positive");
    RoundCoding rc;
    rc.gamma_ = gamma;
    int senders = 2 * gamma;
    int combos = 1 << (gamma - 1);
    int masks = 1 << gamma;
    int packets = 2 * gamma - 1;
    int n = packets * combos;

    for (int attempt = 0; attempt < retry_limit; ++attempt) {
        std::uint64_t stream = splitmix64(coeff_seed ^ (std::uint64_t)gamma * 0x517cc1b727220a95ULL);
        stream = splitmix64(stream + (std::uint64_t)attempt);
        std::uint64_t word = 0;
        int avail_bytes = 0;
        auto next_byte = [&]() {
            if (avail_bytes == 0) {
                word = splitmix64(stream++);
                avail_bytes = 8;
            }
            std::uint8_t b = (std::uint8_t)word;
            word >>= 8;
            --avail_bytes;
            return b;
        };

        rc.tensor_.assign((size_t)senders * combos * masks * packets, 0);
        for (int t = 0; t < senders; ++t)
            for (int c = 0; c < combos; ++c)
                for (int m = 0; m < masks; ++m) {
                    if (!slot_holds_mask(t, m)) continue;
                    for (int a = 0; a < packets; ++a)
                        rc.tensor_[(((size_t)t * combos + c) * masks + m) * packets + a] =
                            next_byte();
                }

        rc.inverses_.clear();
        bool ok = true;
        for (int r = 0; r < senders && ok; ++r) {
            gf256::Matrix mat(n);
            int row = 0;
            for (int t = 0; t < senders; ++t) {
                if (t == r) continue;
                for (int c = 0; c < combos; ++c, ++row) {
                    int col = 0;
                    for (int m = 0; m < masks; ++m) {
                        if (slot_holds_mask(r, m)) continue;  // known to the receiver
                        for (int a = 0; a < packets; ++a, ++col)
                            mat.at(row, col) =
                                slot_holds_mask(t, m)
                                    ? rc.tensor_[(((size_t)t * combos + c) * masks + m) * packets +
                                                 a]
                                    : 0;
                    }
                }
            }
            auto inv = mat.inverse();
            if (!inv) {
                ok = false;
                break;
            }
            rc.inverses_.push_back(std::move(*inv));
        }
        if (ok) {
            rc.attempts_ = attempt + 1;
            return rc;
        }
    }
    throw std::runtime_error("RoundCoding: no full-rank coefficient draw within " +
                             std::to_string(retry_limit) + " attempts (seed " +
                             std::to_string(coeff_seed) + ", round " + std::to_string(gamma) +
                             ")");
}

std::uint8_t RoundCoding::coeff(int sender_slot, int combo, int mask, int packet) const {
    int combos = 1 << (gamma_ - 1);
    int masks = 1 << gamma_;
    int packets = 2 * gamma_ - 1;
    return tensor_[(((size_t)sender_slot * combos + combo) * masks + mask) * packets + packet];
}

namespace {

// Concatenated payload of one value set, ascending (function, file).
void fill_vset_bytes(const RoundPlanB& plan, int mask, const MapOutput& mapout, int holder,
                     std::uint8_t* out) {
    int ivb = mapout.payload_bytes();
    const auto* ivs = plan.vset_ivs(mask);
    for (std::int64_t k = 0; k < plan.vset_size; ++k) {
        if (!mapout.holds(holder, ivs[k].first, ivs[k].second))
            throw std::logic_error("method B: a planned holder cannot compute its value set");
        iv_payload_into(ivs[k].first, ivs[k].second, mapout.t_bits(), mapout.seed(),
                        out + (size_t)k * ivb);
    }
}

}  // namespace

std::vector<TransmissionRecord> encode_method_b(const Design& design, const RoundPlanB& plan,
                                                std::int64_t plan_index,
                                                const MapOutput& mapout,
                                                const RoundCoding& coding) {
    (void)design;
    if (coding.gamma() != plan.gamma)
        throw std::invalid_argument("encode_method_b: coding built for a different round");
    int ivb = mapout.payload_bytes();
    int packets = plan.num_packets();
    std::int64_t vset_bytes = plan.vset_size * ivb;
    if (vset_bytes % packets != 0)
        throw std::invalid_argument(
            "encode_method_b: t_bits must be a multiple of " + std::to_string(8 * packets) +
            " bits so value sets split into " + std::to_string(packets) + " equal packets");
    std::int64_t packet_bytes = vset_bytes / packets;

    int masks = plan.num_vsets();
    std::vector<std::uint8_t> vsets((size_t)masks * vset_bytes);
    for (int m = 0; m < masks; ++m)
        fill_vset_bytes(plan, m, mapout, plan.s_prime_nodes(m).front(),
                        vsets.data() + (size_t)m * vset_bytes);

    std::vector<TransmissionRecord> records;
    int senders = 2 * plan.gamma;
    int combos = coding.num_combos();
    records.reserve((size_t)senders * combos);
    for (int t = 0; t < senders; ++t) {
        int sender = plan.sender_node(t);
        std::vector<int> receivers;
        for (int u = 0; u < senders; ++u)
            if (u != t) receivers.push_back(plan.sender_node(u));
        std::sort(receivers.begin(), receivers.end());

        for (int c = 0; c < combos; ++c) {
            TransmissionRecord rec;
            rec.round = plan.gamma;
            rec.method = Method::kB;
            rec.sender = sender;
            rec.receivers = receivers;
            rec.bits = packet_bytes * 8;
            rec.payload.assign(packet_bytes, 0);
            rec.plan_index = plan_index;
            rec.sender_slot = t;
            rec.combo_index = c;
            for (int m = 0; m < masks; ++m) {
                if (!RoundCoding::slot_holds_mask(t, m)) continue;
                const std::uint8_t* base = vsets.data() + (size_t)m * vset_bytes;
                for (int a = 0; a < packets; ++a)
                    gf256::mul_add(rec.payload.data(), base + (size_t)a * packet_bytes,
                                   coding.coeff(t, c, m, a), packet_bytes);
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

std::vector<IntermediateValue> decode_method_b(const Design& design, const RoundPlanB& plan,
                                               const std::vector<TransmissionRecord>& records,
                                               int receiver, const MapOutput& mapout,
                                               const RoundCoding& coding) {
    (void)design;
    if (coding.gamma() != plan.gamma)
        throw std::invalid_argument("decode_method_b: coding built for a different round");
    int senders = 2 * plan.gamma;
    int combos = coding.num_combos();
    if ((int)records.size() != senders * combos)
        throw std::invalid_argument("decode_method_b: plan record set incomplete");

    int slot = -1;
    for (int t = 0; t < senders; ++t)
        if (plan.sender_node(t) == receiver) slot = t;
    if (slot < 0) throw std::invalid_argument("decode_method_b: receiver not in the node group");

    int ivb = mapout.payload_bytes();
    int packets = plan.num_packets();
    std::int64_t vset_bytes = plan.vset_size * ivb;
    std::int64_t packet_bytes = vset_bytes / packets;
    int masks = plan.num_vsets();
    int n = coding.system_size();

    // side information: the value sets this receiver computed itself
    std::vector<std::uint8_t> known((size_t)masks * vset_bytes);
    for (int m = 0; m < masks; ++m)
        if (RoundCoding::slot_holds_mask(slot, m))
            fill_vset_bytes(plan, m, mapout, receiver, known.data() + (size_t)m * vset_bytes);

    std::vector<std::uint8_t> rhs((size_t)n * packet_bytes);
    int row = 0;
    for (const auto& rec : records) {
        if (rec.sender_slot == slot) continue;
        if (rec.plan_index != records.front().plan_index)
            throw std::invalid_argument("decode_method_b: records from mixed plans");
        std::uint8_t* dst = rhs.data() + (size_t)row * packet_bytes;
        std::memcpy(dst, rec.payload.data(), packet_bytes);
        for (int m = 0; m < masks; ++m) {
            if (!RoundCoding::slot_holds_mask(slot, m)) continue;       // not side info
            if (!RoundCoding::slot_holds_mask(rec.sender_slot, m)) continue;  // not in this row
            const std::uint8_t* base = known.data() + (size_t)m * vset_bytes;
            for (int a = 0; a < packets; ++a)
                gf256::mul_add(dst, base + (size_t)a * packet_bytes,
                               coding.coeff(rec.sender_slot, rec.combo_index, m, a),
                               packet_bytes);
        }
        ++row;
    }
    if (row != n) throw std::invalid_argument("decode_method_b: wrong record multiplicity");

    std::vector<std::uint8_t> solved((size_t)n * packet_bytes);
    coding.receiver_inverse(slot).apply(rhs.data(), packet_bytes, solved.data());

    std::vector<IntermediateValue> out;
    out.reserve((size_t)(masks / 2) * plan.vset_size);
    int unknown_idx = 0;
    std::vector<std::uint8_t> assembled(vset_bytes);
    for (int m = 0; m < masks; ++m) {
        if (RoundCoding::slot_holds_mask(slot, m)) continue;
        for (int a = 0; a < packets; ++a)
            std::memcpy(assembled.data() + (size_t)a * packet_bytes,
                        solved.data() + ((size_t)unknown_idx * packets + a) * packet_bytes,
                        packet_bytes);
        const auto* ivs = plan.vset_ivs(m);
        for (std::int64_t k = 0; k < plan.vset_size; ++k) {
            IntermediateValue iv;
            iv.function_id = ivs[k].first;
            iv.file_id = ivs[k].second;
            iv.payload.assign(assembled.begin() + (size_t)k * ivb,
                              assembled.begin() + (size_t)(k + 1) * ivb);
            out.push_back(std::move(iv));
        }
        ++unknown_idx;
    }
    return out;
}

// --- full shuffle ---

namespace {

struct ChunkOut {
    std::vector<TransmissionRecord> records;
    // staged deliveries: (node, function, file) with bytes in the arena
    struct Entry {
        int node;
        std::int64_t function_id;
        std::int64_t file_id;
        std::size_t offset;
    };
    std::vector<Entry> entries;
    std::vector<std::uint8_t> arena;
    std::int64_t wasted = 0;

    void stage(int node, const IntermediateValue& iv) {
        entries.push_back({node, iv.function_id, iv.file_id, arena.size()});
        arena.insert(arena.end(), iv.payload.begin(), iv.payload.end());
    }
};

// Runs fn(plan_begin, plan_end, chunk) over a contiguous partition of
// [0, count) and returns the chunks in order.
template <typename Fn>
std::vector<ChunkOut> run_chunked(std::size_t count, int jobs, Fn&& fn) {
    int workers = std::max(1, jobs);
    workers = (int)std::min<std::size_t>(workers, count == 0 ? 1 : count);
    std::vector<ChunkOut> chunks(workers);
    if (workers == 1) {
        fn(0, count, chunks[0]);
        return chunks;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    std::size_t base = count / workers, rem = count % workers, begin = 0;
    for (int w = 0; w < workers; ++w) {
        std::size_t len = base + (w < (int)rem ? 1 : 0);
        std::size_t end = begin + len;
        threads.emplace_back([&, w, begin, end]() {
            try {
                fn(begin, end, chunks[w]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return chunks;
}

}  // namespace

ShuffleResult run_shuffle(const Design& design, const MapOutput& mapout,
                          const ShuffleOptions& options) {
    const auto& params = design.params();
    validate_t_bits(mapout.t_bits(), params, options.strategy);

    ShuffleResult result;
    result.ledger.t_bits = mapout.t_bits();
    result.delivered = DeliveredStore(design.num_nodes(), mapout.payload_bytes());

    std::int64_t wasted_total = 0;
    for (int round = 1; round <= params.s; ++round) {
        bool use_b = options.strategy == Strategy::kAllB || round == params.s;
        RoundStats stats;
        stats.round = round;
        stats.method = use_b ? Method::kB : Method::kA;

        std::vector<ChunkOut> chunks;
        if (!use_b) {
            std::vector<RoundPlanA> plans =
                enumerate_method_a(design, round, options.sender_policy);
            chunks = run_chunked(plans.size(), options.jobs,
                                 [&](std::size_t lo, std::size_t hi, ChunkOut& out) {
                                     for (std::size_t p = lo; p < hi; ++p) {
                                         TransmissionRecord rec =
                                             encode_method_a(design, plans[p], mapout);
                                         if (options.decode) {
                                             for (int node : rec.receivers) {
                                                 bool wasted = false;
                                                 auto ivs = decode_method_a(design, rec, node,
                                                                            mapout, &wasted);
                                                 if (wasted) ++out.wasted;
                                                 for (const auto& iv : ivs) out.stage(node, iv);
                                             }
                                         }
                                         out.records.push_back(std::move(rec));
                                     }
                                 });
        } else {
            std::vector<RoundPlanB> plans = enumerate_method_b(design, round);
            RoundCoding coding =
                RoundCoding::build(round, options.coeff_seed, options.rank_retry_limit);
            chunks = run_chunked(
                plans.size(), options.jobs, [&](std::size_t lo, std::size_t hi, ChunkOut& out) {
                    for (std::size_t p = lo; p < hi; ++p) {
                        auto recs =
                            encode_method_b(design, plans[p], (std::int64_t)p, mapout, coding);
                        if (options.decode) {
                            for (int t = 0; t < 2 * plans[p].gamma; ++t) {
                                int node = plans[p].sender_node(t);
                                auto ivs = decode_method_b(design, plans[p], recs, node, mapout,
                                                           coding);
                                for (const auto& iv : ivs) out.stage(node, iv);
                            }
                        }
                        for (auto& r : recs) out.records.push_back(std::move(r));
                    }
                });
        }

        for (auto& chunk : chunks) {
            for (auto& rec : chunk.records) {
                stats.bits += rec.bits;
                ++stats.transmissions;
                result.ledger.records.push_back(std::move(rec));
            }
            for (const auto& e : chunk.entries)
                result.delivered.add(e.node, e.function_id, e.file_id,
                                     chunk.arena.data() + e.offset);
            wasted_total += chunk.wasted;
        }
        result.ledger.rounds.push_back(stats);
    }

    result.ledger.wasted_receptions = wasted_total;
    result.delivered.finalize();
    result.ledger.normalized_load =
        Rational(result.ledger.total_bits()) /
        (Rational(design.num_functions()) * Rational(design.num_files()) *
         Rational(mapout.t_bits()));
    return result;
}

}  // namespace ccdc
