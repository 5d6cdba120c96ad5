#include "ccdc/oracle.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace ccdc::oracle {

namespace {

void check_guard(const Design& design, std::int64_t cell_guard, bool override_guard) {
    if (!override_guard && design.num_cells() > cell_guard)
        throw std::invalid_argument(
            "oracle: instance exceeds the exhaustive-check guard of " +
            std::to_string(cell_guard) + " cells; pass override to force");
}

// Per-node membership tables rebuilt from the placement's own file and
// function lists, one byte per id.
struct Membership {
    std::vector<std::vector<char>> has_file;  // [node-1][file-1]
    std::vector<std::vector<char>> has_func;

    explicit Membership(const Design& design) {
        int k = design.num_nodes();
        has_file.assign(k, std::vector<char>(design.num_files(), 0));
        has_func.assign(k, std::vector<char>(design.num_functions(), 0));
        for (int node = 1; node <= k; ++node) {
            for (std::int64_t f : design.files_of(node)) has_file[node - 1][f - 1] = 1;
            for (std::int64_t q : design.functions_of(node)) has_func[node - 1][q - 1] = 1;
        }
    }
};

int sorted_intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
    int n = 0;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (a[i] > b[j]) ++j;
        else { ++n; ++i; ++j; }
    }
    return n;
}

template <typename Fn>
void subsets_of_size(int n, int k, std::vector<int>& acc, int next, Fn&& fn) {
    if ((int)acc.size() == k) {
        fn(acc);
        return;
    }
    for (int v = next; v < n; ++v) {
        acc.push_back(v);
        subsets_of_size(n, k, acc, v + 1, fn);
        acc.pop_back();
    }
}

}  // namespace

Histogram requester_histogram(const Design& design, std::int64_t cell_guard,
                              bool override_guard) {
    check_guard(design, cell_guard, override_guard);
    Membership mem(design);
    int k = design.num_nodes();
    Histogram h;
    h.by_requesters.assign(design.params().s + 1, 0);
    for (std::int64_t i = 1; i <= design.num_functions(); ++i) {
        for (std::int64_t j = 1; j <= design.num_files(); ++j) {
            int n = 0;
            for (int node = 1; node <= k; ++node)
                if (mem.has_func[node - 1][i - 1] && !mem.has_file[node - 1][j - 1]) ++n;
            ++h.by_requesters.at(n);
        }
    }
    return h;
}

std::int64_t verify_requesters(const Design& design, std::int64_t cell_guard,
                               bool override_guard) {
    check_guard(design, cell_guard, override_guard);
    Membership mem(design);
    int k = design.num_nodes();
    std::int64_t mismatches = 0;
    std::vector<int> mine;
    for (std::int64_t i = 1; i <= design.num_functions(); ++i) {
        for (std::int64_t j = 1; j <= design.num_files(); ++j) {
            mine.clear();
            for (int node = 1; node <= k; ++node)
                if (mem.has_func[node - 1][i - 1] && !mem.has_file[node - 1][j - 1])
                    mine.push_back(node);
            if (mine != design.requesters(i, j)) ++mismatches;
        }
    }
    return mismatches;
}

AuditReport audit_delivery(const Design& design, const MapOutput& mapout,
                           const DeliveredStore& delivered) {
    AuditReport report;
    report.delivered_total = delivered.total();
    int ivb = mapout.payload_bytes();
    std::vector<std::uint8_t> expected(ivb);

    auto provenance = [&](std::int64_t i, std::int64_t j) {
        std::int64_t alpha = design.function_set_of(i);
        std::int64_t ell = design.file_set_of(j);
        std::string p = "cells alpha=" + std::to_string(alpha) + " ell=" + std::to_string(ell) +
                        " differing groups {";
        const auto& ta = design.tuple_of(alpha);
        const auto& tl = design.tuple_of(ell);
        bool first = true;
        for (size_t m = 0; m < ta.size(); ++m) {
            if (ta[m] != tl[m]) {
                if (!first) p += ",";
                p += std::to_string(m + 1);
                first = false;
            }
        }
        p += "} (round " + std::to_string(design.requester_count(i, j)) + ")";
        return p;
    };

    for (int node = 1; node <= design.num_nodes(); ++node) {
        for (std::int64_t i : design.functions_of(node)) {
            for (std::int64_t j = 1; j <= design.num_files(); ++j) {
                ++report.values_required;
                if (design.node_has_file(node, j)) {
                    ++report.locally_computed;
                    continue;
                }
                ++report.remotely_required;
                const std::uint8_t* got = delivered.find(node, i, j);
                if (!got) {
                    ++report.missing;
                    if (report.failures.size() < AuditReport::kMaxFailuresKept)
                        report.failures.push_back({node, i, j, false, provenance(i, j)});
                    continue;
                }
                iv_payload_into(i, j, mapout.t_bits(), mapout.seed(), expected.data());
                if (!std::equal(expected.begin(), expected.end(), got)) {
                    ++report.corrupt;
                    if (report.failures.size() < AuditReport::kMaxFailuresKept)
                        report.failures.push_back({node, i, j, true, provenance(i, j)});
                    continue;
                }
                ++report.present;
            }
        }
    }
    return report;
}

BruteForceLoad count_load_bruteforce_detailed(const Design& design, Strategy strategy,
                                              std::int64_t cell_guard, bool override_guard) {
    check_guard(design, cell_guard, override_guard);
    const auto& params = design.params();
    int s = params.s;
    std::int64_t x_total = design.num_cells();
    Rational eta((std::int64_t)params.eta1 * params.eta2);

    BruteForceLoad out;
    out.round_bits_in_t.assign(s, Rational(0));
    out.round_transmissions.assign(s, 0);

    // Coded-pair rounds: one multicast per unordered pair of cells whose
    // member sets differ in exactly g groups, g < s. Distances come from
    // explicit member-set intersections.
    if (strategy == Strategy::kDefault) {
        for (std::int64_t a = 1; a <= x_total; ++a) {
            for (std::int64_t l = a + 1; l <= x_total; ++l) {
                int common = sorted_intersection_size(design.members(a), design.members(l));
                int g = s - common;
                if (g >= 1 && g <= s - 1) {
                    out.round_transmissions[g - 1] += 1;
                    out.round_bits_in_t[g - 1] += eta;
                }
            }
        }
    }

    // Packet-combination rounds: enumerate the node groups directly and
    // size each value set by matching stored-at cells against
    // requested-at cells through their members.
    std::vector<std::vector<std::int64_t>> cells_with_node(design.num_nodes());
    for (std::int64_t c = 1; c <= x_total; ++c)
        for (int node : design.members(c)) cells_with_node[node - 1].push_back(c);
    auto cells_containing = [&](const std::vector<int>& nodes) {
        std::vector<std::int64_t> acc = cells_with_node[nodes.front() - 1];
        for (size_t i = 1; i < nodes.size(); ++i) {
            std::vector<std::int64_t> next;
            const auto& other = cells_with_node[nodes[i] - 1];
            std::set_intersection(acc.begin(), acc.end(), other.begin(), other.end(),
                                  std::back_inserter(next));
            acc = std::move(next);
        }
        return acc;
    };

    int first_b_round = strategy == Strategy::kDefault ? s : 1;
    for (int g = first_b_round; g <= s; ++g) {
        std::vector<int> acc;
        subsets_of_size(s, g, acc, 0, [&](const std::vector<int>& a_idx) {
            // node pairs per selected group
            std::vector<std::vector<std::array<int, 2>>> pair_lists(g);
            for (int gi = 0; gi < g; ++gi) {
                std::vector<int> nodes = design.groups()[a_idx[gi]];
                std::sort(nodes.begin(), nodes.end());
                for (size_t i = 0; i < nodes.size(); ++i)
                    for (size_t j = i + 1; j < nodes.size(); ++j)
                        pair_lists[gi].push_back({nodes[i], nodes[j]});
            }
            std::vector<size_t> pick(g, 0);
            while (true) {
                // one node group S; size its 2^g value sets
                std::int64_t vset_values = -1;
                for (int mask = 0; mask < (1 << g); ++mask) {
                    std::vector<int> s_prime, s_rest;
                    for (int gi = 0; gi < g; ++gi) {
                        auto pr = pair_lists[gi][pick[gi]];
                        s_prime.push_back(pr[(mask >> gi) & 1]);
                        s_rest.push_back(pr[1 - ((mask >> gi) & 1)]);
                    }
                    std::sort(s_prime.begin(), s_prime.end());
                    std::sort(s_rest.begin(), s_rest.end());
                    auto ell_cands = cells_containing(s_prime);
                    auto alpha_cands = cells_containing(s_rest);
                    std::int64_t pairs = 0;
                    for (std::int64_t lc : ell_cands)
                        for (std::int64_t ac : alpha_cands)
                            if (sorted_intersection_size(design.members(lc),
                                                         design.members(ac)) == s - g)
                                ++pairs;
                    std::int64_t values =
                        pairs * params.eta1 * params.eta2;
                    if (vset_values < 0) vset_values = values;
                    else if (vset_values != values)
                        throw std::logic_error("oracle: unequal value sets in one node group");
                }
                std::int64_t tx = 2LL * g * (1LL << (g - 1));
                out.round_transmissions[g - 1] += tx;
                // each transmission carries |V| * T / (2g-1) bits
                out.round_bits_in_t[g - 1] +=
                    Rational(tx) * Rational(vset_values) / Rational(2 * g - 1);

                int gi = g - 1;
                while (gi >= 0 && pick[gi] + 1 == pair_lists[gi].size()) --gi;
                if (gi < 0) break;
                ++pick[gi];
                for (int z = gi + 1; z < g; ++z) pick[z] = 0;
            }
        });
    }

    Rational total;
    for (const auto& r : out.round_bits_in_t) total += r;
    out.load = total / (Rational(design.num_functions()) * Rational(design.num_files()));
    return out;
}

Rational count_load_bruteforce(const Design& design, Strategy strategy,
                               std::int64_t cell_guard, bool override_guard) {
    return count_load_bruteforce_detailed(design, strategy, cell_guard, override_guard).load;
}

}  // namespace ccdc::oracle
