#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "ccdc/analysis.hpp"
#include "ccdc/oracle.hpp"
#include "ccdc/shuffle.hpp"

using namespace ccdc;

namespace {

Design design_2d() { return Design::build({2, {4, 6}, 1, 1}); }
Design design_3d() { return Design::build({3, {2, 2, 4}, 1, 1}); }

std::vector<std::uint8_t> xor_payloads(std::vector<std::uint8_t> a,
                                       const std::vector<std::uint8_t>& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
    return a;
}

}  // namespace

TEST_CASE("t_bits contract per strategy") {
    DesignParams p2{2, {4, 6}, 1, 1}, p3{3, {2, 2, 4}, 1, 1}, p4{4, {2, 2, 2, 2}, 1, 1};
    CHECK(auto_t_bits(p2, Strategy::kDefault) == 24);
    CHECK(auto_t_bits(p3, Strategy::kDefault) == 40);
    CHECK(auto_t_bits(p4, Strategy::kDefault) == 56);
    CHECK(auto_t_bits(p2, Strategy::kAllB) == 24);
    CHECK(auto_t_bits(p3, Strategy::kAllB) == 8 * 15);
    CHECK(auto_t_bits(p4, Strategy::kAllB) == 8 * 105);
    CHECK_NOTHROW(validate_t_bits(48, p2, Strategy::kDefault));
    CHECK_THROWS_WITH_AS(validate_t_bits(8, p2, Strategy::kDefault),
                         doctest::Contains("24"), std::invalid_argument);
}

TEST_CASE("coded-pair enumeration counts") {
    Design d2 = design_2d();
    CHECK(enumerate_method_a(d2, 1).size() == 96);
    Design d3 = design_3d();
    CHECK(enumerate_method_a(d3, 1).size() == 40);
    CHECK(enumerate_method_a(d3, 2).size() == 56);
    CHECK_THROWS_AS(enumerate_method_a(d3, 3), std::out_of_range);  // no outside node at g = s
    CHECK_THROWS_AS(enumerate_method_a(d3, 0), std::out_of_range);
}

TEST_CASE("coded-pair plan count per group selection is X*prod(x_i-1)/2") {
    for (auto params : {DesignParams{3, {2, 3, 4}, 1, 1}, DesignParams{2, {3, 5}, 2, 1}}) {
        Design d = Design::build(params);
        for (int g = 1; g <= params.s - 1; ++g) {
            auto plans = enumerate_method_a(d, g);
            std::map<std::vector<int>, std::int64_t> per_a;
            for (const auto& plan : plans) ++per_a[plan.group_ids];
            for (const auto& [a, count] : per_a) {
                std::int64_t expect = d.num_cells();
                for (int m : a) expect *= params.x[m - 1] - 1;
                CHECK(count == expect / 2);
            }
        }
    }
}

TEST_CASE("plans are unique unordered pairs of cells") {
    Design d = design_3d();
    for (int g : {1, 2}) {
        std::set<std::pair<std::int64_t, std::int64_t>> seen;
        for (const auto& plan : enumerate_method_a(d, g)) {
            auto key = std::minmax(plan.alpha_cell, plan.ell_cell);
            CHECK(seen.insert({key.first, key.second}).second);
            CHECK(plan.sender == plan.y_nodes.front());
            CHECK((int)plan.s_nodes.size() == 2 * g);
            CHECK((int)plan.y_nodes.size() == d.params().s - g);
        }
    }
}

TEST_CASE("cuboid round-1 plan through cells {1,3,8} and {2,3,8}") {
    Design d = design_3d();
    auto plans = enumerate_method_a(d, 1);
    bool found = false;
    for (const auto& plan : plans) {
        if (plan.s_nodes == std::vector<int>{1, 2} && plan.y_nodes == std::vector<int>{3, 8}) {
            found = true;
            CHECK(plan.s_prime == std::vector<int>{1});
            CHECK(plan.sender == 3);
            CHECK(plan.ell_cell == d.cell_of_members({1, 3, 8}));
            CHECK(plan.alpha_cell == d.cell_of_members({2, 3, 8}));
        }
    }
    CHECK(found);
}

TEST_CASE("cuboid round-2 plans for nodes {3,4,6,8} with node 1 outside") {
    Design d = design_3d();
    // two unordered splits of the four nodes share this Y
    int matching = 0;
    bool found = false;
    for (const auto& plan : enumerate_method_a(d, 2)) {
        if (plan.s_nodes != std::vector<int>{3, 4, 6, 8}) continue;
        if (plan.y_nodes != std::vector<int>{1}) continue;
        ++matching;
        CHECK(plan.sender == 1);
        if (plan.s_prime == std::vector<int>{3, 6}) {
            found = true;
            CHECK(plan.ell_cell == d.cell_of_members({1, 3, 6}));
            CHECK(plan.alpha_cell == d.cell_of_members({1, 4, 8}));
        }
    }
    CHECK(matching == 2);
    CHECK(found);
}

TEST_CASE("rectangle round-1 transmissions from node 1") {
    Design d = design_2d();
    MapOutput m = run_map(d, 24, 1);
    auto plans = enumerate_method_a(d, 1);

    int hits = 0;
    for (const auto& plan : plans) {
        if (plan.sender != 1) continue;
        TransmissionRecord rec = encode_method_a(d, plan, m);
        CHECK(rec.bits == 24);
        if (rec.receivers == std::vector<int>{5, 6}) {
            ++hits;
            CHECK(rec.payload ==
                  xor_payloads(iv_payload(1, 2, 24, 1), iv_payload(2, 1, 24, 1)));
        }
        if (rec.receivers == std::vector<int>{8, 10}) {
            ++hits;
            CHECK(rec.payload ==
                  xor_payloads(iv_payload(4, 6, 24, 1), iv_payload(6, 4, 24, 1)));
        }
    }
    CHECK(hits == 2);
}

TEST_CASE("decoding a coded pair recovers the requested side") {
    Design d = design_2d();
    MapOutput m = run_map(d, 24, 1);
    for (const auto& plan : enumerate_method_a(d, 1)) {
        if (plan.sender != 1) continue;
        TransmissionRecord rec = encode_method_a(d, plan, m);
        if (rec.receivers != std::vector<int>{5, 6}) continue;

        auto at5 = decode_method_a(d, rec, 5, m);
        REQUIRE(at5.size() == 1);
        CHECK(at5[0].function_id == 1);
        CHECK(at5[0].file_id == 2);
        CHECK(at5[0].payload == iv_payload(1, 2, 24, 1));

        auto at6 = decode_method_a(d, rec, 6, m);
        REQUIRE(at6.size() == 1);
        CHECK(at6[0].function_id == 2);
        CHECK(at6[0].file_id == 1);
        CHECK(at6[0].payload == iv_payload(2, 1, 24, 1));

        // xor is an involution: recovered side plus local side re-encodes
        CHECK(xor_payloads(at5[0].payload, iv_payload(2, 1, 24, 1)) == rec.payload);

        CHECK_THROWS_AS(decode_method_a(d, rec, 3, m), std::logic_error);
    }
}

TEST_CASE("a receiver holding both sides is flagged, not fatal") {
    Design d = design_2d();
    MapOutput m = run_map(d, 24, 1);
    // synthetic record whose cells coincide: every member holds both sides
    TransmissionRecord rec;
    rec.round = 1;
    rec.method = Method::kA;
    rec.sender = 5;
    rec.receivers = {1};
    rec.alpha_cell = 1;
    rec.ell_cell = 1;
    rec.bits = 24;
    rec.payload.assign(3, 0);
    bool wasted = false;
    CHECK(decode_method_a(d, rec, 1, m, &wasted).empty());
    CHECK(wasted);
}

TEST_CASE("full round 1 delivers every single-requester value") {
    Design d = design_2d();
    MapOutput m = run_map(d, 24, 1);
    std::set<std::tuple<int, std::int64_t, std::int64_t>> delivered;
    for (const auto& plan : enumerate_method_a(d, 1)) {
        TransmissionRecord rec = encode_method_a(d, plan, m);
        for (int node : rec.receivers) {
            for (const auto& iv : decode_method_a(d, rec, node, m)) {
                CHECK(iv.payload == iv_payload(iv.function_id, iv.file_id, 24, 1));
                CHECK(delivered.insert({node, iv.function_id, iv.file_id}).second);
            }
        }
    }
    std::set<std::tuple<int, std::int64_t, std::int64_t>> expected;
    for (std::int64_t i = 1; i <= d.num_functions(); ++i)
        for (std::int64_t j = 1; j <= d.num_files(); ++j) {
            auto req = d.requesters(i, j);
            if (req.size() == 1) expected.insert({req[0], i, j});
        }
    CHECK(delivered == expected);
}

TEST_CASE("packet-combination enumeration counts") {
    CHECK(enumerate_method_b(design_3d(), 3).size() == 6);
    CHECK(enumerate_method_b(design_2d(), 2).size() == 90);
    CHECK_THROWS_AS(enumerate_method_b(design_2d(), 3), std::out_of_range);
}

TEST_CASE("cuboid final-round value sets for nodes 1..6") {
    Design d = design_3d();
    auto plans = enumerate_method_b(d, 3);
    const RoundPlanB* target = nullptr;
    for (const auto& plan : plans) {
        std::vector<int> all;
        for (const auto& pr : plan.node_pairs) {
            all.push_back(pr[0]);
            all.push_back(pr[1]);
        }
        std::sort(all.begin(), all.end());
        if (all == std::vector<int>{1, 2, 3, 4, 5, 6}) target = &plan;
    }
    REQUIRE(target != nullptr);
    CHECK(target->vset_size == 1);
    CHECK(target->num_vsets() == 8);
    CHECK(target->num_packets() == 5);

    // every value set pairs complementary cells inside the group
    std::set<std::pair<std::int64_t, std::int64_t>> ivs;
    for (int mask = 0; mask < 8; ++mask) {
        auto s_prime = target->s_prime_nodes(mask);
        std::vector<int> rest;
        for (int t = 0; t < 6; ++t) {
            int node = target->sender_node(t);
            if (!std::binary_search(s_prime.begin(), s_prime.end(), node)) rest.push_back(node);
        }
        std::int64_t ell = d.cell_of_members(s_prime);
        std::int64_t alpha = d.cell_of_members(rest);
        const auto* got = target->vset_ivs(mask);
        CHECK(got[0].first == alpha);   // eta = 1: ids equal cell indices
        CHECK(got[0].second == ell);
        ivs.insert(got[0]);
    }
    CHECK(ivs.size() == 8);  // 8 distinct values, in mirrored pairs
    for (auto [i, j] : ivs) CHECK(ivs.count({j, i}) == 1);
}

TEST_CASE("coefficient schedules build deterministically") {
    for (int g : {1, 2, 3, 4}) {
        RoundCoding a = RoundCoding::build(g, 77);
        RoundCoding b = RoundCoding::build(g, 77);
        CHECK(a.attempts_used() == b.attempts_used());
        CHECK(a.system_size() == (2 * g - 1) * (1 << (g - 1)));
        for (int t = 0; t < 2 * g; ++t)
            for (int m = 0; m < (1 << g); ++m)
                for (int p = 0; p < 2 * g - 1; ++p) {
                    CHECK(a.coeff(t, 0, m, p) == b.coeff(t, 0, m, p));
                    if (!RoundCoding::slot_holds_mask(t, m)) CHECK(a.coeff(t, 0, m, p) == 0);
                }
    }
    CHECK_THROWS_AS(RoundCoding::build(2, 1, 0), std::runtime_error);
}

TEST_CASE("cuboid final round: 24 packets of T/5 per group, 20 unknowns per node") {
    Design d = design_3d();
    MapOutput m = run_map(d, 40, 1);
    RoundCoding coding = RoundCoding::build(3, 1);
    CHECK(coding.system_size() == 20);
    auto plans = enumerate_method_b(d, 3);
    for (size_t p = 0; p < plans.size(); ++p) {
        auto records = encode_method_b(d, plans[p], (std::int64_t)p, m, coding);
        CHECK(records.size() == 24);
        for (const auto& rec : records) {
            CHECK(rec.bits == 8);  // T/5
            CHECK(rec.receivers.size() == 5);
        }
        for (int t = 0; t < 6; ++t) {
            int node = plans[p].sender_node(t);
            auto ivs = decode_method_b(d, plans[p], records, node, m, coding);
            CHECK(ivs.size() == 4);
            for (const auto& iv : ivs) {
                CHECK(iv.payload == iv_payload(iv.function_id, iv.file_id, 40, 1));
                auto req = d.requesters(iv.function_id, iv.file_id);
                CHECK(std::binary_search(req.begin(), req.end(), node));
            }
        }
    }
}

TEST_CASE("rectangle final round: 8 packets of T/3 per group") {
    Design d = design_2d();
    MapOutput m = run_map(d, 24, 1);
    RoundCoding coding = RoundCoding::build(2, 1);
    auto plans = enumerate_method_b(d, 2);
    auto records = encode_method_b(d, plans[0], 0, m, coding);
    CHECK(records.size() == 8);
    for (const auto& rec : records) CHECK(rec.bits == 8);
    for (int t = 0; t < 4; ++t) {
        int node = plans[0].sender_node(t);
        auto ivs = decode_method_b(d, plans[0], records, node, m, coding);
        CHECK(ivs.size() == 2);  // 2 value sets of one value each
        for (const auto& iv : ivs)
            CHECK(iv.payload == iv_payload(iv.function_id, iv.file_id, 24, 1));
    }
    CHECK_THROWS_AS(decode_method_b(d, plans[0], records, 10, m, coding),
                    std::invalid_argument);
}

TEST_CASE("default strategy reproduces the worked examples") {
    Design d2 = design_2d();
    MapOutput m2 = run_map(d2, 24, 1);
    ShuffleResult r2 = run_shuffle(d2, m2);
    CHECK(r2.ledger.normalized_load == Rational(7, 12));
    CHECK(r2.ledger.rounds[0].transmissions == 96);
    CHECK(r2.ledger.rounds[0].bits == 96 * 24);
    CHECK(r2.ledger.rounds[1].transmissions == 720);
    CHECK(r2.ledger.rounds[1].bits == 720 * 8);
    CHECK(r2.ledger.wasted_receptions == 0);
    CHECK(oracle::audit_delivery(d2, m2, r2.delivered).ok());

    Design d3 = design_3d();
    MapOutput m3 = run_map(d3, 40, 1);
    ShuffleResult r3 = run_shuffle(d3, m3);
    CHECK(r3.ledger.normalized_load == Rational(39, 80));
    CHECK(r3.ledger.rounds[0].transmissions == 40);
    CHECK(r3.ledger.rounds[1].transmissions == 56);
    CHECK(r3.ledger.rounds[2].transmissions == 144);
    CHECK(r3.ledger.round_bits_in_t(3) == Rational(144, 5));
    CHECK(oracle::audit_delivery(d3, m3, r3.delivered).ok());
}

TEST_CASE("smallest instance load is 5/12") {
    Design d = Design::build({2, {2, 2}, 1, 1});
    MapOutput m = run_map(d, 24, 1);
    ShuffleResult r = run_shuffle(d, m);
    CHECK(r.ledger.normalized_load == Rational(5, 12));
    CHECK(r.ledger.round_bits_in_t(1) == Rational(4));
    CHECK(r.ledger.round_bits_in_t(2) == Rational(8, 3));
    CHECK(oracle::audit_delivery(d, m, r.delivered).ok());
}

TEST_CASE("all-combination strategy decodes and matches its round formula") {
    for (auto params : {DesignParams{2, {2, 2}, 1, 1}, DesignParams{2, {2, 3}, 1, 2},
                        DesignParams{3, {2, 2, 2}, 1, 1}, DesignParams{3, {2, 2, 4}, 1, 1}}) {
        Design d = Design::build(params);
        int t_bits = auto_t_bits(params, Strategy::kAllB);
        MapOutput m = run_map(d, t_bits, 3);
        ShuffleOptions opts;
        opts.strategy = Strategy::kAllB;
        ShuffleResult r = run_shuffle(d, m, opts);
        CHECK(oracle::audit_delivery(d, m, r.delivered).ok());
        for (int g = 1; g <= params.s; ++g)
            CHECK(r.ledger.round_bits_in_t(g) == round_combo_bits(params, g));
    }
}

TEST_CASE("per-round inflation of all-combination over coded pairs is 2g/(2g-1)") {
    for (auto params : {DesignParams{3, {2, 2, 4}, 1, 1}, DesignParams{2, {3, 4}, 2, 1}}) {
        Design d = Design::build(params);
        MapOutput md = run_map(d, auto_t_bits(params, Strategy::kDefault), 3);
        ShuffleResult rd = run_shuffle(d, md);
        MapOutput mb = run_map(d, auto_t_bits(params, Strategy::kAllB), 3);
        ShuffleOptions opts;
        opts.strategy = Strategy::kAllB;
        ShuffleResult rb = run_shuffle(d, mb, opts);
        for (int g = 1; g <= params.s - 1; ++g)
            CHECK(rb.ledger.round_bits_in_t(g) / rd.ledger.round_bits_in_t(g) ==
                  Rational(2 * g, 2 * g - 1));
        CHECK(rb.ledger.normalized_load >= rd.ledger.normalized_load);
    }
}

TEST_CASE("ledgers are identical across repeats and thread counts") {
    Design d = design_3d();
    MapOutput m = run_map(d, 40, 11);
    ShuffleOptions one;
    one.coeff_seed = 5;
    ShuffleOptions four = one;
    four.jobs = 4;
    ShuffleResult a = run_shuffle(d, m, one);
    ShuffleResult b = run_shuffle(d, m, one);
    ShuffleResult c = run_shuffle(d, m, four);
    REQUIRE(a.ledger.records.size() == b.ledger.records.size());
    REQUIRE(a.ledger.records.size() == c.ledger.records.size());
    for (size_t i = 0; i < a.ledger.records.size(); ++i) {
        for (const auto* other : {&b.ledger.records[i], &c.ledger.records[i]}) {
            CHECK(a.ledger.records[i].sender == other->sender);
            CHECK(a.ledger.records[i].receivers == other->receivers);
            CHECK(a.ledger.records[i].bits == other->bits);
            CHECK(a.ledger.records[i].payload == other->payload);
        }
    }
}

TEST_CASE("sender policy shifts transmit counts but never the load") {
    Design d = design_3d();
    MapOutput m = run_map(d, 40, 1);
    ShuffleOptions robin;
    robin.sender_policy = SenderPolicy::kRoundRobin;
    ShuffleResult lowest = run_shuffle(d, m);
    ShuffleResult rotated = run_shuffle(d, m, robin);
    CHECK(lowest.ledger.normalized_load == rotated.ledger.normalized_load);
    for (int g = 1; g <= 3; ++g)
        CHECK(lowest.ledger.rounds[g - 1].bits == rotated.ledger.rounds[g - 1].bits);
    CHECK(oracle::audit_delivery(d, m, rotated.delivered).ok());

    auto tx_by_node = [&](const ShuffleLedger& ledger) {
        std::map<int, int> counts;
        for (const auto& rec : ledger.records)
            if (rec.round == 1) ++counts[rec.sender];
        return counts;
    };
    CHECK(tx_by_node(lowest.ledger) != tx_by_node(rotated.ledger));
    for (const auto& plan : enumerate_method_a(d, 1, SenderPolicy::kRoundRobin))
        CHECK(std::binary_search(plan.y_nodes.begin(), plan.y_nodes.end(), plan.sender));
}

TEST_CASE("divisibility violations name the required divisor") {
    Design d = design_2d();
    MapOutput m = run_map(d, 8, 1);  // valid for the map, not for the shuffle
    CHECK_THROWS_WITH_AS(run_shuffle(d, m), doctest::Contains("24"), std::invalid_argument);
}
