#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ccdc/analysis.hpp"

using namespace ccdc;

namespace {
DesignParams p2d{2, {4, 6}, 1, 1};
DesignParams p3d{3, {2, 2, 4}, 1, 1};
}  // namespace

TEST_CASE("communication load closed form") {
    CHECK(communication_load_formula(p2d) == Rational(7, 12));
    CHECK(communication_load_formula(p3d) == Rational(39, 80));
    CHECK(communication_load_formula({2, {2, 2}, 1, 1}) == Rational(5, 12));
    CHECK(communication_load_formula({2, {2, 3}, 1, 1}) == Rational(17, 36));
}

TEST_CASE("computation load is the replication factor") {
    CHECK(computation_load(p2d) == 2);
    CHECK(computation_load(p3d) == 3);
    CHECK(computation_load({4, {2, 2, 2, 2}, 2, 2}) == 4);
}

TEST_CASE("per-round coded-pair traffic") {
    CHECK(round_pair_bits(p2d, 1) == Rational(96));
    CHECK(round_pair_bits(p3d, 1) == Rational(40));
    CHECK(round_pair_bits(p3d, 2) == Rational(56));
    CHECK(round_pair_bits({2, {2, 2}, 1, 1}, 1) == Rational(4));
    CHECK_THROWS_AS(round_pair_bits(p2d, 2), std::out_of_range);
    CHECK_THROWS_AS(round_pair_bits(p2d, 0), std::out_of_range);
}

TEST_CASE("final round traffic") {
    CHECK(round_final_bits(p2d) == Rational(240));
    CHECK(round_final_bits(p3d) == Rational(144, 5));  // 28.8
    // 1 node group, 8 transmissions of T/3 each: 8/3, consistent with the
    // 5/12 total load.
    CHECK(round_final_bits({2, {2, 2}, 1, 1}) == Rational(8, 3));
}

TEST_CASE("all-combination rounds inflate by 2g/(2g-1)") {
    CHECK(round_combo_bits(p2d, 2) == round_final_bits(p2d));
    CHECK(round_combo_bits(p3d, 3) == round_final_bits(p3d));
    CHECK(round_combo_bits(p2d, 1) == Rational(192));  // 2x the coded-pair round
    CHECK(round_combo_bits(p3d, 2) == Rational(56) * Rational(4, 3));
    for (int g = 1; g <= 2; ++g)
        CHECK(round_combo_bits(p3d, g) ==
              round_pair_bits(p3d, g) * Rational(2 * g, 2 * g - 1));
    CHECK_THROWS_AS(round_combo_bits(p3d, 4), std::out_of_range);
}

TEST_CASE("load decomposes into the per-round sums") {
    for (auto params : {p2d, p3d, DesignParams{4, {2, 3, 4, 5}, 1, 1},
                        DesignParams{3, {3, 3, 3}, 2, 2}}) {
        Rational total;
        for (int g = 1; g <= params.s - 1; ++g) total += round_pair_bits(params, g);
        total += round_final_bits(params);
        Rational qn = Rational(params.num_functions()) * Rational(params.num_files());
        CHECK(total / qn == communication_load_formula(params));
    }
}

TEST_CASE("eta factors cancel in the load") {
    for (int eta1 : {1, 2, 3})
        for (int eta2 : {1, 2}) {
            DesignParams p{3, {2, 2, 4}, eta1, eta2};
            CHECK(communication_load_formula(p) == Rational(39, 80));
        }
}

TEST_CASE("load stays within its trivial bounds") {
    for (auto params : {p2d, p3d, DesignParams{4, {5, 5, 5, 5}, 2, 2},
                        DesignParams{2, {2, 2}, 1, 1}}) {
        Rational load = communication_load_formula(params);
        CHECK(load > Rational(0));
        CHECK(load < Rational(params.s));
    }
}

TEST_CASE("decomposition holds across randomized parameter draws") {
    std::mt19937 rng(2718);
    std::uniform_int_distribution<int> pick_s(2, 5), pick_x(2, 6), pick_eta(1, 3);
    for (int trial = 0; trial < 40; ++trial) {
        DesignParams params;
        params.s = pick_s(rng);
        for (int i = 0; i < params.s; ++i) params.x.push_back(pick_x(rng));
        params.eta1 = pick_eta(rng);
        params.eta2 = pick_eta(rng);

        Rational total;
        for (int g = 1; g <= params.s - 1; ++g) total += round_pair_bits(params, g);
        total += round_final_bits(params);
        Rational qn = Rational(params.num_functions()) * Rational(params.num_files());
        CHECK(total / qn == communication_load_formula(params));
        CHECK(round_combo_bits(params, params.s) == round_final_bits(params));
        for (int g = 1; g <= params.s - 1; ++g)
            CHECK(round_combo_bits(params, g) ==
                  round_pair_bits(params, g) * Rational(2 * g, 2 * g - 1));
    }
}

TEST_CASE("bundled formula result is self-consistent") {
    LoadFormulaResult r = load_formula(p3d);
    CHECK(r.computation_load == 3);
    CHECK(r.communication_load == Rational(39, 80));
    CHECK(r.per_round_pair_bits.size() == 2);
    CHECK(r.per_round_combo_bits.size() == 3);
    CHECK(r.per_round_combo_bits[2] == r.final_round_bits);
}
