#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "ccdc/design.hpp"

using namespace ccdc;

namespace {

DesignParams params_2d() { return {2, {4, 6}, 1, 1}; }
DesignParams params_3d() { return {3, {2, 2, 4}, 1, 1}; }

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(DesignParams({1, {4}, 1, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DesignParams({2, {4, 1}, 1, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DesignParams({2, {4}, 1, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DesignParams({2, {4, 6}, 0, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DesignParams({2, {4, 6}, 1, 0}).validate(), std::invalid_argument);
    CHECK_NOTHROW(params_2d().validate());
}

TEST_CASE("ten-node rectangle dimensions and file lists") {
    Design d = Design::build(params_2d());
    CHECK(d.num_nodes() == 10);
    CHECK(d.num_cells() == 24);
    CHECK(d.num_files() == 24);
    CHECK(d.num_functions() == 24);

    // node 2 holds one full row, node 8 one column
    CHECK(d.files_of(2) == std::vector<std::int64_t>{7, 8, 9, 10, 11, 12});
    CHECK(d.files_of(8) == std::vector<std::int64_t>{4, 10, 16, 22});
    CHECK(d.functions_of(2) == std::vector<std::int64_t>{7, 8, 9, 10, 11, 12});
    CHECK(d.functions_of(8) == std::vector<std::int64_t>{4, 10, 16, 22});
    CHECK(d.groups()[0] == std::vector<int>{1, 2, 3, 4});
    CHECK(d.groups()[1] == std::vector<int>{5, 6, 7, 8, 9, 10});
}

TEST_CASE("eight-node cuboid storage split") {
    Design d = Design::build(params_3d());
    CHECK(d.num_nodes() == 8);
    CHECK(d.num_cells() == 16);
    for (int k = 1; k <= 4; ++k) CHECK(d.files_of(k).size() == 8);
    for (int k = 5; k <= 8; ++k) CHECK(d.files_of(k).size() == 4);
}

TEST_CASE("smallest legal instance") {
    Design d = Design::build({2, {2, 2}, 1, 1});
    CHECK(d.num_nodes() == 4);
    CHECK(d.num_cells() == 4);
    std::vector<int> per_file_holders(4, 0);
    for (int k = 1; k <= 4; ++k) {
        CHECK(d.files_of(k).size() == 2);
        for (auto f : d.files_of(k)) ++per_file_holders[f - 1];
    }
    for (int c : per_file_holders) CHECK(c == 2);
}

TEST_CASE("cell membership") {
    Design d2 = Design::build(params_2d());
    CHECK(d2.cell_of_tuple({2, 4}) == 10);
    CHECK(d2.members(10) == std::vector<int>{2, 8});
    CHECK(d2.cell_of_members({8, 2}) == 10);

    Design d3 = Design::build(params_3d());
    CHECK(d3.cell_of_tuple({1, 1, 1}) == 1);
    CHECK(d3.members(1) == std::vector<int>{1, 3, 5});

    CHECK_THROWS_AS(d2.members(0), std::out_of_range);
    CHECK_THROWS_AS(d2.members(25), std::out_of_range);
    CHECK_THROWS_AS(d3.cell_of_members({1, 2, 5}), std::invalid_argument);
}

TEST_CASE("cells intersect in fewer than s nodes") {
    for (auto params : {params_2d(), params_3d()}) {
        Design d = Design::build(params);
        for (std::int64_t a = 1; a <= d.num_cells(); ++a) {
            for (std::int64_t b = a + 1; b <= d.num_cells(); ++b) {
                std::vector<int> common;
                std::set_intersection(d.members(a).begin(), d.members(a).end(),
                                      d.members(b).begin(), d.members(b).end(),
                                      std::back_inserter(common));
                CHECK((int)common.size() <= params.s - 1);
            }
        }
    }
}

TEST_CASE("requesters in the rectangle example") {
    Design d = Design::build(params_2d());
    CHECK(d.requesters(10, 10).empty());
    CHECK(d.requesters(10, 7).size() == 1);
    CHECK(d.requesters(10, 7) == std::vector<int>{8});  // node 2 computes it locally
    CHECK(d.requesters(10, 2).size() == 2);
    CHECK_THROWS_AS(d.requesters(0, 1), std::out_of_range);
    CHECK_THROWS_AS(d.requesters(1, 25), std::out_of_range);
}

TEST_CASE("requester count equals the tuple distance everywhere") {
    for (auto params : {params_2d(), params_3d(), DesignParams{2, {2, 3}, 2, 2}}) {
        Design d = Design::build(params);
        for (std::int64_t i = 1; i <= d.num_functions(); ++i) {
            for (std::int64_t j = 1; j <= d.num_files(); ++j) {
                auto req = d.requesters(i, j);
                CHECK((int)req.size() == d.requester_count(i, j));
                std::vector<int> common;
                const auto& ta = d.members(d.function_set_of(i));
                const auto& tl = d.members(d.file_set_of(j));
                std::set_intersection(ta.begin(), ta.end(), tl.begin(), tl.end(),
                                      std::back_inserter(common));
                CHECK((int)req.size() == params.s - (int)common.size());
            }
        }
    }
}

TEST_CASE("replication and storage invariants") {
    for (auto params :
         {params_2d(), params_3d(), DesignParams{4, {2, 3, 2, 2}, 2, 1}}) {
        Design d = Design::build(params);
        std::map<std::int64_t, int> file_holders, func_holders;
        for (int k = 1; k <= d.num_nodes(); ++k) {
            int m = d.group_of(k);
            CHECK((std::int64_t)d.files_of(k).size() == d.num_files() / params.x[m - 1]);
            CHECK((std::int64_t)d.functions_of(k).size() ==
                  d.num_functions() / params.x[m - 1]);
            for (auto f : d.files_of(k)) ++file_holders[f];
            for (auto q : d.functions_of(k)) ++func_holders[q];
        }
        CHECK((std::int64_t)file_holders.size() == d.num_files());
        for (auto& [f, c] : file_holders) CHECK(c == params.s);
        for (auto& [q, c] : func_holders) CHECK(c == params.s);
    }
}

TEST_CASE("relabeling cells preserves per-node views and the histogram") {
    Design d = Design::build(params_3d());
    std::vector<std::int64_t> perm(d.num_cells());
    std::iota(perm.begin(), perm.end(), 1);
    std::mt19937 rng(99);
    std::shuffle(perm.begin(), perm.end(), rng);
    Design r = relabel_cells(d, perm);

    for (int k = 1; k <= d.num_nodes(); ++k) {
        CHECK(d.files_of(k).size() == r.files_of(k).size());
        CHECK(d.functions_of(k).size() == r.functions_of(k).size());
    }
    std::map<int, std::int64_t> hist_d, hist_r;
    for (std::int64_t i = 1; i <= d.num_functions(); ++i)
        for (std::int64_t j = 1; j <= d.num_files(); ++j) {
            ++hist_d[d.requester_count(i, j)];
            ++hist_r[r.requester_count(i, j)];
        }
    CHECK(hist_d == hist_r);
    CHECK_THROWS_AS(relabel_cells(d, std::vector<std::int64_t>(16, 1)), std::invalid_argument);
}

TEST_CASE("permuting nodes within groups preserves structure") {
    Design d = Design::build(params_2d());
    Design p = permute_group_nodes(d, {{4, 3, 2, 1}, {2, 1, 4, 3, 6, 5}});
    std::multiset<size_t> sizes_d, sizes_p;
    for (int k = 1; k <= d.num_nodes(); ++k) {
        sizes_d.insert(d.files_of(k).size());
        sizes_p.insert(p.files_of(k).size());
    }
    CHECK(sizes_d == sizes_p);
    CHECK(p.node_at(1, 1) == 4);
    CHECK(p.group_of(4) == 1);
    CHECK_THROWS_AS(permute_group_nodes(d, {{1, 1, 2, 3}, {1, 2, 3, 4, 5, 6}}),
                    std::invalid_argument);
}

TEST_CASE("invariants hold across randomized parameter draws") {
    std::mt19937 rng(314159);
    std::uniform_int_distribution<int> pick_s(2, 4), pick_x(2, 5), pick_eta(1, 2);
    for (int trial = 0; trial < 25; ++trial) {
        DesignParams params;
        params.s = pick_s(rng);
        for (int i = 0; i < params.s; ++i) params.x.push_back(pick_x(rng));
        params.eta1 = pick_eta(rng);
        params.eta2 = pick_eta(rng);
        Design d = Design::build(params);

        // the cell <-> tuple mapping is a bijection
        std::set<std::vector<int>> tuples;
        for (std::int64_t c = 1; c <= d.num_cells(); ++c) {
            CHECK(tuples.insert(d.tuple_of(c)).second);
            CHECK(d.cell_of_tuple(d.tuple_of(c)) == c);
            CHECK((int)d.members(c).size() == params.s);
        }
        CHECK((std::int64_t)tuples.size() == d.num_cells());

        // every node's storage is exactly inverse to its group size
        for (int k = 1; k <= d.num_nodes(); ++k) {
            int m = d.group_of(k);
            CHECK((std::int64_t)d.files_of(k).size() == d.num_files() / params.x[m - 1]);
        }
    }
}

TEST_CASE("eta blocks are contiguous") {
    Design d = Design::build({2, {2, 3}, 2, 3});
    CHECK(d.num_files() == 12);
    CHECK(d.num_functions() == 18);
    CHECK(d.file_range(1) == std::pair<std::int64_t, std::int64_t>{1, 2});
    CHECK(d.file_range(6) == std::pair<std::int64_t, std::int64_t>{11, 12});
    CHECK(d.function_range(2) == std::pair<std::int64_t, std::int64_t>{4, 6});
    CHECK(d.file_set_of(11) == 6);
    CHECK(d.function_set_of(4) == 2);
}
