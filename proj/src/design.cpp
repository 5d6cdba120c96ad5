#include "ccdc/design.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ccdc {

namespace {
constexpr std::int64_t kMaxCells = 1 << 22;  // keeps build memory bounded
}

int DesignParams::num_nodes() const {
    int k = 0;
    for (int xi : x) k += xi;
    return k;
}

std::int64_t DesignParams::num_cells() const {
    std::int64_t p = 1;
    for (int xi : x) {
        p *= xi;
        if (p > kMaxCells) throw std::invalid_argument("DesignParams: X exceeds supported size");
    }
    return p;
}

std::int64_t DesignParams::num_files() const { return num_cells() * eta1; }
std::int64_t DesignParams::num_functions() const { return num_cells() * eta2; }

void DesignParams::validate() const {
    if (s < 2) throw std::invalid_argument("DesignParams: s must be at least 2");
    if ((int)x.size() != s)
        throw std::invalid_argument("DesignParams: x must list exactly s group sizes");
    for (int xi : x)
        if (xi < 2) throw std::invalid_argument("DesignParams: every group size x_i must be at least 2");
    if (eta1 < 1) throw std::invalid_argument("DesignParams: eta1 must be positive");
    if (eta2 < 1) throw std::invalid_argument("DesignParams: eta2 must be positive");
    num_cells();  // size guard
}

std::string DesignParams::describe() const {
    std::string out = "s=" + std::to_string(s) + " x=(";
    for (size_t i = 0; i < x.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(x[i]);
    }
    out += ") eta1=" + std::to_string(eta1) + " eta2=" + std::to_string(eta2);
    return out;
}

Design::Design(DesignParams params, std::vector<std::vector<int>> groups,
               std::vector<std::vector<int>> tuples)
    : params_(std::move(params)), groups_(std::move(groups)), tuples_(std::move(tuples)) {
    params_.validate();
    k_ = params_.num_nodes();
    x_total_ = params_.num_cells();

    // group partition checks
    node_group_.assign(k_, 0);
    node_pos_.assign(k_, 0);
    if ((int)groups_.size() != params_.s)
        throw std::invalid_argument("Design: group count mismatch");
    for (int m = 0; m < params_.s; ++m) {
        if ((int)groups_[m].size() != params_.x[m])
            throw std::invalid_argument("Design: group size mismatch");
        for (int a = 0; a < params_.x[m]; ++a) {
            int node = groups_[m][a];
            if (node < 1 || node > k_ || node_group_[node - 1] != 0)
                throw std::invalid_argument("Design: groups must partition 1..K");
            node_group_[node - 1] = m + 1;
            node_pos_[node - 1] = a + 1;
        }
    }

    // tuple bijection checks + member lists
    if ((std::int64_t)tuples_.size() != x_total_)
        throw std::invalid_argument("Design: tuple list must cover all X cells");
    rank_to_cell_.assign(x_total_, -1);
    members_.resize(x_total_);
    for (std::int64_t c = 0; c < x_total_; ++c) {
        const auto& t = tuples_[c];
        if ((int)t.size() != params_.s)
            throw std::invalid_argument("Design: tuple arity mismatch");
        std::int64_t rank = 0;
        for (int m = 0; m < params_.s; ++m) {
            if (t[m] < 1 || t[m] > params_.x[m])
                throw std::invalid_argument("Design: tuple coordinate out of range");
            rank = rank * params_.x[m] + (t[m] - 1);
        }
        if (rank_to_cell_[rank] != -1)
            throw std::invalid_argument("Design: duplicate tuple in bijection");
        rank_to_cell_[rank] = c + 1;
        std::vector<int> mem(params_.s);
        for (int m = 0; m < params_.s; ++m) mem[m] = groups_[m][t[m] - 1];
        std::sort(mem.begin(), mem.end());
        members_[c] = std::move(mem);
    }
}

Design Design::build(const DesignParams& params) {
    params.validate();
    std::vector<std::vector<int>> groups(params.s);
    int next = 1;
    for (int m = 0; m < params.s; ++m) {
        groups[m].resize(params.x[m]);
        for (int a = 0; a < params.x[m]; ++a) groups[m][a] = next++;
    }
    std::int64_t x_total = params.num_cells();
    std::vector<std::vector<int>> tuples(x_total);
    std::vector<int> t(params.s, 1);
    for (std::int64_t c = 0; c < x_total; ++c) {
        tuples[c] = t;
        for (int m = params.s - 1; m >= 0; --m) {  // last coordinate fastest
            if (t[m] < params.x[m]) {
                ++t[m];
                break;
            }
            t[m] = 1;
        }
    }
    return Design(params, std::move(groups), std::move(tuples));
}

void Design::check_node(int node) const {
    if (node < 1 || node > k_) throw std::out_of_range("Design: node id out of range");
}

void Design::check_cell(std::int64_t cell) const {
    if (cell < 1 || cell > x_total_) throw std::out_of_range("Design: cell index out of range");
}

int Design::group_of(int node) const {
    check_node(node);
    return node_group_[node - 1];
}

int Design::position_of(int node) const {
    check_node(node);
    return node_pos_[node - 1];
}

int Design::node_at(int group, int position) const {
    if (group < 1 || group > params_.s) throw std::out_of_range("Design: group index out of range");
    if (position < 1 || position > params_.x[group - 1])
        throw std::out_of_range("Design: group position out of range");
    return groups_[group - 1][position - 1];
}

const std::vector<int>& Design::tuple_of(std::int64_t cell) const {
    check_cell(cell);
    return tuples_[cell - 1];
}

std::int64_t Design::cell_of_tuple(const std::vector<int>& positions) const {
    if ((int)positions.size() != params_.s)
        throw std::invalid_argument("Design: tuple arity mismatch");
    std::int64_t rank = 0;
    for (int m = 0; m < params_.s; ++m) {
        if (positions[m] < 1 || positions[m] > params_.x[m])
            throw std::out_of_range("Design: tuple coordinate out of range");
        rank = rank * params_.x[m] + (positions[m] - 1);
    }
    return rank_to_cell_[rank];
}

const std::vector<int>& Design::members(std::int64_t cell) const {
    check_cell(cell);
    return members_[cell - 1];
}

std::int64_t Design::cell_of_members(const std::vector<int>& nodes) const {
    if ((int)nodes.size() != params_.s)
        throw std::invalid_argument("Design: a cell has exactly one node per group");
    std::vector<int> positions(params_.s, 0);
    for (int node : nodes) {
        int m = group_of(node);
        if (positions[m - 1] != 0)
            throw std::invalid_argument("Design: node set has two nodes in one group");
        positions[m - 1] = position_of(node);
    }
    return cell_of_tuple(positions);
}

std::int64_t Design::file_set_of(std::int64_t file_id) const {
    if (file_id < 1 || file_id > num_files()) throw std::out_of_range("Design: file id out of range");
    return (file_id - 1) / params_.eta1 + 1;
}

std::int64_t Design::function_set_of(std::int64_t function_id) const {
    if (function_id < 1 || function_id > num_functions())
        throw std::out_of_range("Design: function id out of range");
    return (function_id - 1) / params_.eta2 + 1;
}

std::pair<std::int64_t, std::int64_t> Design::file_range(std::int64_t cell) const {
    check_cell(cell);
    return {(cell - 1) * params_.eta1 + 1, cell * params_.eta1};
}

std::pair<std::int64_t, std::int64_t> Design::function_range(std::int64_t cell) const {
    check_cell(cell);
    return {(cell - 1) * params_.eta2 + 1, cell * params_.eta2};
}

bool Design::node_has_file(int node, std::int64_t file_id) const {
    std::int64_t cell = file_set_of(file_id);
    check_node(node);
    int m = node_group_[node - 1];
    return tuples_[cell - 1][m - 1] == node_pos_[node - 1];
}

bool Design::node_has_function(int node, std::int64_t function_id) const {
    std::int64_t cell = function_set_of(function_id);
    check_node(node);
    int m = node_group_[node - 1];
    return tuples_[cell - 1][m - 1] == node_pos_[node - 1];
}

std::vector<std::int64_t> Design::files_of(int node) const {
    check_node(node);
    std::vector<std::int64_t> out;
    out.reserve((num_files() / params_.x[node_group_[node - 1] - 1]));
    for (std::int64_t c = 1; c <= x_total_; ++c) {
        if (tuples_[c - 1][node_group_[node - 1] - 1] == node_pos_[node - 1]) {
            auto [lo, hi] = file_range(c);
            for (std::int64_t f = lo; f <= hi; ++f) out.push_back(f);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::int64_t> Design::functions_of(int node) const {
    check_node(node);
    std::vector<std::int64_t> out;
    out.reserve((num_functions() / params_.x[node_group_[node - 1] - 1]));
    for (std::int64_t c = 1; c <= x_total_; ++c) {
        if (tuples_[c - 1][node_group_[node - 1] - 1] == node_pos_[node - 1]) {
            auto [lo, hi] = function_range(c);
            for (std::int64_t q = lo; q <= hi; ++q) out.push_back(q);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

NodeView Design::node_view(int node) const {
    return NodeView{node, files_of(node), functions_of(node)};
}

std::vector<int> Design::requesters(std::int64_t function_id, std::int64_t file_id) const {
    std::int64_t alpha = function_set_of(function_id);
    std::int64_t ell = file_set_of(file_id);
    const auto& ta = tuples_[alpha - 1];
    const auto& tl = tuples_[ell - 1];
    std::vector<int> out;
    for (int m = 0; m < params_.s; ++m)
        if (ta[m] != tl[m]) out.push_back(groups_[m][ta[m] - 1]);
    std::sort(out.begin(), out.end());
    return out;
}

int Design::requester_count(std::int64_t function_id, std::int64_t file_id) const {
    std::int64_t alpha = function_set_of(function_id);
    std::int64_t ell = file_set_of(file_id);
    const auto& ta = tuples_[alpha - 1];
    const auto& tl = tuples_[ell - 1];
    int n = 0;
    for (int m = 0; m < params_.s; ++m) n += ta[m] != tl[m];
    return n;
}

Design relabel_cells(const Design& d, const std::vector<std::int64_t>& perm) {
    if ((std::int64_t)perm.size() != d.num_cells())
        throw std::invalid_argument("relabel_cells: permutation must cover 1..X");
    std::vector<std::vector<int>> tuples(perm.size());
    std::vector<bool> seen(perm.size(), false);
    for (size_t i = 0; i < perm.size(); ++i) {
        std::int64_t src = perm[i];
        if (src < 1 || src > (std::int64_t)perm.size() || seen[src - 1])
            throw std::invalid_argument("relabel_cells: not a permutation of 1..X");
        seen[src - 1] = true;
        tuples[i] = d.tuple_of(src);
    }
    return Design(d.params(), d.groups(), std::move(tuples));
}

Design permute_group_nodes(const Design& d, const std::vector<std::vector<int>>& perms) {
    const auto& params = d.params();
    if ((int)perms.size() != params.s)
        throw std::invalid_argument("permute_group_nodes: one permutation per group required");
    std::vector<std::vector<int>> groups(params.s);
    for (int m = 0; m < params.s; ++m) {
        if ((int)perms[m].size() != params.x[m])
            throw std::invalid_argument("permute_group_nodes: permutation size mismatch");
        std::vector<bool> seen(params.x[m], false);
        groups[m].resize(params.x[m]);
        for (int a = 0; a < params.x[m]; ++a) {
            int src = perms[m][a];
            if (src < 1 || src > params.x[m] || seen[src - 1])
                throw std::invalid_argument("permute_group_nodes: not a permutation of 1..x_m");
            seen[src - 1] = true;
            groups[m][a] = d.groups()[m][src - 1];
        }
    }
    std::vector<std::vector<int>> tuples(d.num_cells());
    for (std::int64_t c = 1; c <= d.num_cells(); ++c) tuples[c - 1] = d.tuple_of(c);
    return Design(params, std::move(groups), std::move(tuples));
}

}  // namespace ccdc
