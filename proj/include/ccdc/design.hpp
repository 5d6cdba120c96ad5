#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ccdc {

// Parameters of the lattice placement: s node groups of sizes x_1..x_s,
// eta1 files per file set and eta2 functions per function set.
struct DesignParams {
    int s = 0;
    std::vector<int> x;
    int eta1 = 1;
    int eta2 = 1;

    int num_nodes() const;            // K = sum x_i
    std::int64_t num_cells() const;   // X = prod x_i
    std::int64_t num_files() const;   // N = eta1 * X
    std::int64_t num_functions() const;  // Q = eta2 * X

    // Throws std::invalid_argument on any violated constraint
    // (s >= 2, x.size() == s, every x_i >= 2, eta1 >= 1, eta2 >= 1).
    void validate() const;

    std::string describe() const;  // "s=2 x=(4,6) eta1=1 eta2=1"
};

// One node's placement view: the files it stores and the functions it is
// assigned, both as sorted 1-based id lists.
struct NodeView {
    int node = 0;
    std::vector<std::int64_t> files;
    std::vector<std::int64_t> functions;
};

// Immutable placement: node groups, the cell-index <-> lattice-tuple
// bijection, and the block layout of file/function sets. Node ids, cell
// indices, file ids and function ids are all 1-based.
//
// The canonical build assigns groups contiguously (group 1 = nodes
// 1..x_1, ...) and indexes cells in mixed radix with the first coordinate
// varying slowest. relabel_cells / permute_group_nodes produce
// structurally equivalent designs for invariance checks.
class Design {
public:
    static Design build(const DesignParams& params);

    const DesignParams& params() const { return params_; }
    int num_groups() const { return params_.s; }
    int num_nodes() const { return k_; }
    std::int64_t num_cells() const { return x_total_; }
    std::int64_t num_files() const { return x_total_ * params_.eta1; }
    std::int64_t num_functions() const { return x_total_ * params_.eta2; }

    // group / node structure
    const std::vector<std::vector<int>>& groups() const { return groups_; }
    int group_of(int node) const;          // 1..s
    int position_of(int node) const;       // 1..x_m within its group
    int node_at(int group, int position) const;

    // cell structure
    const std::vector<int>& tuple_of(std::int64_t cell) const;        // positions, size s
    std::int64_t cell_of_tuple(const std::vector<int>& positions) const;
    const std::vector<int>& members(std::int64_t cell) const;         // T_i, sorted node ids
    // Cell whose member set is exactly `nodes` (any order); throws if the
    // set is not a transversal of the groups.
    std::int64_t cell_of_members(const std::vector<int>& nodes) const;

    // file / function sets (contiguous blocks by cell index)
    std::int64_t file_set_of(std::int64_t file_id) const;        // index of B containing the file
    std::int64_t function_set_of(std::int64_t function_id) const;
    std::pair<std::int64_t, std::int64_t> file_range(std::int64_t cell) const;  // [first,last]
    std::pair<std::int64_t, std::int64_t> function_range(std::int64_t cell) const;

    // per-node placement
    bool node_has_file(int node, std::int64_t file_id) const;
    bool node_has_function(int node, std::int64_t function_id) const;
    std::vector<std::int64_t> files_of(int node) const;      // M_k, sorted
    std::vector<std::int64_t> functions_of(int node) const;  // W_k, sorted
    NodeView node_view(int node) const;

    // Nodes assigned function_id that cannot locally compute v over
    // file_id, i.e. T_alpha minus the file owners. Sorted.
    std::vector<int> requesters(std::int64_t function_id, std::int64_t file_id) const;
    // Count only; equals s - |T_alpha intersect T_ell|.
    int requester_count(std::int64_t function_id, std::int64_t file_id) const;

private:
    friend Design relabel_cells(const Design&, const std::vector<std::int64_t>&);
    friend Design permute_group_nodes(const Design&, const std::vector<std::vector<int>>&);

    Design(DesignParams params, std::vector<std::vector<int>> groups,
           std::vector<std::vector<int>> tuples);

    void check_node(int node) const;
    void check_cell(std::int64_t cell) const;

    DesignParams params_;
    int k_ = 0;
    std::int64_t x_total_ = 0;
    std::vector<std::vector<int>> groups_;      // [group-1][pos-1] -> node id
    std::vector<int> node_group_;               // [node-1] -> group 1..s
    std::vector<int> node_pos_;                 // [node-1] -> position 1..x_m
    std::vector<std::vector<int>> tuples_;      // [cell-1] -> positions
    std::vector<std::vector<int>> members_;     // [cell-1] -> sorted node ids
    std::vector<std::int64_t> rank_to_cell_;    // canonical mixed-radix rank -> cell index
};

// New design whose cell i carries the tuple the source kept at perm[i-1]
// (perm is a 1-based permutation of 1..X given as a vector of length X).
Design relabel_cells(const Design& d, const std::vector<std::int64_t>& perm);

// New design where position a of group m is occupied by
// d.groups()[m-1][perms[m-1][a-1]-1]; each perms[m-1] is a 1-based
// permutation of 1..x_m.
Design permute_group_nodes(const Design& d, const std::vector<std::vector<int>>& perms);

}  // namespace ccdc
