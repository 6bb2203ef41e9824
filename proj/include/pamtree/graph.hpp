#pragma once
// Rooted trees (parent-array encoding, BFS-ordered ids), undirected graphs,
// balls and lower balls, the Laplacian quadratic form and tree-animal
// enumeration.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pamtree/common.hpp"

namespace pamtree {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = 0xffffffffu;

// Finite rooted tree. Ids are contiguous and BFS-ordered: parent(i) < i for
// every non-root vertex, root is id 0. Immutable after construction.
class RootedTree {
  public:
    // `parents[0]` must be kNoVertex; parents[i] < i for i >= 1.
    static RootedTree from_parents(std::vector<VertexId> parents);

    std::size_t num_vertices() const { return parent_.size(); }
    VertexId root() const { return 0; }
    VertexId parent(VertexId v) const { return parent_[v]; }
    std::uint32_t depth(VertexId v) const { return depth_[v]; }
    std::uint32_t max_depth() const { return max_depth_; }

    std::span<const VertexId> children(VertexId v) const {
        return {child_ids_.data() + child_off_[v], child_off_[v + 1] - child_off_[v]};
    }

    // degree(v) = #children + (0 if root else 1)
    std::uint32_t degree(VertexId v) const {
        return static_cast<std::uint32_t>(children(v).size()) + (v == 0 ? 0u : 1u);
    }

    bool valid(VertexId v) const { return v < parent_.size(); }

  private:
    std::vector<VertexId> parent_;
    std::vector<std::uint32_t> depth_;
    std::vector<std::size_t> child_off_;
    std::vector<VertexId> child_ids_;
    std::uint32_t max_depth_ = 0;
};

// Sorted id list over some host tree/graph.
struct VertexSubset {
    std::vector<VertexId> ids;  // ascending, unique

    std::size_t size() const { return ids.size(); }
    bool empty() const { return ids.empty(); }
    bool contains(VertexId v) const;

    // Membership flags sized for a host with n vertices.
    std::vector<std::uint8_t> flags(std::size_t n) const;
};

// Simple undirected graph in CSR form. Edges are stored once per direction.
class Graph {
  public:
    static Graph from_edges(std::size_t n, std::span<const std::pair<VertexId, VertexId>> edges);
    static Graph from_tree(const RootedTree& tree);

    std::size_t num_vertices() const { return off_.size() - 1; }
    std::size_t num_edges() const { return adj_.size() / 2; }
    std::uint32_t degree(VertexId v) const {
        return static_cast<std::uint32_t>(off_[v + 1] - off_[v]);
    }
    std::span<const VertexId> neighbors(VertexId v) const {
        return {adj_.data() + off_[v], off_[v + 1] - off_[v]};
    }

  private:
    std::vector<std::size_t> off_;
    std::vector<VertexId> adj_;
};

// All vertices within graph distance `radius` of `center`, sorted by id.
VertexSubset ball(const RootedTree& tree, VertexId center, std::uint32_t radius);

// Descendants x of v with x[-i] = v for some 0 <= i <= radius.
VertexSubset lower_ball(const RootedTree& tree, VertexId v, std::uint32_t radius);

// <(Delta phi), phi> = -sum over edges (phi(x)-phi(y))^2.
double quadratic_form(const Graph& g, std::span<const double> phi);
double quadratic_form(const RootedTree& tree, std::span<const double> phi);

// Connected subsets of size n+1 containing x, all inside ball(x, n).
// Exhaustive and duplicate-free; throws resource_error past `cap` results.
std::vector<VertexSubset> tree_animals(const RootedTree& tree, VertexId x, std::uint32_t n,
                                       std::size_t cap = 1000000);

struct MaxDegreeReport {
    std::uint32_t max_degree = 0;
    bool truncated = false;  // radius exceeds the materialized depth
};
MaxDegreeReport max_degree_in_ball(const RootedTree& tree, std::uint32_t radius);

// Line-oriented text format: "pamtree v1 n=<count> root=0", then one line
// "id parent" per vertex (root has parent -1). Round-trips bit-exactly.
void write_tree(std::ostream& os, const RootedTree& tree);
RootedTree read_tree(std::istream& is);

}  // namespace pamtree
