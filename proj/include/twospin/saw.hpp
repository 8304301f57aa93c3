#pragma once

// Self-avoiding-walk tree T_SAW(G, v), built lazily.
//
// Nodes correspond to walks from the root that never revisit a vertex. When a
// walk at u sees a neighbor w already on the walk, the copy of w becomes a
// fixed leaf that closes the cycle. Its spin depends on how the closing edge
// (w, u) ranks against the edge by which the walk left w, in w's canonical
// edge order. Evaluating the tree recursion on this tree reproduces the graph
// marginal at the root exactly.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "twospin/graph.hpp"

namespace twospin {

enum class SawKind : std::uint8_t { Free, Fixed };

/// Spin of a cycle-closing copy whose closing edge ranks above the departing edge.
inline constexpr Spin kClosingHigherSpin = Spin::Blue;

/// One child slot of a free SAW node.
struct SawChild {
    Vertex origin = 0;
    SawKind kind = SawKind::Free;
    Spin spin = Spin::Green;  ///< meaningful when kind == Fixed
    bool closes_cycle = false;
};

/// The current walk from the root, with O(1) membership and push/pop. Used
/// as the explicit work stack of every depth-first SAW traversal.
class SawWalk {
public:
    SawWalk(const Graph& g, const Boundary& boundary, Vertex root);
    SawWalk(const Graph&, Boundary&&, Vertex) = delete;
    SawWalk(Graph&&, const Boundary&, Vertex) = delete;

    Vertex root() const { return walk_.front(); }
    Vertex top() const { return walk_.back(); }
    /// Number of edges on the walk, i.e. the depth of the top node.
    int depth() const { return static_cast<int>(walk_.size()) - 1; }
    std::span<const Vertex> vertices() const { return walk_; }
    bool on_walk(Vertex v) const { return position_[static_cast<std::size_t>(v)] >= 0; }

    /// Children of the top node in canonical edge order, minus the parent edge.
    void children(std::vector<SawChild>& out) const;
    /// Extends the walk to a free child of the top node.
    void push(Vertex w);
    void pop();

private:
    const Graph* graph_;
    const Boundary* boundary_;
    std::vector<Vertex> walk_;
    std::vector<int> position_;
};

using SawNodeId = std::int64_t;

struct SawNode {
    Vertex origin = 0;
    SawNodeId parent = -1;
    SawKind kind = SawKind::Free;
    Spin spin = Spin::Green;
    bool closes_cycle = false;
    int depth = 0;
    int m_depth = 0;
};

/// Materialized prefix of T_SAW(G, v) for inspection and tests. Large trees
/// are only ever traversed through SawWalk.
class SawTree {
public:
    /// A root fixed by the boundary becomes a fixed root.
    SawTree(const Graph& g, Boundary boundary, Vertex root);
    SawTree(Graph&&, Boundary, Vertex) = delete;

    static constexpr SawNodeId kRoot = 0;

    const SawNode& node(SawNodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return nodes_.size(); }

    /// Creates (once) and returns the children of a free node. Expanding a
    /// fixed node throws ContractViolation.
    std::span<const SawNodeId> expand(SawNodeId id);
    bool is_expanded(SawNodeId id) const;

    /// Origins from the root to `id`.
    std::vector<Vertex> walk_to(SawNodeId id) const;

    /// JSON dump of the first `levels` levels: origin, kind, spin, children.
    std::string dump_json(int levels);

private:
    const Graph* graph_;
    Boundary boundary_;
    std::vector<SawNode> nodes_;
    std::vector<std::vector<SawNodeId>> children_;
    std::vector<char> expanded_;
};

/// Number of SAW-tree nodes at depth <= t, including fixed leaves. Stops
/// counting at `cap` + 1.
std::int64_t saw_tree_size(const Graph& g, Vertex v, int t, const Boundary& boundary = {},
                           std::int64_t cap = INT64_MAX);

}  // namespace twospin
