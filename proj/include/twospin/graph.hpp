#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twospin/spin_core.hpp"

namespace twospin {

using Vertex = int;

enum class Spin : std::uint8_t { Blue, Green };

inline Spin flip(Spin s) { return s == Spin::Blue ? Spin::Green : Spin::Blue; }
std::string to_string(Spin s);

/// Finite simple undirected graph with sorted adjacency lists. The sorted
/// order is the canonical edge order at each vertex.
class Graph {
public:
    Graph() = default;
    explicit Graph(int n);

    /// Builds and validates. Throws ParseError on self-loops, duplicate
    /// edges, or out-of-range endpoints.
    static Graph from_edges(int n, std::span<const std::pair<Vertex, Vertex>> edges);

    int num_vertices() const { return static_cast<int>(adjacency_.size()); }
    std::size_t num_edges() const;
    std::span<const Vertex> neighbors(Vertex v) const { return adjacency_.at(static_cast<std::size_t>(v)); }
    int degree(Vertex v) const { return static_cast<int>(neighbors(v).size()); }
    /// Position of `u` in v's canonical order, or -1 if not adjacent.
    int edge_rank(Vertex v, Vertex u) const;
    bool has_edge(Vertex u, Vertex v) const { return edge_rank(u, v) >= 0; }
    std::vector<std::pair<Vertex, Vertex>> edges() const;

    /// Per-vertex field overrides; vertices without one use the global lambda.
    void set_field(Vertex v, double lambda_v);
    std::optional<double> field_override(Vertex v) const;
    double field(Vertex v, double global_lambda) const;
    const std::map<Vertex, double>& field_overrides() const { return fields_; }

    void set_label(Vertex v, std::string label);
    const std::vector<std::string>& labels() const { return labels_; }

    /// Checks simplicity, symmetry, and sorted neighbor lists.
    void validate() const;

private:
    std::vector<std::vector<Vertex>> adjacency_;
    std::map<Vertex, double> fields_;
    std::vector<std::string> labels_;
};

int max_degree(const Graph& g);

/// Fixed spins and, optionally, the set S on which two boundary conditions differ.
struct Boundary {
    std::map<Vertex, Spin> fixed;
    std::vector<Vertex> differing;  ///< sorted; subset of the fixed vertices

    bool is_fixed(Vertex v) const { return fixed.count(v) != 0; }
    bool in_differing(Vertex v) const;
    /// Throws InvalidArgument when a vertex is out of range or S is not fixed.
    void validate(const Graph& g) const;
};

/// Everything a graph file may carry.
struct GraphFile {
    Graph graph;
    std::optional<Boundary> boundary;
    std::optional<SpinSystem> params;
};

/// Parses the JSON graph format. Errors name the line (syntax) or the field path.
GraphFile load_graph_text(const std::string& text);
GraphFile load_graph_file(const std::string& path);
/// Canonical JSON: edges as sorted (u < v) pairs in lexicographic order.
std::string save_graph_text(const GraphFile& file);

namespace generators {

Graph path(int n);
Graph cycle(int n);
Graph complete(int n);
/// K_{1,leaves}; vertex 0 is the center.
Graph star(int leaves);
/// Two adjacent centers, each with `leaves` pendant vertices.
Graph double_star(int leaves);
/// Uniform pairing model with restarts; rejects loops and multi-edges.
Graph random_regular(int n, int d, std::uint64_t seed);
/// Each new vertex attaches to a uniform earlier vertex of degree below
/// `max_degree` (0 means unlimited).
Graph random_tree(int n, std::uint64_t seed, int max_degree = 0);
/// Erdos-Renyi G(n, p).
Graph random_gnp(int n, double p, std::uint64_t seed);

}  // namespace generators

bool is_connected(const Graph& g);

/// Breadth-first distances from `source`; -1 for unreachable vertices.
std::vector<int> bfs_distances(const Graph& g, Vertex source);

}  // namespace twospin
