#pragma once

// Exhaustive ground truth for small instances.

#include <cstdint>
#include <optional>

#include "twospin/graph.hpp"
#include "twospin/spin_core.hpp"

namespace twospin {

struct ExactResult {
    long double log_z = 0.0L;
    /// Blue probability of the queried vertex, when one was given.
    std::optional<double> marginal;
    /// Number of configurations enumerated (2^free vertices).
    std::uint64_t config_count = 0;
};

inline constexpr int kDefaultMaxFreeVertices = 25;

/// Sum over every configuration consistent with the boundary. Works for any
/// nonnegative (beta, gamma) and positive fields; uses per-vertex overrides.
/// Throws BudgetExceeded above `max_free` free vertices and DomainError when
/// every configuration has weight zero.
ExactResult exact_partition(const SpinSystem& s, const Graph& g, const Boundary& boundary = {},
                            int max_free = kDefaultMaxFreeVertices);

/// Blue probability of `v` conditioned on the boundary.
double exact_marginal(const SpinSystem& s, const Graph& g, Vertex v, const Boundary& boundary = {},
                      int max_free = kDefaultMaxFreeVertices);

/// Z(v blue) / Z(v green) conditioned on the boundary, by enumeration.
ExtendedRatio exact_ratio(const SpinSystem& s, const Graph& g, Vertex v, const Boundary& boundary = {},
                          int max_free = kDefaultMaxFreeVertices);

/// Log-weight of a full configuration; -inf when a hard constraint is violated.
long double log_weight(const SpinSystem& s, const Graph& g, std::span<const Spin> config);

/// Fully expands T_SAW(G, v) and evaluates the tree recursion exactly.
/// Throws BudgetExceeded past `node_budget` nodes.
ExtendedRatio exact_saw_ratio(const SpinSystem& s, const Graph& g, Vertex v, const Boundary& boundary = {},
                              std::int64_t node_budget = 10'000'000);

}  // namespace twospin
