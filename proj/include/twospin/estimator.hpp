#pragma once

// Certified marginal bounds by truncated recursion on the SAW tree, and the
// sequential-conditioning approximation of the partition function.
//
// Each SAW node carries an interval [lo, hi] on its ratio. Fixed leaves are
// points, vertices in the differing set S and nodes past the truncation
// frontier are [0, +inf], and a free node maps its children through the
// recursion, which is decreasing in every argument:
//
//     lo = f(children hi...),   hi = f(children lo...).

#include <cstdint>
#include <optional>
#include <vector>

#include "twospin/graph.hpp"
#include "twospin/spin_core.hpp"
#include "twospin/uniqueness.hpp"

namespace twospin {

struct TruncationPolicy {
    enum class Mode { Depth, MBased, Auto };

    Mode mode = Mode::Auto;
    int depth = 0;       ///< Depth: nodes at graph depth >= depth are frontier
    double M = 2.0;      ///< MBased: base of the degree-weighted depth
    int ell = 0;         ///< MBased: nodes outside B(ell) are frontier
    double eps = 0.01;   ///< Auto: target width in probability space

    static TruncationPolicy at_depth(int t);
    static TruncationPolicy m_based(double M, int ell);
    static TruncationPolicy automatic(double eps);
};

/// Which analysis backs Auto resolution.
enum class DegreeMode {
    Auto,       ///< bounded if unique up to the max degree, else unbounded
    Bounded,    ///< depth truncation; needs uniqueness up to max degree
    Unbounded,  ///< M-based truncation; needs universal uniqueness
};

struct EvalOptions {
    int threads = 1;
    std::int64_t node_budget = 50'000'000;
    DegreeMode degree_mode = DegreeMode::Auto;
};

struct MarginalBounds {
    ExtendedRatio r_lo;
    ExtendedRatio r_hi = ExtendedRatio::infinity();
    double p_lo = 0.0;
    double p_hi = 1.0;
    /// Every SAW node touched, frontier and fixed leaves included.
    std::int64_t nodes_visited = 0;
    /// Free nodes whose recursion was applied (the set B(ell) in M-based mode).
    std::int64_t nodes_expanded = 0;

    double width() const { return p_hi - p_lo; }
    /// r_hi - r_lo, +inf when r_hi is.
    double ratio_width() const;
};

/// Bounds for a Depth or MBased policy. The system must be anti-ferromagnetic
/// after the optional spin exchange; no uniqueness is required, the interval
/// is sound regardless. Throws BudgetExceeded past options.node_budget nodes.
MarginalBounds bounds(const SpinSystem& s, const Graph& g, Vertex v, const Boundary& boundary,
                      const TruncationPolicy& policy, const EvalOptions& options = {});

struct MarginalEstimate {
    MarginalBounds bounds;
    TruncationPolicy resolved;  ///< the Depth or MBased policy that met the target
    double alpha = 0.0;         ///< contraction rate used to seed the depth
    bool converged = true;      ///< false if the tree was exhausted before reaching eps
};

/// Deepens the truncation until p_hi - p_lo <= eps. Throws PreconditionError
/// (naming the degree) when the required uniqueness fails.
MarginalEstimate estimate_marginal(const SpinSystem& s, const Graph& g, Vertex v, const Boundary& boundary,
                                   double eps, const EvalOptions& options = {});

struct PartitionEstimate {
    double log_z = 0.0;
    double rel_error_bound = 0.0;
    std::vector<Spin> chosen_config;
    /// Conditional probability of each chosen spin, in elimination order.
    std::vector<double> per_vertex_p;
    std::vector<Vertex> order;
};

struct PartitionOptions {
    EvalOptions eval;
    /// Elimination order; empty means 0..n-1.
    std::vector<Vertex> order;
};

/// Z = w(sigma_n) / prod p_i with each p_i estimated to additive eps/(4n).
PartitionEstimate approx_partition(const SpinSystem& s, const Graph& g, double eps,
                                   const PartitionOptions& options = {});

struct DecayPoint {
    int t = 0;
    double ratio_width = 0.0;  ///< r_hi - r_lo (may be +inf)
    double width = 0.0;        ///< p_hi - p_lo
    double p_lo = 0.0;
    double p_hi = 1.0;
};

/// Bounds at every depth 0..t_max.
std::vector<DecayPoint> decay_curve(const SpinSystem& s, const Graph& g, Vertex v, const Boundary& boundary,
                                    int t_max, const EvalOptions& options = {});

/// Degree bound the bounded-degree analysis uses for `g`: max(max degree, 2).
DegreeBound analysis_degree(const Graph& g);

}  // namespace twospin
