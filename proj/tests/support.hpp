#pragma once

// Hand-rolled generators shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "twospin/error.hpp"
#include "twospin/graph.hpp"
#include "twospin/oracle.hpp"
#include "twospin/spin_core.hpp"
#include "twospin/uniqueness.hpp"

namespace testsupport {

using namespace twospin;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

/// Anti-ferromagnetic triple; sometimes hardcore, sometimes with beta > gamma
/// so the spin exchange is exercised.
inline SpinSystem random_af_system(Rng& rng) {
    const double lambda = std::exp(uniform(rng, std::log(0.2), std::log(4.0)));
    const int shape = uniform_int(rng, 0, 5);
    if (shape == 0) return {0.0, uniform(rng, 0.3, 3.0), lambda};
    const double gamma = std::exp(uniform(rng, std::log(0.2), std::log(4.0)));
    const double beta_max = std::min(gamma, 1.0 / gamma);
    const double beta = uniform(rng, 0.0, 0.98) * beta_max;
    if (shape == 1) return {gamma, beta, lambda};  // beta > gamma
    return {beta, gamma, lambda};
}

/// Canonical code of a graph on at most 7 vertices: the minimum upper-triangle
/// bitmask over all vertex permutations.
inline std::uint64_t canonical_code(const Graph& g) {
    const int n = g.num_vertices();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    const auto edges = g.edges();
    std::uint64_t best = ~std::uint64_t{0};
    do {
        std::uint64_t code = 0;
        for (const auto& [u, v] : edges) {
            int a = perm[static_cast<std::size_t>(u)], b = perm[static_cast<std::size_t>(v)];
            if (a > b) std::swap(a, b);
            code |= std::uint64_t{1} << (a * n + b);
        }
        best = std::min(best, code);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best | (static_cast<std::uint64_t>(n) << 56);
}

/// Connected graphs with 1..max_n vertices, one per isomorphism class, drawn
/// from paths, cycles, complete graphs, stars and random G(n, p).
inline std::vector<Graph> small_graph_corpus(int max_n = 7, int random_per_n = 60, std::uint64_t seed = 7) {
    std::vector<Graph> candidates;
    for (int n = 1; n <= max_n; ++n) {
        candidates.push_back(generators::path(n));
        candidates.push_back(generators::complete(n));
        if (n >= 3) candidates.push_back(generators::cycle(n));
        if (n >= 2) candidates.push_back(generators::star(n - 1));
    }
    Rng rng(seed);
    for (int n = 3; n <= max_n; ++n)
        for (int i = 0; i < random_per_n; ++i)
            candidates.push_back(generators::random_gnp(n, uniform(rng, 0.25, 0.8), rng()));
    std::set<std::uint64_t> seen;
    std::vector<Graph> out;
    for (Graph& g : candidates) {
        if (!is_connected(g)) continue;
        if (seen.insert(canonical_code(g)).second) out.push_back(std::move(g));
    }
    return out;
}

/// Random boundary avoiding `root`, with a random subset S of the fixed
/// vertices when `with_s`. Rejects boundaries of total weight zero.
inline Boundary random_boundary(Rng& rng, const SpinSystem& s, const Graph& g, Vertex root, bool with_s) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Boundary b;
        for (Vertex v = 0; v < g.num_vertices(); ++v) {
            if (v == root || !coin(rng, 0.3)) continue;
            b.fixed[v] = coin(rng) ? Spin::Blue : Spin::Green;
            if (with_s && coin(rng, 0.4)) b.differing.push_back(v);
        }
        try {
            exact_partition(s, g, b);
            return b;
        } catch (const DomainError&) {
        }
    }
    return {};
}

/// Per-vertex fields in [0.5 lambda, 1.5 lambda].
inline void randomize_fields(Rng& rng, Graph& g, double lambda) {
    for (Vertex v = 0; v < g.num_vertices(); ++v) g.set_field(v, lambda * uniform(rng, 0.5, 1.5));
}

/// |a - b| <= tol (relative for large values); both infinite counts as equal.
inline bool ratio_close(ExtendedRatio a, ExtendedRatio b, double tol) {
    if (a.is_infinite() || b.is_infinite()) return a.is_infinite() == b.is_infinite();
    const double x = a.value(), y = b.value();
    return std::abs(x - y) <= tol * std::max(1.0, std::max(std::abs(x), std::abs(y)));
}

/// r_lo <= r <= r_hi up to a relative slack.
inline bool ratio_within(ExtendedRatio r, ExtendedRatio lo, ExtendedRatio hi, double tol) {
    const double x = r.as_double(), a = lo.as_double(), b = hi.as_double();
    auto le = [&](double p, double q) {
        if (std::isinf(q)) return true;
        if (std::isinf(p)) return false;
        return p <= q + tol * std::max(1.0, std::abs(q));
    };
    return le(a, x) && le(x, b);
}

}  // namespace testsupport
