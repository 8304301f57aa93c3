#include "twospin/oracle.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <vector>

#include "twospin/error.hpp"
#include "twospin/saw.hpp"

namespace twospin {

namespace {

using real = long double;
constexpr real kNegInf = -std::numeric_limits<real>::infinity();

void check_weights(const SpinSystem& s) {
    if (!(s.beta >= 0.0) || !(s.gamma >= 0.0) || !std::isfinite(s.beta) || !std::isfinite(s.gamma))
        throw InvalidParameter("edge weights must be finite and nonnegative");
    if (!(s.lambda > 0.0)) throw InvalidParameter("lambda must be positive");
}

// Weight bookkeeping for one edge: log of a positive factor, or a zero flag.
struct EdgeTerm {
    real log = 0.0L;
    bool zero = false;
};

EdgeTerm edge_term(const SpinSystem& s, Spin a, Spin b) {
    real w = 1.0L;
    if (a == Spin::Blue && b == Spin::Blue) w = s.beta;
    if (a == Spin::Green && b == Spin::Green) w = s.gamma;
    if (w == 0.0L) return {0.0L, true};
    return {std::log(w), false};
}

class KahanSum {
public:
    void add(real x) {
        const real y = x - carry_;
        const real t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    real value() const { return sum_; }

private:
    real sum_ = 0.0L;
    real carry_ = 0.0L;
};

struct Enumeration {
    real shift = kNegInf;  // max log-weight
    real blue = 0.0L;      // sum of exp(lw - shift) with target blue
    real green = 0.0L;
    std::uint64_t count = 0;
};

// Visits every configuration of the free vertices in Gray-code order,
// updating the log-weight incrementally. Pass 1 finds the maximum, pass 2
// sums exp(lw - max) so no term overflows.
Enumeration enumerate(const SpinSystem& s, const Graph& g, const Boundary& boundary, Vertex target, int max_free) {
    check_weights(s);
    boundary.validate(g);
    const int n = g.num_vertices();
    std::vector<Spin> config(static_cast<std::size_t>(n), Spin::Green);
    std::vector<Vertex> free;
    for (Vertex v = 0; v < n; ++v) {
        if (const auto it = boundary.fixed.find(v); it != boundary.fixed.end())
            config[static_cast<std::size_t>(v)] = it->second;
        else
            free.push_back(v);
    }
    if (static_cast<int>(free.size()) > max_free || free.size() >= 63)
        throw BudgetExceeded("exact enumeration over " + std::to_string(free.size()) + " free vertices exceeds cap " +
                             std::to_string(max_free));

    std::vector<real> log_field(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) log_field[static_cast<std::size_t>(v)] = std::log(static_cast<real>(g.field(v, s.lambda)));

    real base = 0.0L;
    int zeros = 0;
    for (const auto& [u, v] : g.edges()) {
        const EdgeTerm t = edge_term(s, config[static_cast<std::size_t>(u)], config[static_cast<std::size_t>(v)]);
        if (t.zero)
            ++zeros;
        else
            base += t.log;
    }
    for (Vertex v = 0; v < n; ++v)
        if (config[static_cast<std::size_t>(v)] == Spin::Blue) base += log_field[static_cast<std::size_t>(v)];

    auto flip_vertex = [&](Vertex x, real& lw, int& z) {
        Spin& sx = config[static_cast<std::size_t>(x)];
        for (Vertex y : g.neighbors(x)) {
            const Spin sy = config[static_cast<std::size_t>(y)];
            const EdgeTerm before = edge_term(s, sx, sy);
            const EdgeTerm after = edge_term(s, flip(sx), sy);
            if (before.zero) --z; else lw -= before.log;
            if (after.zero) ++z; else lw += after.log;
        }
        lw += (sx == Spin::Blue ? -1.0L : 1.0L) * log_field[static_cast<std::size_t>(x)];
        sx = flip(sx);
    };

    const std::uint64_t total = std::uint64_t{1} << free.size();
    const std::vector<Spin> initial = config;
    Enumeration out;
    out.count = total;
    for (int pass = 0; pass < 2; ++pass) {
        config = initial;
        real lw = base;
        int z = zeros;
        KahanSum blue, green;
        for (std::uint64_t k = 0; k < total; ++k) {
            if (k > 0) flip_vertex(free[static_cast<std::size_t>(std::countr_zero(k))], lw, z);
            if (z > 0) continue;
            if (pass == 0) {
                if (lw > out.shift) out.shift = lw;
                continue;
            }
            const real w = std::exp(lw - out.shift);
            if (target >= 0 && config[static_cast<std::size_t>(target)] == Spin::Blue)
                blue.add(w);
            else
                green.add(w);
        }
        if (pass == 0 && out.shift == kNegInf)
            throw DomainError("every configuration consistent with the boundary has weight zero");
        if (pass == 1) {
            out.blue = blue.value();
            out.green = green.value();
        }
    }
    return out;
}

}  // namespace

long double log_weight(const SpinSystem& s, const Graph& g, std::span<const Spin> config) {
    check_weights(s);
    if (config.size() != static_cast<std::size_t>(g.num_vertices()))
        throw InvalidArgument("configuration size does not match the graph");
    real lw = 0.0L;
    for (const auto& [u, v] : g.edges()) {
        const EdgeTerm t = edge_term(s, config[static_cast<std::size_t>(u)], config[static_cast<std::size_t>(v)]);
        if (t.zero) return kNegInf;
        lw += t.log;
    }
    for (Vertex v = 0; v < g.num_vertices(); ++v)
        if (config[static_cast<std::size_t>(v)] == Spin::Blue) lw += std::log(static_cast<real>(g.field(v, s.lambda)));
    return lw;
}

ExactResult exact_partition(const SpinSystem& s, const Graph& g, const Boundary& boundary, int max_free) {
    const Enumeration e = enumerate(s, g, boundary, -1, max_free);
    ExactResult r;
    r.log_z = e.shift + std::log(e.blue + e.green);
    r.config_count = e.count;
    return r;
}

double exact_marginal(const SpinSystem& s, const Graph& g, Vertex v, const Boundary& boundary, int max_free) {
    if (v < 0 || v >= g.num_vertices()) throw InvalidArgument("vertex out of range");
    const Enumeration e = enumerate(s, g, boundary, v, max_free);
    return static_cast<double>(e.blue / (e.blue + e.green));
}

ExtendedRatio exact_ratio(const SpinSystem& s, const Graph& g, Vertex v, const Boundary& boundary, int max_free) {
    if (v < 0 || v >= g.num_vertices()) throw InvalidArgument("vertex out of range");
    const Enumeration e = enumerate(s, g, boundary, v, max_free);
    if (e.green == 0.0L) return ExtendedRatio::infinity();
    return ExtendedRatio::finite(static_cast<double>(e.blue / e.green));
}

ExtendedRatio exact_saw_ratio(const SpinSystem& s, const Graph& g, Vertex v, const Boundary& boundary,
                              std::int64_t node_budget) {
    check_weights(s);
    if (!(s.gamma > 0.0)) throw InvalidParameter("tree recursion needs gamma > 0");
    boundary.validate(g);
    if (v < 0 || v >= g.num_vertices()) throw InvalidArgument("vertex out of range");
    if (const auto it = boundary.fixed.find(v); it != boundary.fixed.end())
        return it->second == Spin::Blue ? ExtendedRatio::infinity() : ExtendedRatio::zero();

    struct Frame {
        std::vector<SawChild> kids;
        std::size_t next = 0;
        std::vector<ExtendedRatio> values;
    };
    SawWalk walk(g, boundary, v);
    std::vector<Frame> stack(1);
    walk.children(stack.back().kids);
    std::int64_t nodes = 1;
    ExtendedRatio result;
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next == f.kids.size()) {
            const ExtendedRatio r = recursion_f(s, g.field(walk.top(), s.lambda), f.values);
            stack.pop_back();
            if (stack.empty()) {
                result = r;
            } else {
                walk.pop();
                stack.back().values.push_back(r);
            }
            continue;
        }
        const SawChild c = f.kids[f.next++];
        if (++nodes > node_budget) throw BudgetExceeded("full SAW tree exceeds the node budget");
        if (c.kind == SawKind::Fixed) {
            f.values.push_back(c.spin == Spin::Blue ? ExtendedRatio::infinity() : ExtendedRatio::zero());
            continue;
        }
        walk.push(c.origin);
        stack.emplace_back();
        walk.children(stack.back().kids);
    }
    return result;
}

}  // namespace twospin
