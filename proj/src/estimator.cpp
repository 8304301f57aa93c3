#include "twospin/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "twospin/error.hpp"
#include "twospin/saw.hpp"

namespace twospin {

TruncationPolicy TruncationPolicy::at_depth(int t) {
    if (t < 0) throw InvalidArgument("truncation depth must be nonnegative");
    TruncationPolicy p;
    p.mode = Mode::Depth;
    p.depth = t;
    return p;
}

TruncationPolicy TruncationPolicy::m_based(double M, int ell) {
    if (!(M > 1.0)) throw InvalidArgument("M must exceed 1");
    if (ell < 0) throw InvalidArgument("ell must be nonnegative");
    TruncationPolicy p;
    p.mode = Mode::MBased;
    p.M = M;
    p.ell = ell;
    return p;
}

TruncationPolicy TruncationPolicy::automatic(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0,1)");
    TruncationPolicy p;
    p.mode = Mode::Auto;
    p.eps = eps;
    return p;
}

double MarginalBounds::ratio_width() const {
    if (r_hi.is_infinite()) return std::numeric_limits<double>::infinity();
    return r_hi.value() - r_lo.value();
}

DegreeBound analysis_degree(const Graph& g) { return DegreeBound::finite(std::max(max_degree(g), 2)); }

namespace {

struct Interval {
    ExtendedRatio lo;
    ExtendedRatio hi;
};

const Interval kUnknown{ExtendedRatio::zero(), ExtendedRatio::infinity()};

Interval point(Spin spin) {
    const ExtendedRatio r = spin == Spin::Blue ? ExtendedRatio::infinity() : ExtendedRatio::zero();
    return {r, r};
}

ExtendedRatio invert(ExtendedRatio r) {
    if (r.is_infinite()) return ExtendedRatio::zero();
    if (r.value() == 0.0) return ExtendedRatio::infinity();
    return ExtendedRatio::finite(1.0 / r.value());
}

// The instance after exchanging spins when beta > gamma on input.
struct Normalized {
    SpinSystem system;
    bool swapped = false;
    std::vector<double> fields;
    Boundary boundary;
};

Normalized normalize(const SpinSystem& s, const Graph& g, const Boundary& boundary) {
    const Classification c = classify(s);
    if (c.kind != SpinClass::AntiFerromagnetic) {
        std::ostringstream os;
        os << "system (beta=" << s.beta << ", gamma=" << s.gamma << ") is " << to_string(c.kind)
           << "; only anti-ferromagnetic systems are supported";
        throw InvalidParameter(os.str());
    }
    boundary.validate(g);
    Normalized out;
    out.system = c.normalized;
    out.swapped = c.swapped;
    out.boundary = boundary;
    out.fields.resize(static_cast<std::size_t>(g.num_vertices()));
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        const double lv = g.field(v, s.lambda);
        out.fields[static_cast<std::size_t>(v)] = c.swapped ? 1.0 / lv : lv;
    }
    if (c.swapped)
        for (auto& [v, spin] : out.boundary.fixed) spin = flip(spin);
    return out;
}

MarginalBounds to_bounds(Interval r, bool swapped) {
    MarginalBounds b;
    if (swapped) r = {invert(r.hi), invert(r.lo)};
    b.r_lo = r.lo;
    b.r_hi = r.hi;
    b.p_lo = r.lo.probability();
    b.p_hi = r.hi.probability();
    return b;
}

class Evaluator {
public:
    Evaluator(const Normalized& inst, const Graph& g, const TruncationPolicy& policy, std::int64_t budget)
        : inst_(inst), graph_(g), policy_(policy), budget_(budget) {
        if (policy.mode == TruncationPolicy::Mode::Auto)
            throw InvalidArgument("Auto policy must be resolved before evaluation");
    }

    Interval run(Vertex root, int threads) {
        visit();
        if (const auto it = inst_.boundary.fixed.find(root); it != inst_.boundary.fixed.end())
            return inst_.boundary.in_differing(root) ? kUnknown : point(it->second);
        const bool root_in_range =
            policy_.mode == TruncationPolicy::Mode::Depth ? policy_.depth > 0 : policy_.ell > 0;
        if (!root_in_range) return kUnknown;
        if (threads <= 1) {
            SawWalk walk(graph_, inst_.boundary, root);
            return subtree(walk, 0, 0);
        }
        return parallel_root(root, threads);
    }

    std::int64_t visited() const { return visited_.load(); }
    std::int64_t expanded() const { return expanded_.load(); }

private:
    struct Frame {
        std::vector<SawChild> kids;
        std::size_t next = 0;
        std::vector<ExtendedRatio> los;
        std::vector<ExtendedRatio> his;
        int m_self = 0;
        int m_parent = 0;
    };

    void visit() {
        if (visited_.fetch_add(1) + 1 > budget_)
            throw BudgetExceeded("SAW traversal exceeded the node budget of " + std::to_string(budget_));
    }

    Interval leaf(const SawChild& c) const {
        if (!c.closes_cycle && inst_.boundary.in_differing(c.origin)) return kUnknown;
        return point(c.spin);
    }

    // Whether a free child of the node at `parent_depth` is evaluated by recursion.
    bool child_in_range(int parent_depth, const Frame& f) const {
        if (policy_.mode == TruncationPolicy::Mode::Depth) return parent_depth + 1 < policy_.depth;
        // A node belongs to B(ell) iff its grandparent has M-based depth < ell.
        return f.m_parent < policy_.ell;
    }

    int child_m_depth(const Frame& f) const {
        if (policy_.mode != TruncationPolicy::Mode::MBased) return 0;
        return f.m_self + m_depth_increment(policy_.M, static_cast<int>(f.kids.size()));
    }

    Interval combine(Vertex origin, const Frame& f) const {
        const double lv = inst_.fields[static_cast<std::size_t>(origin)];
        return {recursion_f(inst_.system, lv, f.his), recursion_f(inst_.system, lv, f.los)};
    }

    // Evaluates the subtree rooted at walk.top(), which must be free and in range.
    Interval subtree(SawWalk& walk, int m_self, int m_parent) {
        ++expanded_;
        std::vector<Frame> stack(1);
        stack.back().m_self = m_self;
        stack.back().m_parent = m_parent;
        walk.children(stack.back().kids);
        while (true) {
            Frame& f = stack.back();
            if (f.next == f.kids.size()) {
                const Interval r = combine(walk.top(), f);
                stack.pop_back();
                if (stack.empty()) return r;
                walk.pop();
                stack.back().los.push_back(r.lo);
                stack.back().his.push_back(r.hi);
                continue;
            }
            const SawChild c = f.kids[f.next++];
            visit();
            Interval value;
            if (c.kind == SawKind::Fixed) {
                value = leaf(c);
            } else if (!child_in_range(walk.depth(), f)) {
                value = kUnknown;
            } else {
                const int m_child = child_m_depth(f);
                const int m_here = f.m_self;
                walk.push(c.origin);
                ++expanded_;
                Frame next;
                next.m_self = m_child;
                next.m_parent = m_here;
                walk.children(next.kids);
                stack.push_back(std::move(next));
                continue;
            }
            f.los.push_back(value.lo);
            f.his.push_back(value.hi);
        }
    }

    // Root children evaluated on separate threads, combined in canonical order
    // so the result does not depend on the thread count.
    Interval parallel_root(Vertex root, int threads) {
        ++expanded_;
        SawWalk walk(graph_, inst_.boundary, root);
        Frame f;
        walk.children(f.kids);
        const std::size_t k = f.kids.size();
        std::vector<Interval> values(k, kUnknown);
        std::vector<std::size_t> jobs;
        for (std::size_t i = 0; i < k; ++i) {
            visit();
            const SawChild& c = f.kids[i];
            if (c.kind == SawKind::Fixed)
                values[i] = leaf(c);
            else if (child_in_range(0, f))
                jobs.push_back(i);
        }
        const int m_child = child_m_depth(f);
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            while (true) {
                const std::size_t j = next.fetch_add(1);
                if (j >= jobs.size()) return;
                try {
                    SawWalk local(graph_, inst_.boundary, root);
                    local.push(f.kids[jobs[j]].origin);
                    values[jobs[j]] = subtree(local, m_child, 0);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(jobs.size());
                }
            }
        };
        const int n_threads = std::min<int>(threads, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
        for (const Interval& v : values) {
            f.los.push_back(v.lo);
            f.his.push_back(v.hi);
        }
        return combine(root, f);
    }

    const Normalized& inst_;
    const Graph& graph_;
    TruncationPolicy policy_;
    std::int64_t budget_;
    std::atomic<std::int64_t> visited_{0};
    std::atomic<std::int64_t> expanded_{0};
};

MarginalBounds evaluate(const Normalized& inst, const Graph& g, Vertex v, const TruncationPolicy& policy,
                        const EvalOptions& options) {
    if (v < 0 || v >= g.num_vertices()) throw InvalidArgument("vertex out of range");
    Evaluator ev(inst, g, policy, options.node_budget);
    const Interval r = ev.run(v, options.threads);
    MarginalBounds b = to_bounds(r, inst.swapped);
    b.nodes_visited = ev.visited();
    b.nodes_expanded = ev.expanded();
    return b;
}

struct Plan {
    TruncationPolicy::Mode mode = TruncationPolicy::Mode::Depth;
    double alpha = 0.0;
    double M = 2.0;
};

Plan make_plan(const Normalized& inst, const Graph& g, DegreeMode mode) {
    const std::set<double> distinct(inst.fields.begin(), inst.fields.end());
    const DegreeBound delta = analysis_degree(g);
    auto system_for = [&](double lv) { return SpinSystem{inst.system.beta, inst.system.gamma, lv}; };

    auto all_unique = [&](DegreeBound bound, std::optional<int>* violating) {
        for (double lv : distinct) {
            const UniquenessReport r = check_uniqueness(system_for(lv), bound);
            if (!r.unique) {
                if (violating) *violating = r.violating_d;
                return false;
            }
        }
        return true;
    };

    Plan plan;
    std::optional<int> violating;
    if (mode == DegreeMode::Bounded || mode == DegreeMode::Auto) {
        if (all_unique(delta, &violating)) {
            plan.mode = TruncationPolicy::Mode::Depth;
        } else if (mode == DegreeMode::Auto && inst.system.gamma > 1.0 &&
                   all_unique(DegreeBound::unbounded(), nullptr)) {
            plan.mode = TruncationPolicy::Mode::MBased;
        } else {
            std::ostringstream os;
            os << "uniqueness up to " << delta.to_string() << " fails";
            if (violating) os << " at d=" << *violating;
            throw PreconditionError(os.str(), violating.value_or(0));
        }
    } else {
        if (!all_unique(DegreeBound::unbounded(), &violating)) {
            std::ostringstream os;
            os << "universal uniqueness fails";
            if (violating) os << " at d=" << *violating;
            else os << " (gamma <= 1)";
            throw PreconditionError(os.str(), violating.value_or(0));
        }
        plan.mode = TruncationPolicy::Mode::MBased;
    }

    const DegreeBound bound = plan.mode == TruncationPolicy::Mode::Depth ? delta : DegreeBound::unbounded();
    for (double lv : distinct) plan.alpha = std::max(plan.alpha, contraction_bound(system_for(lv), bound).alpha);
    if (plan.mode == TruncationPolicy::Mode::MBased)
        plan.M = choose_M(system_for(*distinct.rbegin()), plan.alpha);
    return plan;
}

int seed_depth(double alpha, double eps) {
    if (!(alpha > 0.0)) return 1;
    const double t = std::ceil(std::log(4.0 / eps) / std::log(1.0 / alpha));
    return static_cast<int>(std::clamp(t, 1.0, 10000.0));
}

MarginalEstimate estimate_with_plan(const Normalized& inst, const Graph& g, Vertex v, double eps, const Plan& plan,
                                    const EvalOptions& options) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0,1)");
    MarginalEstimate out;
    out.alpha = plan.alpha;
    int level = seed_depth(plan.alpha, eps);
    std::int64_t previous_nodes = -1;
    while (true) {
        const TruncationPolicy policy = plan.mode == TruncationPolicy::Mode::Depth
                                            ? TruncationPolicy::at_depth(level)
                                            : TruncationPolicy::m_based(plan.M, level);
        out.bounds = evaluate(inst, g, v, policy, options);
        out.resolved = policy;
        if (out.bounds.width() <= eps) return out;
        // Deeper truncation reaches no new node: the tree is exhausted.
        if (out.bounds.nodes_visited == previous_nodes) {
            out.converged = false;
            return out;
        }
        previous_nodes = out.bounds.nodes_visited;
        level += 2;
    }
}

}  // namespace

MarginalBounds bounds(const SpinSystem& s, const Graph& g, Vertex v, const Boundary& boundary,
                      const TruncationPolicy& policy, const EvalOptions& options) {
    const Normalized inst = normalize(s, g, boundary);
    return evaluate(inst, g, v, policy, options);
}

MarginalEstimate estimate_marginal(const SpinSystem& s, const Graph& g, Vertex v, const Boundary& boundary,
                                   double eps, const EvalOptions& options) {
    const Normalized inst = normalize(s, g, boundary);
    if (v < 0 || v >= g.num_vertices()) throw InvalidArgument("vertex out of range");
    const Plan plan = make_plan(inst, g, options.degree_mode);
    return estimate_with_plan(inst, g, v, eps, plan, options);
}

PartitionEstimate approx_partition(const SpinSystem& s, const Graph& g, double eps, const PartitionOptions& options) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0,1)");
    const int n = g.num_vertices();
    Normalized inst = normalize(s, g, Boundary{});

    PartitionEstimate out;
    out.order = options.order;
    if (out.order.empty()) {
        out.order.resize(static_cast<std::size_t>(n));
        std::iota(out.order.begin(), out.order.end(), 0);
    }
    {
        std::vector<Vertex> sorted = out.order;
        std::sort(sorted.begin(), sorted.end());
        std::vector<Vertex> expected(static_cast<std::size_t>(n));
        std::iota(expected.begin(), expected.end(), 0);
        if (sorted != expected) throw InvalidArgument("order must be a permutation of the vertices");
    }
    if (n == 0) return out;

    const Plan plan = make_plan(inst, g, options.eval.degree_mode);
    const double eps_vertex = eps / (4.0 * n);

    // In the normalized (possibly exchanged) spins.
    std::vector<Spin> config(static_cast<std::size_t>(n), Spin::Green);
    double sum_log_p = 0.0;
    for (Vertex v : out.order) {
        const MarginalEstimate m = estimate_with_plan(inst, g, v, eps_vertex, plan, options.eval);
        // Bounds come back in the caller's spins; undo that for the chosen spin.
        double p_blue = 0.5 * (m.bounds.p_lo + m.bounds.p_hi);
        if (inst.swapped) p_blue = 1.0 - p_blue;
        const Spin chosen = p_blue >= 0.5 ? Spin::Blue : Spin::Green;
        const double p = chosen == Spin::Blue ? p_blue : 1.0 - p_blue;
        config[static_cast<std::size_t>(v)] = chosen;
        inst.boundary.fixed[v] = chosen;
        out.per_vertex_p.push_back(p);
        sum_log_p += std::log(p);
    }

    const SpinSystem& ns = inst.system;
    double log_w = 0.0;
    for (const auto& [u, v] : g.edges()) {
        const Spin a = config[static_cast<std::size_t>(u)], b = config[static_cast<std::size_t>(v)];
        if (a == Spin::Blue && b == Spin::Blue) log_w += std::log(ns.beta);
        if (a == Spin::Green && b == Spin::Green) log_w += std::log(ns.gamma);
    }
    for (Vertex v = 0; v < n; ++v)
        if (config[static_cast<std::size_t>(v)] == Spin::Blue) log_w += std::log(inst.fields[static_cast<std::size_t>(v)]);

    out.log_z = log_w - sum_log_p;
    if (inst.swapped) {
        for (Vertex v = 0; v < n; ++v) out.log_z += std::log(g.field(v, s.lambda));
        for (Spin& spin : config) spin = flip(spin);
    }
    out.chosen_config = std::move(config);
    // Each p_i >= 1/3 is known to within eps/(4n), a relative error of 3 eps/(4n).
    out.rel_error_bound = n * eps_vertex * 3.0;
    return out;
}

std::vector<DecayPoint> decay_curve(const SpinSystem& s, const Graph& g, Vertex v, const Boundary& boundary,
                                    int t_max, const EvalOptions& options) {
    const Normalized inst = normalize(s, g, boundary);
    std::vector<DecayPoint> out;
    for (int t = 0; t <= t_max; ++t) {
        const MarginalBounds b = evaluate(inst, g, v, TruncationPolicy::at_depth(t), options);
        out.push_back({t, b.ratio_width(), b.width(), b.p_lo, b.p_hi});
    }
    return out;
}

}  // namespace twospin
