#include "twospin/saw.hpp"

#include <functional>

#include <json.hpp>

#include "twospin/error.hpp"

namespace twospin {

SawWalk::SawWalk(const Graph& g, const Boundary& boundary, Vertex root)
    : graph_(&g), boundary_(&boundary), position_(static_cast<std::size_t>(g.num_vertices()), -1) {
    if (root < 0 || root >= g.num_vertices()) throw InvalidArgument("root vertex out of range");
    walk_.reserve(static_cast<std::size_t>(g.num_vertices()));
    walk_.push_back(root);
    position_[static_cast<std::size_t>(root)] = 0;
}

void SawWalk::children(std::vector<SawChild>& out) const {
    out.clear();
    const Vertex u = top();
    const Vertex parent = walk_.size() >= 2 ? walk_[walk_.size() - 2] : -1;
    for (Vertex w : graph_->neighbors(u)) {
        if (w == parent) continue;
        SawChild child;
        child.origin = w;
        const int pos = position_[static_cast<std::size_t>(w)];
        if (pos >= 0) {
            const Vertex departed_to = walk_[static_cast<std::size_t>(pos) + 1];
            const int closing = graph_->edge_rank(w, u);
            const int departing = graph_->edge_rank(w, departed_to);
            child.kind = SawKind::Fixed;
            child.closes_cycle = true;
            child.spin = closing > departing ? kClosingHigherSpin : flip(kClosingHigherSpin);
        } else if (const auto it = boundary_->fixed.find(w); it != boundary_->fixed.end()) {
            child.kind = SawKind::Fixed;
            child.spin = it->second;
        }
        out.push_back(child);
    }
}

void SawWalk::push(Vertex w) {
    if (on_walk(w)) throw ContractViolation("walk would revisit vertex " + std::to_string(w));
    position_[static_cast<std::size_t>(w)] = static_cast<int>(walk_.size());
    walk_.push_back(w);
}

void SawWalk::pop() {
    if (walk_.size() <= 1) throw ContractViolation("cannot pop the root of a walk");
    position_[static_cast<std::size_t>(walk_.back())] = -1;
    walk_.pop_back();
}

SawTree::SawTree(const Graph& g, Boundary boundary, Vertex root) : graph_(&g), boundary_(std::move(boundary)) {
    if (root < 0 || root >= g.num_vertices()) throw InvalidArgument("root vertex out of range");
    SawNode r;
    r.origin = root;
    if (const auto it = boundary_.fixed.find(root); it != boundary_.fixed.end()) {
        r.kind = SawKind::Fixed;
        r.spin = it->second;
    }
    nodes_.push_back(r);
    children_.emplace_back();
    expanded_.push_back(0);
}

bool SawTree::is_expanded(SawNodeId id) const { return expanded_.at(static_cast<std::size_t>(id)) != 0; }

std::vector<Vertex> SawTree::walk_to(SawNodeId id) const {
    std::vector<Vertex> out;
    for (SawNodeId cur = id; cur >= 0; cur = node(cur).parent) out.push_back(node(cur).origin);
    return {out.rbegin(), out.rend()};
}

std::span<const SawNodeId> SawTree::expand(SawNodeId id) {
    const SawNode parent = node(id);
    if (parent.kind != SawKind::Free) throw ContractViolation("fixed SAW nodes have no children");
    const auto idx = static_cast<std::size_t>(id);
    if (expanded_[idx]) return children_[idx];

    const std::vector<Vertex> walk = walk_to(id);
    SawWalk state(*graph_, boundary_, walk.front());
    for (std::size_t i = 1; i < walk.size(); ++i) state.push(walk[i]);
    std::vector<SawChild> kids;
    state.children(kids);

    std::vector<SawNodeId> ids;
    ids.reserve(kids.size());
    for (const SawChild& c : kids) {
        SawNode n;
        n.origin = c.origin;
        n.parent = id;
        n.kind = c.kind;
        n.spin = c.spin;
        n.closes_cycle = c.closes_cycle;
        n.depth = parent.depth + 1;
        ids.push_back(static_cast<SawNodeId>(nodes_.size()));
        nodes_.push_back(n);
        children_.emplace_back();
        expanded_.push_back(0);
    }
    children_[idx] = std::move(ids);
    expanded_[idx] = 1;
    return children_[idx];
}

std::string SawTree::dump_json(int levels) {
    using json = nlohmann::json;
    std::function<json(SawNodeId)> emit = [&](SawNodeId id) {
        const SawNode n = node(id);
        json j;
        j["origin"] = n.origin;
        j["depth"] = n.depth;
        j["kind"] = n.kind == SawKind::Free ? "free" : "fixed";
        if (n.kind == SawKind::Fixed) {
            j["spin"] = to_string(n.spin);
            j["closes_cycle"] = n.closes_cycle;
        }
        if (n.kind == SawKind::Free && n.depth < levels) {
            json kids = json::array();
            const auto children = expand(id);
            const std::vector<SawNodeId> copy(children.begin(), children.end());
            for (SawNodeId c : copy) kids.push_back(emit(c));
            j["children"] = std::move(kids);
        }
        return j;
    };
    return emit(kRoot).dump();
}

std::int64_t saw_tree_size(const Graph& g, Vertex v, int t, const Boundary& boundary, std::int64_t cap) {
    if (t < 0) return 0;
    std::int64_t count = 1;
    if (boundary.is_fixed(v) || t == 0) return count;

    struct Frame {
        std::vector<SawChild> kids;
        std::size_t next = 0;
    };
    SawWalk walk(g, boundary, v);
    std::vector<Frame> stack(1);
    walk.children(stack.back().kids);
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next == f.kids.size()) {
            stack.pop_back();
            if (!stack.empty()) walk.pop();
            continue;
        }
        const SawChild c = f.kids[f.next++];
        if (++count > cap) return count;
        if (c.kind == SawKind::Free && walk.depth() + 1 < t) {
            walk.push(c.origin);
            stack.emplace_back();
            walk.children(stack.back().kids);
        }
    }
    return count;
}

}  // namespace twospin
