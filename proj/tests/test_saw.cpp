#include <doctest.h>

#include <json.hpp>

#include "support.hpp"
#include "twospin/saw.hpp"

using namespace twospin;
using namespace testsupport;

TEST_CASE("tree without boundary has only free nodes") {
    const Graph g = generators::path(4);
    SawTree t(g, {}, 0);
    auto kids = t.expand(SawTree::kRoot);
    REQUIRE(kids.size() == 1);
    CHECK(t.node(kids[0]).origin == 1);
    CHECK(t.node(kids[0]).kind == SawKind::Free);
    CHECK(saw_tree_size(g, 0, 10) == 4);
    CHECK(saw_tree_size(g, 1, 10) == 4);
}

TEST_CASE("triangle closes cycles with opposite spins") {
    const Graph g = generators::complete(3);
    SawTree t(g, {}, 0);
    const std::vector<SawNodeId> kids(t.expand(SawTree::kRoot).begin(), t.expand(SawTree::kRoot).end());
    REQUIRE(kids.size() == 2);
    // walk 0->1->2 then sees 0; walk 0->2->1 then sees 0
    auto leaf_under = [&](SawNodeId child) {
        const auto grand = t.expand(child);
        REQUIRE(grand.size() == 1);
        const auto great = t.expand(grand[0]);
        REQUIRE(great.size() == 1);
        return t.node(great[0]);
    };
    const SawNode a = leaf_under(kids[0]);
    const SawNode b = leaf_under(kids[1]);
    CHECK(a.closes_cycle);
    CHECK(b.closes_cycle);
    CHECK(a.kind == SawKind::Fixed);
    CHECK(a.origin == 0);
    CHECK(a.spin != b.spin);
    // departed by edge (0,1), rank 0; closes by (0,2), rank 1
    CHECK(a.spin == kClosingHigherSpin);
}

TEST_CASE("cycle of length four has nine nodes to depth four") {
    const Graph g = generators::cycle(4);
    CHECK(saw_tree_size(g, 0, 4) == 9);
    CHECK(saw_tree_size(g, 0, 0) == 1);
    CHECK(saw_tree_size(g, 0, 1) == 3);
}

TEST_CASE("boundary vertices become fixed leaves and fixed roots") {
    const Graph g = generators::path(3);
    Boundary b;
    b.fixed[2] = Spin::Blue;
    SawTree t(g, b, 0);
    const auto k1 = t.expand(SawTree::kRoot);
    const SawNodeId mid = k1[0];
    const auto k2 = t.expand(mid);
    REQUIRE(k2.size() == 1);
    CHECK(t.node(k2[0]).kind == SawKind::Fixed);
    CHECK(t.node(k2[0]).spin == Spin::Blue);
    CHECK_FALSE(t.node(k2[0]).closes_cycle);
    CHECK_THROWS_AS(t.expand(k2[0]), ContractViolation);

    SawTree fixed_root(g, b, 2);
    CHECK(fixed_root.node(SawTree::kRoot).kind == SawKind::Fixed);
}

TEST_CASE("expand is idempotent and walk_to reconstructs the walk") {
    const Graph g = generators::complete(4);
    SawTree t(g, {}, 0);
    const auto a = t.expand(SawTree::kRoot);
    const std::size_t size = t.size();
    const std::vector<SawNodeId> first(a.begin(), a.end());
    const auto b = t.expand(SawTree::kRoot);
    CHECK(t.size() == size);
    CHECK(std::vector<SawNodeId>(b.begin(), b.end()) == first);
    const auto c = t.expand(first[1]);
    CHECK(t.walk_to(c[0]) == std::vector<Vertex>{0, 2, 1});
}

TEST_CASE("walk rejects revisits and root pops") {
    const Graph g = generators::cycle(5);
    const Boundary none;
    SawWalk w(g, none, 0);
    w.push(1);
    CHECK_THROWS_AS(w.push(0), ContractViolation);
    w.pop();
    CHECK_THROWS_AS(w.pop(), ContractViolation);
}

TEST_CASE("dump_json lists the first levels") {
    const Graph g = generators::star(3);
    SawTree t(g, {}, 0);
    const auto j = nlohmann::json::parse(t.dump_json(1));
    CHECK(j["origin"] == 0);
    REQUIRE(j["children"].size() == 3);
    CHECK_FALSE(j["children"][0].contains("children"));
}

// Property: on every small graph the full SAW tree reproduces the graph ratio.
TEST_CASE("full SAW tree ratio equals the brute-force ratio") {
    const auto corpus = small_graph_corpus(6, 15, 3);
    Rng rng(11);
    int compared = 0;
    for (const Graph& g : corpus) {
        for (int trial = 0; trial < 4; ++trial) {
            const SpinSystem s = random_af_system(rng);
            const Vertex root = uniform_int(rng, 0, g.num_vertices() - 1);
            const Boundary b = random_boundary(rng, s, g, root, false);
            const ExtendedRatio want = exact_ratio(s, g, root, b);
            const ExtendedRatio got = exact_saw_ratio(s, g, root, b);
            INFO("n=", g.num_vertices(), " m=", g.num_edges(), " root=", root);
            CHECK(ratio_close(got, want, 1e-8));
            ++compared;
        }
    }
    CHECK(compared > 100);
}

TEST_CASE("size counting stops at the cap") {
    const Graph g = generators::complete(7);
    CHECK(saw_tree_size(g, 0, 7, {}, 100) == 101);
}
