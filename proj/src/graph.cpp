#include "twospin/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

#include <json.hpp>

#include "twospin/error.hpp"

namespace twospin {

using json = nlohmann::json;

std::string to_string(Spin s) { return s == Spin::Blue ? "blue" : "green"; }

Graph::Graph(int n) {
    if (n < 0) throw InvalidArgument("vertex count must be nonnegative");
    adjacency_.resize(static_cast<std::size_t>(n));
}

Graph Graph::from_edges(int n, std::span<const std::pair<Vertex, Vertex>> edges) {
    Graph g(n);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto [u, v] = edges[i];
        std::ostringstream where;
        where << "edges[" << i << "]";
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw ParseError(where.str() + ": endpoint out of range [0," + std::to_string(n) + ")");
        if (u == v) throw ParseError(where.str() + ": self-loop at vertex " + std::to_string(u));
        g.adjacency_[static_cast<std::size_t>(u)].push_back(v);
        g.adjacency_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (Vertex v = 0; v < n; ++v) {
        auto& list = g.adjacency_[static_cast<std::size_t>(v)];
        std::sort(list.begin(), list.end());
        const auto dup = std::adjacent_find(list.begin(), list.end());
        if (dup != list.end())
            throw ParseError("edges: duplicate edge {" + std::to_string(std::min(v, *dup)) + "," +
                             std::to_string(std::max(v, *dup)) + "}");
    }
    return g;
}

std::size_t Graph::num_edges() const {
    std::size_t total = 0;
    for (const auto& list : adjacency_) total += list.size();
    return total / 2;
}

int Graph::edge_rank(Vertex v, Vertex u) const {
    const auto list = neighbors(v);
    const auto it = std::lower_bound(list.begin(), list.end(), u);
    if (it == list.end() || *it != u) return -1;
    return static_cast<int>(it - list.begin());
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    out.reserve(num_edges());
    for (Vertex u = 0; u < num_vertices(); ++u)
        for (Vertex v : neighbors(u))
            if (u < v) out.emplace_back(u, v);
    return out;
}

void Graph::set_field(Vertex v, double lambda_v) {
    if (v < 0 || v >= num_vertices()) throw InvalidArgument("field vertex out of range");
    if (!(lambda_v > 0.0) || !std::isfinite(lambda_v))
        throw InvalidParameter("lambda_v must be positive at vertex " + std::to_string(v));
    fields_[v] = lambda_v;
}

std::optional<double> Graph::field_override(Vertex v) const {
    const auto it = fields_.find(v);
    if (it == fields_.end()) return std::nullopt;
    return it->second;
}

double Graph::field(Vertex v, double global_lambda) const {
    const auto it = fields_.find(v);
    return it == fields_.end() ? global_lambda : it->second;
}

void Graph::set_label(Vertex v, std::string label) {
    if (v < 0 || v >= num_vertices()) throw InvalidArgument("label vertex out of range");
    if (labels_.size() < adjacency_.size()) labels_.resize(adjacency_.size());
    labels_[static_cast<std::size_t>(v)] = std::move(label);
}

void Graph::validate() const {
    const int n = num_vertices();
    for (Vertex v = 0; v < n; ++v) {
        const auto list = neighbors(v);
        for (std::size_t i = 0; i < list.size(); ++i) {
            const Vertex u = list[i];
            if (u < 0 || u >= n) throw ParseError("adjacency of " + std::to_string(v) + ": vertex out of range");
            if (u == v) throw ParseError("adjacency of " + std::to_string(v) + ": self-loop");
            if (i > 0 && list[i - 1] >= u)
                throw ParseError("adjacency of " + std::to_string(v) + ": not strictly increasing");
            if (edge_rank(u, v) < 0)
                throw ParseError("adjacency asymmetric: " + std::to_string(v) + "->" + std::to_string(u));
        }
    }
}

int max_degree(const Graph& g) {
    int best = 0;
    for (Vertex v = 0; v < g.num_vertices(); ++v) best = std::max(best, g.degree(v));
    return best;
}

bool Boundary::in_differing(Vertex v) const {
    return std::binary_search(differing.begin(), differing.end(), v);
}

void Boundary::validate(const Graph& g) const {
    for (const auto& [v, spin] : fixed)
        if (v < 0 || v >= g.num_vertices())
            throw InvalidArgument("fixed vertex " + std::to_string(v) + " is not in the graph");
    if (!std::is_sorted(differing.begin(), differing.end()))
        throw InvalidArgument("S must be sorted");
    for (Vertex v : differing)
        if (!is_fixed(v)) throw InvalidArgument("S vertex " + std::to_string(v) + " is not fixed");
}

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

Vertex parse_vertex_key(const std::string& key, int n, const std::string& field) {
    std::size_t pos = 0;
    long v = -1;
    try {
        v = std::stol(key, &pos);
    } catch (const std::logic_error&) {
        pos = 0;
    }
    if (pos != key.size() || key.empty()) throw ParseError(field + "[\"" + key + "\"]: not a vertex id");
    if (v < 0 || v >= n) throw ParseError(field + "[\"" + key + "\"]: vertex out of range");
    return static_cast<Vertex>(v);
}

Vertex parse_vertex_value(const json& j, int n, const std::string& field) {
    if (!j.is_number_integer()) throw ParseError(field + ": vertex id must be an integer");
    const auto v = j.get<long long>();
    if (v < 0 || v >= n) throw ParseError(field + ": vertex " + std::to_string(v) + " out of range");
    return static_cast<Vertex>(v);
}

double parse_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ParseError(field + ": expected a number");
    return j.get<double>();
}

}  // namespace

GraphFile load_graph_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::ostringstream os;
        os << "line " << line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1) << ": malformed JSON (" << e.what()
           << ")";
        throw ParseError(os.str());
    }
    if (!doc.is_object()) throw ParseError("top level: expected an object");
    if (!doc.contains("n")) throw ParseError("n: missing");
    if (!doc["n"].is_number_integer() || doc["n"].get<long long>() < 0)
        throw ParseError("n: expected a nonnegative integer");
    const int n = static_cast<int>(doc["n"].get<long long>());
    if (!doc.contains("edges")) throw ParseError("edges: missing");
    const json& jedges = doc["edges"];
    if (!jedges.is_array()) throw ParseError("edges: expected an array");

    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(jedges.size());
    for (std::size_t i = 0; i < jedges.size(); ++i) {
        const std::string field = "edges[" + std::to_string(i) + "]";
        const json& e = jedges[i];
        if (!e.is_array() || e.size() != 2) throw ParseError(field + ": expected [u, v]");
        edges.emplace_back(parse_vertex_value(e[0], n, field), parse_vertex_value(e[1], n, field));
    }

    GraphFile out;
    out.graph = Graph::from_edges(n, edges);

    if (doc.contains("lambda_v")) {
        const json& jl = doc["lambda_v"];
        if (!jl.is_object()) throw ParseError("lambda_v: expected an object");
        for (const auto& [key, value] : jl.items()) {
            const Vertex v = parse_vertex_key(key, n, "lambda_v");
            const double lv = parse_number(value, "lambda_v[\"" + key + "\"]");
            if (!(lv > 0.0) || !std::isfinite(lv))
                throw ParseError("lambda_v[\"" + key + "\"]: field must be positive");
            out.graph.set_field(v, lv);
        }
    }
    if (doc.contains("labels")) {
        const json& jl = doc["labels"];
        if (!jl.is_array() || jl.size() != static_cast<std::size_t>(n))
            throw ParseError("labels: expected an array of n strings");
        for (std::size_t i = 0; i < jl.size(); ++i) {
            if (!jl[i].is_string()) throw ParseError("labels[" + std::to_string(i) + "]: expected a string");
            out.graph.set_label(static_cast<Vertex>(i), jl[i].get<std::string>());
        }
    }
    if (doc.contains("fixed") || doc.contains("S")) {
        Boundary b;
        if (doc.contains("fixed")) {
            const json& jf = doc["fixed"];
            if (!jf.is_object()) throw ParseError("fixed: expected an object");
            for (const auto& [key, value] : jf.items()) {
                const Vertex v = parse_vertex_key(key, n, "fixed");
                if (value == "blue")
                    b.fixed[v] = Spin::Blue;
                else if (value == "green")
                    b.fixed[v] = Spin::Green;
                else
                    throw ParseError("fixed[\"" + key + "\"]: expected \"blue\" or \"green\"");
            }
        }
        if (doc.contains("S")) {
            const json& js = doc["S"];
            if (!js.is_array()) throw ParseError("S: expected an array");
            for (std::size_t i = 0; i < js.size(); ++i)
                b.differing.push_back(parse_vertex_value(js[i], n, "S[" + std::to_string(i) + "]"));
            std::sort(b.differing.begin(), b.differing.end());
            b.differing.erase(std::unique(b.differing.begin(), b.differing.end()), b.differing.end());
            for (Vertex v : b.differing)
                if (!b.is_fixed(v)) throw ParseError("S: vertex " + std::to_string(v) + " is not in fixed");
        }
        out.boundary = std::move(b);
    }
    if (doc.contains("params")) {
        const json& jp = doc["params"];
        if (!jp.is_object()) throw ParseError("params: expected an object");
        SpinSystem s;
        for (const char* key : {"beta", "gamma", "lambda"})
            if (!jp.contains(key)) throw ParseError(std::string("params.") + key + ": missing");
        s.beta = parse_number(jp["beta"], "params.beta");
        s.gamma = parse_number(jp["gamma"], "params.gamma");
        s.lambda = parse_number(jp["lambda"], "params.lambda");
        if (s.beta < 0.0 || s.gamma < 0.0 || !(s.lambda > 0.0))
            throw ParseError("params: weights must be nonnegative and lambda positive");
        out.params = s;
    }
    return out;
}

GraphFile load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return load_graph_text(buffer.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string save_graph_text(const GraphFile& file) {
    const Graph& g = file.graph;
    json doc;
    doc["n"] = g.num_vertices();
    json edges = json::array();
    for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
    doc["edges"] = std::move(edges);
    if (!g.field_overrides().empty()) {
        json fields = json::object();
        for (const auto& [v, lv] : g.field_overrides()) fields[std::to_string(v)] = lv;
        doc["lambda_v"] = std::move(fields);
    }
    if (!g.labels().empty()) {
        json labels = json::array();
        for (Vertex v = 0; v < g.num_vertices(); ++v)
            labels.push_back(static_cast<std::size_t>(v) < g.labels().size() ? g.labels()[static_cast<std::size_t>(v)]
                                                                              : std::string());
        doc["labels"] = std::move(labels);
    }
    if (file.boundary) {
        json fixed = json::object();
        for (const auto& [v, spin] : file.boundary->fixed) fixed[std::to_string(v)] = to_string(spin);
        doc["fixed"] = std::move(fixed);
        if (!file.boundary->differing.empty()) doc["S"] = file.boundary->differing;
    }
    if (file.params) {
        doc["params"] = {{"beta", file.params->beta}, {"gamma", file.params->gamma}, {"lambda", file.params->lambda}};
    }
    return doc.dump(2) + "\n";
}

namespace generators {

namespace {

Graph build(int n, const std::vector<std::pair<Vertex, Vertex>>& edges) { return Graph::from_edges(n, edges); }

}  // namespace

Graph path(int n) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
    return build(n, edges);
}

Graph cycle(int n) {
    if (n < 3) throw InvalidArgument("cycle needs at least 3 vertices");
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex v = 0; v < n; ++v) edges.emplace_back(v, (v + 1) % n);
    return build(n, edges);
}

Graph complete(int n) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return build(n, edges);
}

Graph star(int leaves) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex v = 1; v <= leaves; ++v) edges.emplace_back(0, v);
    return build(leaves + 1, edges);
}

Graph double_star(int leaves) {
    std::vector<std::pair<Vertex, Vertex>> edges{{0, 1}};
    Vertex next = 2;
    for (Vertex center : {0, 1})
        for (int i = 0; i < leaves; ++i) edges.emplace_back(center, next++);
    return build(next, edges);
}

Graph random_regular(int n, int d, std::uint64_t seed) {
    if (n <= 0 || d < 0 || d >= n || (static_cast<long long>(n) * d) % 2 != 0)
        throw InvalidArgument("random_regular needs 0 <= d < n and n*d even");
    std::mt19937_64 rng(seed);
    std::vector<Vertex> points;
    for (Vertex v = 0; v < n; ++v)
        for (int k = 0; k < d; ++k) points.push_back(v);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        std::shuffle(points.begin(), points.end(), rng);
        std::vector<std::pair<Vertex, Vertex>> edges;
        bool ok = true;
        std::vector<std::vector<Vertex>> seen(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i + 1 < points.size() && ok; i += 2) {
            const Vertex u = points[i], v = points[i + 1];
            auto& su = seen[static_cast<std::size_t>(u)];
            if (u == v || std::find(su.begin(), su.end(), v) != su.end()) ok = false;
            su.push_back(v);
            seen[static_cast<std::size_t>(v)].push_back(u);
            edges.emplace_back(u, v);
        }
        if (ok) return build(n, edges);
    }
    throw BudgetExceeded("random_regular: pairing model did not produce a simple graph");
}

Graph random_tree(int n, std::uint64_t seed, int max_degree) {
    if (n < 0) throw InvalidArgument("vertex count must be nonnegative");
    if (max_degree == 1 && n > 2) throw InvalidArgument("max_degree 1 admits at most 2 vertices");
    std::mt19937_64 rng(seed);
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    std::vector<Vertex> open;  // earlier vertices that can take another neighbor
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex v = 0; v < n; ++v) {
        if (v > 0) {
            std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
            const std::size_t slot = pick(rng);
            const Vertex parent = open[slot];
            edges.emplace_back(parent, v);
            ++degree[static_cast<std::size_t>(parent)];
            ++degree[static_cast<std::size_t>(v)];
            if (max_degree > 0 && degree[static_cast<std::size_t>(parent)] >= max_degree) {
                open[slot] = open.back();
                open.pop_back();
            }
        }
        if (max_degree == 0 || degree[static_cast<std::size_t>(v)] < max_degree) open.push_back(v);
    }
    return build(n, edges);
}

Graph random_gnp(int n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (coin(rng)) edges.emplace_back(u, v);
    return build(n, edges);
}

}  // namespace generators

std::vector<int> bfs_distances(const Graph& g, Vertex source) {
    std::vector<int> dist(static_cast<std::size_t>(g.num_vertices()), -1);
    std::queue<Vertex> queue;
    dist[static_cast<std::size_t>(source)] = 0;
    queue.push(source);
    while (!queue.empty()) {
        const Vertex u = queue.front();
        queue.pop();
        for (Vertex w : g.neighbors(u)) {
            if (dist[static_cast<std::size_t>(w)] >= 0) continue;
            dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
            queue.push(w);
        }
    }
    return dist;
}

bool is_connected(const Graph& g) {
    if (g.num_vertices() == 0) return true;
    const auto dist = bfs_distances(g, 0);
    return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

}  // namespace twospin
