#include "twospin/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twospin/error.hpp"
#include "twospin/estimator.hpp"
#include "twospin/graph.hpp"
#include "twospin/oracle.hpp"
#include "twospin/saw.hpp"
#include "twospin/spin_core.hpp"
#include "twospin/uniqueness.hpp"

namespace twospin {

namespace {

using json = nlohmann::json;

struct Flags {
    std::optional<double> beta, gamma, lambda;
    std::string delta = "inf";
    std::string kind = "auto";
    std::string graph_path;
    int vertex = 0;
    std::optional<double> eps;
    std::optional<int> depth;
    std::optional<double> M;
    std::optional<int> ell;
    int threads = 1;
    std::int64_t budget = 50'000'000;
    std::string order;
    std::string mode = "auto";
    int t_max = 10;
    int d_max = 0;
    int max_free = kDefaultMaxFreeVertices;
    bool has_vertex = false;
};

std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json ratio_json(ExtendedRatio r) {
    if (r.is_infinite()) return "inf";
    return r.value();
}

// Finite doubles as numbers, non-finite ones as strings (JSON has no inf).
json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

json system_json(const SpinSystem& s) { return {{"beta", s.beta}, {"gamma", s.gamma}, {"lambda", s.lambda}}; }

SpinSystem resolve_system(const Flags& f, const std::optional<SpinSystem>& from_file) {
    SpinSystem s = from_file.value_or(SpinSystem{0.0, 1.0, 1.0});
    if (f.beta) s.beta = *f.beta;
    if (f.gamma) s.gamma = *f.gamma;
    if (f.lambda) s.lambda = *f.lambda;
    return s;
}

DegreeMode parse_mode(const std::string& m) {
    if (m == "auto") return DegreeMode::Auto;
    if (m == "bounded") return DegreeMode::Bounded;
    if (m == "unbounded") return DegreeMode::Unbounded;
    throw InvalidArgument("--mode must be auto, bounded or unbounded");
}

std::vector<Vertex> parse_order(const std::string& text) {
    std::vector<Vertex> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const int v = std::stoi(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw InvalidArgument("--order: not a vertex id: '" + item + "'");
        }
    }
    return out;
}

EvalOptions eval_options(const Flags& f) {
    if (f.threads < 1) throw InvalidArgument("--threads must be at least 1");
    if (f.budget < 1) throw InvalidArgument("--budget must be positive");
    EvalOptions o;
    o.threads = f.threads;
    o.node_budget = f.budget;
    o.degree_mode = parse_mode(f.mode);
    return o;
}

json bounds_json(const MarginalBounds& b) {
    return {{"r_lo", ratio_json(b.r_lo)},     {"r_hi", ratio_json(b.r_hi)},
            {"p_lo", b.p_lo},                 {"p_hi", b.p_hi},
            {"width", b.width()},             {"nodes_visited", b.nodes_visited},
            {"nodes_expanded", b.nodes_expanded}};
}

json policy_json(const TruncationPolicy& p) {
    switch (p.mode) {
        case TruncationPolicy::Mode::Depth: return {{"mode", "depth"}, {"depth", p.depth}};
        case TruncationPolicy::Mode::MBased: return {{"mode", "m_based"}, {"M", p.M}, {"ell", p.ell}};
        case TruncationPolicy::Mode::Auto: return {{"mode", "auto"}, {"eps", p.eps}};
    }
    return nullptr;
}

json threshold_json(const ThresholdReport& r) {
    json j = {{"kind", to_string(r.kind)}, {"delta", r.delta.to_string()}, {"witness_d", r.witness_d}};
    switch (r.kind) {
        case ThresholdKind::HardcoreLambda:
        case ThresholdKind::UniversalLambda:
            j["lambda_c"] = number(r.values.at(0));
            break;
        case ThresholdKind::SoftLambdaPair:
            j["all_lambda_unique"] = r.all_lambda_unique;
            if (!r.all_lambda_unique) {
                j["lambda_c"] = number(r.values.at(0));
                j["lambda_bar_c"] = number(r.values.at(1));
                j["witness_d_upper"] = r.witness_d_upper;
            }
            break;
        case ThresholdKind::GammaCritical:
            j["gamma_c"] = number(r.values.at(0));
            break;
        default:
            j["values"] = r.values;
    }
    return j;
}

struct Loaded {
    GraphFile file;
    std::string text;
};

Loaded load(const Flags& f) {
    std::ifstream in(f.graph_path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open graph file '" + f.graph_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    Loaded l;
    l.text = ss.str();
    l.file = load_graph_text(l.text);
    return l;
}

void require_vertex(const Flags& f, const Graph& g) {
    if (f.vertex < 0 || f.vertex >= g.num_vertices())
        throw InvalidArgument("--vertex " + std::to_string(f.vertex) + " is not in the graph");
}

json cmd_classify(const Flags& f) {
    const SpinSystem s = resolve_system(f, std::nullopt);
    const Classification c = classify(s);
    return {{"class", to_string(c.kind)},
            {"antiferromagnetic", c.kind == SpinClass::AntiFerromagnetic},
            {"swapped", c.swapped},
            {"normalized", system_json(c.normalized)}};
}

json cmd_uniqueness(const Flags& f) {
    const SpinSystem s = resolve_system(f, std::nullopt);
    const DegreeBound delta = DegreeBound::parse(f.delta);
    const UniquenessReport r = check_uniqueness(s, delta);
    json checks = json::array();
    for (const DegreeCheck& c : r.checks)
        checks.push_back({{"d", c.d}, {"derivative_abs", number(c.derivative_abs)}, {"unique", c.unique}});
    json j = {{"delta", delta.to_string()}, {"unique", r.unique}, {"checks", checks}};
    j["violating_d"] = r.violating_d ? json(*r.violating_d) : json(nullptr);
    j["tail_start"] = r.tail_start ? json(*r.tail_start) : json(nullptr);
    if (f.d_max > 0) {
        json profile = json::array();
        for (const DegreeCheck& c : uniqueness_profile(s, f.d_max))
            profile.push_back({{"d", c.d}, {"derivative_abs", number(c.derivative_abs)}, {"unique", c.unique}});
        j["profile"] = profile;
    }
    return j;
}

json cmd_thresholds(const Flags& f) {
    const SpinSystem s = resolve_system(f, std::nullopt);
    const DegreeBound delta = DegreeBound::parse(f.delta);
    std::string kind = f.kind;
    if (kind == "auto") kind = s.beta == 0.0 ? "hardcore" : (delta.is_infinite() ? "universal" : "soft");

    if (kind == "hardcore") return threshold_json(hardcore_threshold(s.gamma, delta));
    if (kind == "soft") return threshold_json(soft_thresholds(s.beta, s.gamma, delta.value()));
    if (kind == "gamma") return threshold_json(gamma_threshold(s.beta, s.lambda, delta));
    if (kind == "universal") return threshold_json(universal_lambda_threshold(s.beta, s.gamma));
    if (kind == "contraction" || kind == "M") {
        const ContractionResult c = contraction_bound(s, delta);
        json per = json::array();
        for (const DegreeContraction& d : c.per_degree)
            per.push_back({{"d", d.d},
                           {"x_max", d.x_max},
                           {"alpha_max", d.alpha_max},
                           {"sqrt_derivative", d.sqrt_derivative}});
        json j = {{"kind", "contraction"}, {"delta", delta.to_string()}, {"alpha", c.alpha},
                  {"witness_d", c.witness_d}, {"certified", c.certified}, {"per_degree", per}};
        j["tail_bound"] = c.tail_bound ? json(*c.tail_bound) : json(nullptr);
        if (kind == "M") {
            j["kind"] = "M_constant";
            j["M"] = choose_M(s, c.alpha);
        }
        return j;
    }
    throw InvalidArgument("--kind must be auto, hardcore, soft, gamma, universal, contraction or M");
}

json cmd_marginal(const Flags& f, const Loaded& l) {
    const Graph& g = l.file.graph;
    require_vertex(f, g);
    const SpinSystem s = resolve_system(f, l.file.params);
    const Boundary boundary = l.file.boundary.value_or(Boundary{});
    const EvalOptions opts = eval_options(f);
    json j = {{"system", system_json(s)}, {"vertex", f.vertex}};
    if (f.depth) {
        const TruncationPolicy p = TruncationPolicy::at_depth(*f.depth);
        j["policy"] = policy_json(p);
        j["bounds"] = bounds_json(bounds(s, g, f.vertex, boundary, p, opts));
        return j;
    }
    if (f.ell) {
        const TruncationPolicy p = TruncationPolicy::m_based(f.M.value_or(2.0), *f.ell);
        j["policy"] = policy_json(p);
        j["bounds"] = bounds_json(bounds(s, g, f.vertex, boundary, p, opts));
        return j;
    }
    const double eps = f.eps.value_or(0.01);
    const MarginalEstimate e = estimate_marginal(s, g, f.vertex, boundary, eps, opts);
    j["policy"] = policy_json(e.resolved);
    j["eps"] = eps;
    j["alpha"] = e.alpha;
    j["converged"] = e.converged;
    j["bounds"] = bounds_json(e.bounds);
    return j;
}

json cmd_partition(const Flags& f, const Loaded& l, std::ostream& err) {
    const Graph& g = l.file.graph;
    const SpinSystem s = resolve_system(f, l.file.params);
    if (l.file.boundary && !l.file.boundary->fixed.empty())
        err << "note: the boundary in the graph file is ignored by partition\n";
    PartitionOptions opts;
    opts.eval = eval_options(f);
    opts.order = parse_order(f.order);
    const double eps = f.eps.value_or(0.01);
    const PartitionEstimate p = approx_partition(s, g, eps, opts);
    json config = json::array();
    for (Spin sp : p.chosen_config) config.push_back(to_string(sp));
    return {{"system", system_json(s)}, {"eps", eps},          {"log_z", p.log_z},
            {"rel_error_bound", p.rel_error_bound},  {"order", p.order}, {"per_vertex_p", p.per_vertex_p},
            {"chosen_config", config}};
}

json cmd_exact(const Flags& f, const Loaded& l) {
    const Graph& g = l.file.graph;
    const SpinSystem s = resolve_system(f, l.file.params);
    const Boundary boundary = l.file.boundary.value_or(Boundary{});
    const ExactResult r = exact_partition(s, g, boundary, f.max_free);
    json j = {{"system", system_json(s)},
              {"log_z", static_cast<double>(r.log_z)},
              {"config_count", r.config_count}};
    if (f.has_vertex) {
        require_vertex(f, g);
        j["vertex"] = f.vertex;
        j["marginal"] = exact_marginal(s, g, f.vertex, boundary, f.max_free);
        j["ratio"] = ratio_json(exact_ratio(s, g, f.vertex, boundary, f.max_free));
    }
    return j;
}

void cmd_decay(const Flags& f, const Loaded& l, std::ostream& out) {
    const Graph& g = l.file.graph;
    require_vertex(f, g);
    if (f.t_max < 0) throw InvalidArgument("--t-max must be nonnegative");
    const SpinSystem s = resolve_system(f, l.file.params);
    const Boundary boundary = l.file.boundary.value_or(Boundary{});
    const auto curve = decay_curve(s, g, f.vertex, boundary, f.t_max, eval_options(f));
    out << "t,delta,p_lo,p_hi\n";
    char line[128];
    for (const DecayPoint& p : curve) {
        std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g\n", p.t, p.width, p.p_lo, p.p_hi);
        out << line;
    }
}

json cmd_saw(const Flags& f, const Loaded& l) {
    const Graph& g = l.file.graph;
    require_vertex(f, g);
    const Boundary boundary = l.file.boundary.value_or(Boundary{});
    const int levels = f.depth.value_or(3);
    if (levels < 0) throw InvalidArgument("--depth must be nonnegative");
    SawTree tree(g, boundary, f.vertex);
    json j = {{"vertex", f.vertex}, {"levels", levels}};
    j["tree"] = json::parse(tree.dump_json(levels));
    j["size_at_depth"] = saw_tree_size(g, f.vertex, levels, boundary);
    return j;
}

json error_json(const std::string& kind, const std::string& message) {
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-spin partition functions and marginals by correlation decay", "twospin"};
    app.require_subcommand(1, 1);
    Flags f;

    auto add_params = [&](CLI::App* c) {
        c->add_option("--beta", f.beta, "blue-blue edge weight");
        c->add_option("--gamma", f.gamma, "green-green edge weight");
        c->add_option("--lambda", f.lambda, "external field");
    };
    auto add_graph = [&](CLI::App* c) {
        c->add_option("graph", f.graph_path, "graph file (JSON)")->required();
    };
    auto add_vertex = [&](CLI::App* c) {
        c->add_option("--vertex,-v", f.vertex, "query vertex")->each([&](const std::string&) { f.has_vertex = true; });
    };
    auto add_eval = [&](CLI::App* c) {
        c->add_option("--threads", f.threads, "worker threads");
        c->add_option("--budget", f.budget, "SAW node budget");
        c->add_option("--mode", f.mode, "degree mode: auto, bounded, unbounded");
    };

    CLI::App* classify_cmd = app.add_subcommand("classify", "classify a parameter triple");
    add_params(classify_cmd);

    CLI::App* uniq = app.add_subcommand("uniqueness", "per-degree uniqueness table and verdict");
    add_params(uniq);
    uniq->add_option("--delta", f.delta, "degree bound (integer or inf)");
    uniq->add_option("--d-max", f.d_max, "also print the profile for d = 1..d-max");

    CLI::App* thr = app.add_subcommand("thresholds", "uniqueness thresholds");
    add_params(thr);
    thr->add_option("--delta", f.delta, "degree bound (integer or inf)");
    thr->add_option("--kind", f.kind, "auto, hardcore, soft, gamma, universal, contraction, M");

    CLI::App* marg = app.add_subcommand("marginal", "certified marginal bounds");
    add_params(marg);
    add_graph(marg);
    add_vertex(marg);
    add_eval(marg);
    marg->add_option("--eps", f.eps, "target width (default 0.01)");
    marg->add_option("--depth", f.depth, "fixed truncation depth");
    marg->add_option("--M", f.M, "M-based depth base");
    marg->add_option("--ell", f.ell, "M-based truncation level");

    CLI::App* part = app.add_subcommand("partition", "approximate log partition function");
    add_params(part);
    add_graph(part);
    add_eval(part);
    part->add_option("--eps", f.eps, "relative error target (default 0.01)");
    part->add_option("--order", f.order, "elimination order, comma separated");

    CLI::App* exact = app.add_subcommand("exact", "brute-force partition function and marginal");
    add_params(exact);
    add_graph(exact);
    add_vertex(exact);
    exact->add_option("--max-free", f.max_free, "cap on free vertices");

    CLI::App* decay = app.add_subcommand("decay", "interval width against truncation depth (CSV)");
    add_params(decay);
    add_graph(decay);
    add_vertex(decay);
    add_eval(decay);
    decay->add_option("--t-max", f.t_max, "largest depth");

    CLI::App* saw = app.add_subcommand("saw", "dump the first levels of the SAW tree");
    add_graph(saw);
    add_vertex(saw);
    saw->add_option("--depth", f.depth, "levels to dump (default 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? kExitOk : kExitUsage;
    }

    const CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    std::string echo;
    for (int i = 1; i < argc; ++i) echo += (i > 1 ? " " : "") + std::string(argv[i]);

    const auto start = std::chrono::steady_clock::now();
    try {
        std::optional<Loaded> loaded;
        if (!f.graph_path.empty()) loaded = load(f);
        const std::uint64_t digest = fnv1a(loaded ? loaded->text : std::string{}, fnv1a(echo));

        if (name == "decay") {
            cmd_decay(f, *loaded, out);
            return kExitOk;
        }
        json outputs;
        if (name == "classify") outputs = cmd_classify(f);
        else if (name == "uniqueness") outputs = cmd_uniqueness(f);
        else if (name == "thresholds") outputs = cmd_thresholds(f);
        else if (name == "marginal") outputs = cmd_marginal(f, *loaded);
        else if (name == "partition") outputs = cmd_partition(f, *loaded, err);
        else if (name == "exact") outputs = cmd_exact(f, *loaded);
        else if (name == "saw") outputs = cmd_saw(f, *loaded);

        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json result = {{"command", echo}, {"inputs_digest", hex(digest)}, {"outputs", outputs}, {"wall_time_s", wall}};
        out << result.dump(2) << "\n";
        return kExitOk;
    } catch (const PreconditionError& e) {
        json j = error_json("precondition", e.what());
        if (e.degree() > 0) j["error"]["degree"] = e.degree();
        out << j.dump(2) << "\n";
        err << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const NoThreshold& e) {
        out << error_json("no_threshold", e.what()).dump(2) << "\n";
        err << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const InvalidParameter& e) {
        out << error_json("invalid_parameter", e.what()).dump(2) << "\n";
        err << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const DomainError& e) {
        out << error_json("domain", e.what()).dump(2) << "\n";
        err << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const BudgetExceeded& e) {
        out << error_json("budget_exceeded", e.what()).dump(2) << "\n";
        err << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace twospin
