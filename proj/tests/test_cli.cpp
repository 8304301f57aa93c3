#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "twospin/cli.hpp"

using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "twospin");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = twospin::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string write_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("twospin_cli_" + name);
    std::ofstream(path) << text;
    return path.string();
}

json outputs(const Run& r) { return json::parse(r.out).at("outputs"); }

}  // namespace

TEST_CASE("thresholds example") {
    const Run r = run({"thresholds", "--beta", "0", "--gamma", "1", "--delta", "3"});
    REQUIRE(r.code == 0);
    const json o = outputs(r);
    CHECK(o["lambda_c"].get<double>() == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(o["witness_d"] == 2);
    const json doc = json::parse(r.out);
    CHECK(doc.contains("command"));
    CHECK(doc["inputs_digest"].get<std::string>().size() == 16);
    CHECK(doc.contains("wall_time_s"));
}

TEST_CASE("threshold kinds") {
    CHECK(outputs(run({"thresholds", "--beta", "0.2", "--gamma", "0.5", "--delta", "6"}))["kind"] == "soft_lambda_pair");
    CHECK(outputs(run({"thresholds", "--beta", "0.1", "--gamma", "2", "--delta", "inf"}))["kind"] == "universal_lambda");
    CHECK(outputs(run({"thresholds", "--beta", "0", "--lambda", "1", "--kind", "gamma"}))["gamma_c"].get<double>() > 1);
    const json m = outputs(run({"thresholds", "--beta", "0.2", "--gamma", "4", "--lambda", "1", "--kind", "M"}));
    CHECK(m["M"].get<double>() > 1);
    CHECK(run({"thresholds", "--gamma", "1", "--delta", "inf"}).code == 2);
    CHECK(run({"thresholds", "--kind", "bogus"}).code == 1);
}

TEST_CASE("classify and uniqueness") {
    const json c = outputs(run({"classify", "--beta", "2", "--gamma", "0.25", "--lambda", "4"}));
    CHECK(c["class"] == "anti-ferromagnetic");
    CHECK(c["swapped"] == true);
    CHECK(outputs(run({"classify", "--beta", "2", "--gamma", "3"}))["class"] == "ferromagnetic");
    CHECK(run({"classify", "--beta", "-1"}).code == 2);

    const json u = outputs(run({"uniqueness", "--lambda", "3.9", "--delta", "3"}));
    CHECK(u["unique"] == true);
    CHECK(u["checks"].size() == 2);
    const json v = outputs(run({"uniqueness", "--lambda", "1", "--delta", "8", "--d-max", "10"}));
    CHECK(v["unique"] == false);
    CHECK(v["violating_d"] == 5);
    CHECK(v["profile"].size() == 10);
}

TEST_CASE("exact and partition on small graphs") {
    const std::string k2 = write_file("k2.json", R"({"n":2,"edges":[[0,1]]})");
    const json e = outputs(run({"exact", k2, "--vertex", "0"}));
    CHECK(e["log_z"].get<double>() == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK(e["marginal"].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK_FALSE(outputs(run({"exact", k2}))["marginal"].is_number());

    const std::string c4 = write_file("c4.json", R"({"n":4,"edges":[[0,1],[1,2],[2,3],[3,0]]})");
    const json p = outputs(run({"partition", c4, "--eps", "0.01"}));
    CHECK(std::abs(p["log_z"].get<double>() - std::log(7.0)) <= std::log(1.01));
    const json ex = outputs(run({"exact", c4}));
    CHECK(std::abs(std::exp(p["log_z"].get<double>() - ex["log_z"].get<double>()) - 1) <= p["rel_error_bound"].get<double>());
    const json ordered = outputs(run({"partition", c4, "--order", "3,2,1,0"}));
    CHECK(ordered["order"] == json::array({3, 2, 1, 0}));
    CHECK(run({"partition", c4, "--order", "3,x"}).code == 1);
}

TEST_CASE("marginal command and file parameters") {
    const std::string g = write_file(
        "cube.json",
        R"({"n":8,"edges":[[0,1],[1,2],[2,3],[3,0],[4,5],[5,6],[6,7],[7,4],[0,4],[1,5],[2,6],[3,7]],)"
        R"("params":{"beta":0.1,"gamma":1.5,"lambda":0.8},"fixed":{"6":"blue"}})");
    const json m = outputs(run({"marginal", g, "--vertex", "0", "--eps", "0.01"}));
    CHECK(m["bounds"]["width"].get<double>() <= 0.01);
    CHECK(m["system"]["beta"] == 0.1);
    const json ex = outputs(run({"exact", g, "--vertex", "0"}));
    CHECK(ex["marginal"].get<double>() >= m["bounds"]["p_lo"].get<double>() - 1e-12);
    CHECK(ex["marginal"].get<double>() <= m["bounds"]["p_hi"].get<double>() + 1e-12);

    const json d = outputs(run({"marginal", g, "--vertex", "0", "--depth", "0"}));
    CHECK(d["bounds"]["r_hi"] == "inf");
    const json mb = outputs(run({"marginal", g, "--vertex", "0", "--M", "2", "--ell", "3"}));
    CHECK(mb["policy"]["mode"] == "m_based");

    // flags override file parameters
    const json over = outputs(run({"marginal", g, "--depth", "3", "--lambda", "0.5"}));
    CHECK(over["system"]["lambda"] == 0.5);

    CHECK(run({"marginal", g, "--vertex", "42"}).code == 1);
    const Run bad = run({"marginal", g, "--lambda", "9", "--gamma", "1", "--beta", "0"});
    CHECK(bad.code == 2);
    CHECK(json::parse(bad.out)["error"]["kind"] == "precondition");
    CHECK(json::parse(bad.out)["error"]["degree"] == 2);
    const Run budget = run({"marginal", g, "--depth", "12", "--budget", "10"});
    CHECK(budget.code == 3);
}

TEST_CASE("decay emits CSV") {
    const std::string g = write_file("p6.json", R"({"n":6,"edges":[[0,1],[1,2],[2,3],[3,4],[4,5]]})");
    const Run r = run({"decay", g, "--vertex", "0", "--t-max", "4"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,delta,p_lo,p_hi");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 5);
}

TEST_CASE("saw dump") {
    const std::string g = write_file("tri.json", R"({"n":3,"edges":[[0,1],[1,2],[0,2]]})");
    const json s = outputs(run({"saw", g, "--vertex", "0", "--depth", "3"}));
    CHECK(s["tree"]["children"].size() == 2);
    CHECK(s["size_at_depth"] == 7);
}

TEST_CASE("usage and IO errors") {
    CHECK(run({}).code == 1);
    CHECK(run({"nonsense"}).code == 1);
    CHECK(run({"exact", "/nonexistent/graph.json"}).code == 1);
    const std::string bad = write_file("bad.json", "{\n  \"n\": 2,\n  \"edges\": [[0, 0]]\n}");
    const Run r = run({"exact", bad});
    CHECK(r.code == 1);
    CHECK(r.err.find("self-loop") != std::string::npos);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("deterministic across thread counts") {
    const std::string g = write_file(
        "pet.json",
        R"({"n":10,"edges":[[0,1],[1,2],[2,3],[3,4],[4,0],[0,5],[1,6],[2,7],[3,8],[4,9],[5,7],[7,9],[9,6],[6,8],[8,5]]})");
    auto strip = [](const std::string& out) {
        json j = json::parse(out);
        j.erase("wall_time_s");
        j.erase("command");
        j.erase("inputs_digest");
        return j.dump();
    };
    const Run a = run({"marginal", g, "--vertex", "3", "--eps", "0.001", "--threads", "1"});
    const Run b = run({"marginal", g, "--vertex", "3", "--eps", "0.001", "--threads", "4"});
    CHECK(strip(a.out) == strip(b.out));
    CHECK(run({"marginal", g, "--threads", "0"}).code == 1);
}
