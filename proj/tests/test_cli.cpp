#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "senergy/cli.hpp"
#include "senergy/config.hpp"
#include "senergy/error.hpp"
#include "senergy/trace.hpp"

using namespace senergy;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("senergy_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("config parsing") {
    std::istringstream in(R"({"n": 3, "rho": 0.2, "s": 0.5, "eps": [0.1, 0.01], "policy": "leftmost", "seed": 99})");
    const auto c = parse_config(in);
    CHECK(c.n == 3);
    CHECK(c.rho == 0.2);
    CHECK(c.s == std::vector<double>{0.5});
    CHECK(c.eps.size() == 2);
    CHECK(c.seed == 99);

    std::istringstream unknown(R"({"colour": 1})");
    CHECK_THROWS_AS(parse_config(unknown), ParameterError);
    std::istringstream typed(R"({"n": "three"})");
    CHECK_THROWS_AS(parse_config(typed), ParameterError);
    std::istringstream negative(R"({"n": -3})");
    CHECK_THROWS_AS(parse_config(negative), ParameterError);
    std::istringstream broken("{");
    CHECK_THROWS_AS(parse_config(broken), ParameterError);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run({"verify"}).code == cli::kExitUsage);
    CHECK(run({"simulate", "--format", "xml"}).code == cli::kExitUsage);
    const auto dir = scratch("usage");
    write(dir / "bad.json", R"({"n": 3, "bogus": true})");
    CHECK(run({"simulate", "--config", (dir / "bad.json").string(), "--out", dir.string()}).code == cli::kExitUsage);
    CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("simulate is deterministic and verifies") {
    const auto dir = scratch("sim");
    write(dir / "cfg.json", R"({"n": 5, "rho": 0.2, "policy": "uniform-random", "steps_cap": 300})");
    const auto cfg = (dir / "cfg.json").string();
    auto a = run({"simulate", "--config", cfg, "--seed", "42", "--out", (dir / "a").string()});
    auto b = run({"simulate", "--config", cfg, "--seed", "42", "--out", (dir / "b").string()});
    auto c = run({"simulate", "--config", cfg, "--seed", "43", "--out", (dir / "c").string()});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    CHECK(slurp(dir / "a" / "trace.jsonl") == slurp(dir / "b" / "trace.jsonl"));
    CHECK(slurp(dir / "a" / "trace.jsonl") != slurp(dir / "c" / "trace.jsonl"));
    CHECK(fs::exists(dir / "a" / "energy.csv"));

    const auto v = run({"verify", "--trace", (dir / "a" / "trace.jsonl").string()});
    CHECK(v.code == 0);
    CHECK(v.out.rfind("ok:", 0) == 0);

    for (const char* policy : {"midpoint", "leftmost", "rightmost", "uniform-random", "matrix"}) {
        write(dir / "p.json", std::string(R"({"n": 4, "rho": 0.25, "steps_cap": 200, "policy": ")") + policy + "\"}");
        const auto out = (dir / policy).string();
        REQUIRE(run({"simulate", "--config", (dir / "p.json").string(), "--out", out}).code == 0);
        CHECK(run({"verify", "--trace", out + "/trace.jsonl"}).code == 0);
    }
    write(dir / "st.json", R"({"n": 4, "rho": 0.2, "steps_cap": 200, "dynamics": "stochastic"})");
    REQUIRE(run({"simulate", "--config", (dir / "st.json").string(), "--out", (dir / "st").string()}).code == 0);
    CHECK(run({"verify", "--trace", (dir / "st" / "trace.jsonl").string()}).code == 0);
}

TEST_CASE("verify flags a planted violation") {
    const auto dir = scratch("verify");
    REQUIRE(run({"simulate", "--seed", "3", "--out", dir.string(), "--steps-cap", "20"}).code == 0);
    auto trace = load_trace((dir / "trace.jsonl").string());
    REQUIRE(trace.records.size() >= 2);
    // nudge one agent of step 1 outside its allowed interval
    auto& rec = trace.records[1];
    AgentId moved = 0;
    for (auto [a, b] : rec.graph.pairs()) {
        moved = a;
        (void)b;
        break;
    }
    auto pos = rec.after.by_id();
    const auto band = allowed_interval(rec.graph, rec.before, rec.before.ranks()[moved], trace.params.rho);
    pos[moved] = band.lo > 0.01 ? band.lo - 0.01 : std::min(1.0, band.hi + 0.01);
    rec.after = Configuration(pos, rec.after.time());
    if (trace.records.size() > 2) trace.records[2].before = rec.after;
    save_trace((dir / "bad.jsonl").string(), trace);

    const auto v = run({"verify", "--trace", (dir / "bad.jsonl").string()});
    CHECK(v.code == cli::kExitViolation);
    CHECK(v.out.find("step 1") != std::string::npos);
    CHECK(v.out.find("agent " + std::to_string(moved)) != std::string::npos);
}

TEST_CASE("certify the forced pair") {
    const auto dir = scratch("certify");
    write(dir / "pair.jsonl",
          "{\"format\":\"senergy-trace\",\"version\":1,\"kind\":\"averaging\",\"n\":2,\"rho\":0.5,"
          "\"tolerance\":1e-09,\"asymmetric\":false,\"records\":1,\"truncated_at\":null,\"truncation_reason\":null}\n"
          "{\"t\":0,\"edges\":[[0,1]],\"before\":[0.0,1.0],\"after\":[0.5,0.5]}\n");
    const auto r = run({"certify", "--trace", (dir / "pair.jsonl").string(), "--s", "1", "--dump-clearing",
                        (dir / "clear.csv").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("1,1,4,1,3,0,0") != std::string::npos);
    const auto dump = slurp(dir / "clear.csv");
    CHECK(dump.find("1,0,0,1,4,0,4,4,1") != std::string::npos);
}

TEST_CASE("reduce, bounds, lowerbound, opinion, kuramoto") {
    const auto dir = scratch("misc");
    REQUIRE(run({"simulate", "--seed", "5", "--out", dir.string()}).code == 0);
    const auto red = run({"reduce", "--trace", (dir / "trace.jsonl").string(), "--out", dir.string()});
    CHECK(red.code == 0);
    CHECK(run({"verify", "--trace", (dir / "twist.jsonl").string()}).code == 0);

    const auto b = run({"bounds", "--n", "4", "--rho", "0.25", "--s", "0.5", "--eps", "0.5"});
    CHECK(b.code == 0);
    CHECK(b.out.find("energy,4,0.25,0.5,8192") != std::string::npos);

    const auto lb = run({"lowerbound", "--n", "3", "--rho", "0.2"});
    CHECK(lb.code == 0);
    CHECK(lb.out.find("3,0.2,") != std::string::npos);
    CHECK(lb.out.find(",true,") != std::string::npos);

    const auto jl = run({"lowerbound", "--n", "2", "--rho", "0.25", "--eps", "0.1", "--format", "jsonl"});
    CHECK(jl.code == 0);
    CHECK(jl.out.find("\"measured\":4") != std::string::npos);

    const auto op = run({"opinion", "--seed", "2", "--out", dir.string()});
    CHECK(op.code == 0);
    CHECK(fs::exists(dir / "opinion.csv"));
    const auto ku = run({"kuramoto", "--seed", "2"});
    CHECK(ku.code == 0);
    CHECK(ku.out.find("rho_eff") != std::string::npos);
}
