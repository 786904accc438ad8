#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "irslab/cli.hpp"

using namespace irslab;
using nlohmann::json;

namespace {

cli::Outcome run(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
    return cli::run(args, [env](const std::string& k) -> std::optional<std::string> {
        const auto it = env.find(k);
        if (it == env.end()) return std::nullopt;
        return it->second;
    });
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("irslab_cli_test_" + name)).string();
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("hilbert symbol command") {
    const auto o = run({"arith", "hilbert", "-a", "7", "-b", "5", "-p", "7"});
    CHECK(o.exitCode == 0);
    CHECK(o.out == "-1\n");
    CHECK(o.record["outputs"] == -1);
    const auto q = run({"arith", "hilbert", "-a", "7", "-b", "-3√2", "-p", "7", "--sqrt", "2:3"});
    CHECK(q.exitCode == 0);
    const auto j = json::parse(q.out);
    CHECK(j["embedding"]["symbol"] == -1);
    CHECK(j["conjugate"]["root"] == 4);
}

TEST_CASE("usage errors") {
    const auto o = run({"arith", "hilbert", "-a", "7", "-b", "5", "--bogus"});
    CHECK(o.exitCode == 1);
    CHECK(o.err.find("\"kind\":\"Usage\"") != std::string::npos);
    CHECK(o.err.find("Usage:") != std::string::npos);
    CHECK(o.record.is_null());
    CHECK(run({}).exitCode == 1);
    CHECK(run({"subshift"}).exitCode == 1);
    const auto bad = run({"arith", "hilbert", "-a", "0", "-b", "5"});
    CHECK(bad.exitCode == 1);
    CHECK(bad.err.find("ZeroArgument") != std::string::npos);
    CHECK(run({"--help"}).exitCode == 0);
}

TEST_CASE("subshift periodic command") {
    const auto path = temp_path("tm.txt");
    write_file(path, "01101001\n0110100110010110\n01101001100101101001011001101001\n"
                     "0110100110010110100101100110100110010110011010010110100110010110\n");
    const auto o = run({"subshift", "periodic", "--family", path, "-L", "8", "--pmax", "16"});
    CHECK(o.exitCode == 0);
    CHECK(json::parse(o.out)["period"] == "00101101");
    const auto none = run({"subshift", "periodic", "--family", path, "-L", "18", "--pmax", "16"});
    CHECK(none.exitCode == 0);
    CHECK(json::parse(none.out)["period"] == "none");
    CHECK(json::parse(none.out)["verdict"] == "empty");
    // cycles of length 16 exist at L = 14, so Pmax = 8 is budget-relative
    const auto budget = run({"subshift", "periodic", "--family", "thue-morse:8,16,32,64", "-L", "14", "--pmax", "8"});
    CHECK(budget.exitCode == 2);
    CHECK(json::parse(budget.out)["verdict"] == "none-within-pmax");
    const auto f = run({"subshift", "factors", "--family", "001001001", "-L", "3"});
    CHECK(json::parse(f.out)["factors"] == json({"001", "010", "100"}));
    std::remove(path.c_str());
}

TEST_CASE("covering search exit codes") {
    const auto ok = run({"glue", "cover-check", "--alpha", "periodic:001:60", "--vols", "1,1,1"});
    CHECK(ok.exitCode == 0);
    CHECK(json::parse(ok.out)["period"] == "001");
    const auto tm = run({"glue", "cover-check", "--alpha", "thue-morse:64", "--vols", "1,1,1"});
    CHECK(tm.exitCode == 2);
    CHECK(json::parse(tm.out)["consistentHypothesis"].is_null());
    const auto cap = run({"--budget-hypotheses", "10", "glue", "cover-check", "--alpha", "thue-morse:64"});
    CHECK(cap.exitCode == 1);
    CHECK(cap.err.find("Budget") != std::string::npos);
}

TEST_CASE("other commands run") {
    CHECK(run({"pants", "sample", "--radius", "1", "--law", "uniform:2,3", "--seed", "4"}).exitCode == 0);
    const auto sys = run({"pants", "systole", "--radius", "1", "--law", "point:4", "-W", "4", "--trials", "2",
                          "--format", "csv"});
    CHECK(sys.exitCode == 0);
    CHECK(sys.out.rfind("seed,l,R,W,star_bound,oracle_systole\n", 0) == 0);
    const auto ax = run({"freegeo", "axis", "--word", "f0 f1 f0^-1"});
    CHECK(json::parse(ax.out)["core"] == "f1");
    CHECK(json::parse(ax.out)["period"] == 1);
    CHECK(run({"freegeo", "embed", "--alpha", "0110"}).exitCode == 0);
    const auto nu = run({"glue", "nu-prime", "--vols", "1,3,1", "--samples", "1000", "--seed", "3"});
    CHECK(json::parse(nu.out)["weight"] == "0.75");
    CHECK(run({"glue", "realize", "--alpha", "0110", "--closed"}).exitCode == 0);
    const auto eps = run({"arith", "eps", "--q", "7,1,1,1,-3√2", "--d", "2", "-p", "7", "--root", "3"});
    CHECK(json::parse(eps.out)["embedding"]["eps"] == -1);
    const auto com = run({"arith", "commensurable", "--q", "1,1,1,1,-3√2", "--qp", "7,1,1,1,-3√2", "--d", "2", "-p", "7"});
    CHECK(json::parse(com.out)["verdict"] == "ObstructedByEps");
    CHECK(json::parse(com.out)["embedding"]["root"] == 3);
    const std::string g = R"({"generators": [[2, 0, 0, 0.5], [1.5, 0.5, 0.5, 0.8333333333333334]]})";
    const auto d = run({"chabauty", "dist", "--groupA", g, "--groupB", g, "-R", "5", "-W", "3"});
    CHECK(json::parse(d.out)["distance"] == "0");
    const auto ls = run({"chabauty", "limitset", "--group", g, "-W", "3", "--format", "csv"});
    CHECK(ls.out.rfind("W,gap\n1,", 0) == 0);
    const auto ll = run({"chabauty", "lattice-limit", "--ks", "1,2", "--format", "csv"});
    CHECK(ll.exitCode == 0);
    CHECK(ll.out.rfind("k,distance,closed_size,long_size\n", 0) == 0);
}

TEST_CASE("environment and config resolution") {
    const auto cfg = temp_path("cfg.txt");
    write_file(cfg, "# flat config\nseed = 11\nsamples=200\nvols=1,3,1\n");
    const auto a = run({"--config", cfg, "glue", "nu-prime"});
    REQUIRE(a.exitCode == 0);
    CHECK(a.record["config"]["seed"] == 11);
    CHECK(json::parse(a.out)["samples"] == 200);
    // environment beats the config file, the command line beats both
    const auto b = run({"--config", cfg, "glue", "nu-prime"}, {{"IRSLAB_SEED", "12"}, {"IRSLAB_SAMPLES", "300"}});
    CHECK(b.record["config"]["seed"] == 12);
    CHECK(json::parse(b.out)["samples"] == 300);
    const auto c = run({"--config", cfg, "glue", "nu-prime", "--samples", "50"}, {{"IRSLAB_SAMPLES", "300"}});
    CHECK(json::parse(c.out)["samples"] == 50);
    const auto e = run({"glue", "nu-prime", "--samples", "10"}, {{"IRSLAB_CONFIG", cfg}});
    CHECK(e.record["config"]["seed"] == 11);
    std::remove(cfg.c_str());
}

TEST_CASE("records and replay") {
    const auto rec = temp_path("rec.json");
    const auto a = run({"glue", "nu-prime", "--vols", "1,3,1", "--samples", "2000", "--seed", "5", "--out", rec});
    REQUIRE(a.exitCode == 0);
    const json r = json::parse(std::ifstream(rec));
    CHECK(r["toolVersion"] == cli::kToolVersion);
    CHECK(r["outputs"] == a.record["outputs"]);
    CHECK(r.contains("wallTimeSeconds"));

    const auto same = run({"replay", rec});
    CHECK(same.exitCode == 0);
    CHECK(json::parse(same.out)["verdict"] == "identical");

    const auto other = run({"replay", rec, "--replay-seed", "6"});
    CHECK(other.exitCode == 1);
    CHECK(json::parse(other.out)["verdict"] == "mismatch");

    // exact-arithmetic commands replay bit-identically
    const auto rec2 = temp_path("rec2.json");
    run({"arith", "commensurable", "--q", "1,1,1,-3√2", "--qp", "7,1,1,-3√2", "--d", "2", "-p", "7", "--out", rec2});
    const auto ex = run({"replay", rec2});
    CHECK(json::parse(ex.out)["verdict"] == "identical");

    json old = json::parse(std::ifstream(rec2));
    old["toolVersion"] = "irslab 0.0.1";
    write_file(rec2, old.dump());
    const auto vm = run({"replay", rec2});
    CHECK(vm.exitCode == 0);
    CHECK(vm.err.find("VersionMismatch") != std::string::npos);
    std::remove(rec.c_str());
    std::remove(rec2.c_str());
}

TEST_CASE("output comparison") {
    CHECK(cli::diff_outputs(json::parse(R"({"a": "1.0000000000000001", "b": [1, 2]})"),
                            json::parse(R"({"a": "1", "b": [1, 2]})"))
              .empty());
    CHECK(cli::diff_outputs(json::parse(R"({"a": 1})"), json::parse(R"({"a": 2})")) ==
          std::vector<std::string>{"/a"});
    CHECK(cli::diff_outputs(json::parse(R"({"a": "x"})"), json::parse(R"({"a": "y", "c": 1})")).size() == 2);
    CHECK(cli::diff_outputs(json::parse("1.0"), json::parse("1.000001")).size() == 1);
}
