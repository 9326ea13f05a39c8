#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "ctlab/graph.hpp"

// End-to-end tests of the command-line driver: the binary under test is
// CTLAB_BIN, invoked through the shell with stdout captured to a file.

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_root() {
    static fs::path root = [] {
        fs::path p = fs::temp_directory_path() / "ctlab_cli_scratch";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

fs::path fresh_dir(const std::string& name) {
    fs::path p = scratch_root() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct CliRun {
    int exit_code = -1;
    std::string out;
};

CliRun run_cli(const std::string& args, const fs::path& dir) {
    fs::path out_file = dir / "cli_stdout.txt";
    std::string cmd = std::string(CTLAB_BIN) + " " + args + " > " +
                      out_file.string() + " 2> " + (dir / "cli_stderr.txt").string();
    int status = std::system(cmd.c_str());
    CliRun r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text(out_file);
    return r;
}

json parse_out(const CliRun& r) { return json::parse(r.out); }

} // namespace

TEST_CASE("gen writes graphs and a manifest") {
    fs::path dir = fresh_dir("gen_barbell");
    write_text(dir / "cfg.json",
               R"({"family": {"kind": "barbell", "pendants": 2}, "n": 4})");
    CliRun r = run_cli("gen --config " + (dir / "cfg.json").string() + " --out " +
                           (dir / "out").string(),
                       dir);
    CHECK(r.exit_code == 0);
    json ok = parse_out(r);
    CHECK(ok.at("ok") == true);
    CHECK(ok.at("files").size() == 2);

    ctlab::WeightedGraph g = ctlab::read_graph((dir / "out" / "graph_000.wgr").string());
    CHECK(g.vertex_count() == 6);
    CHECK(g.edge_count() == 8);

    json manifest = json::parse(read_text(dir / "out" / "manifest.json"));
    CHECK(manifest.at("command") == "gen");
    CHECK(manifest.at("graphs").at(0).at("vertices").at("value") == 6);
    // deterministic family, no seed involved
    CHECK(!manifest.contains("master_seed"));
    CHECK(!manifest.at("graphs").at(0).contains("seed"));
}

TEST_CASE("analyze recovers the exact K_3 numbers") {
    fs::path dir = fresh_dir("analyze_k3");
    write_text(dir / "gen.json", R"({"family": {"kind": "complete"}, "n": 3})");
    CliRun g = run_cli("gen --config " + (dir / "gen.json").string() + " --out " +
                           (dir / "g").string(),
                       dir);
    REQUIRE(g.exit_code == 0);

    write_text(dir / "an.json",
               std::string(R"({"graph": ")") + (dir / "g" / "graph_000.wgr").string() +
                   R"(", "analyses": {"resistance": true, "cover_exact": true,
                       "cover_mc": true, "chaining": true, "packing": true,
                       "gff": true},
                      "seed": 5, "gff_replicas": 4000})");
    CliRun r = run_cli("analyze --config " + (dir / "an.json").string() + " --out " +
                           (dir / "a").string(),
                       dir);
    CHECK(r.exit_code == 0);

    json rep = json::parse(read_text(dir / "a" / "analyze_report.json"));
    CHECK(rep.at("cover_exact").at("t_cov").at("value").get<double>() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(rep.at("hitting").at("t_hit").at("value").get<double>() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.at("resistance").at("diam_r").at("value").get<double>() ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(rep.at("gff").at("t_cov_source") == "exact");
    // worst-start cover of K_3 is 3 independent of start; the estimate must agree
    double mc = rep.at("cover_mc").at("t_cov").at("value").get<double>();
    double se = rep.at("cover_mc").at("se").at("value").get<double>();
    CHECK(std::abs(mc - 3.0) <= 4 * se + 1e-12);
}

TEST_CASE("stochastic work without a seed is rejected") {
    fs::path dir = fresh_dir("no_seed");
    write_text(dir / "gen.json", R"({"family": {"kind": "cycle"}, "n": 8})");
    REQUIRE(run_cli("gen --config " + (dir / "gen.json").string() + " --out " +
                        (dir / "g").string(),
                    dir)
                .exit_code == 0);
    write_text(dir / "an.json",
               std::string(R"({"graph": ")") + (dir / "g" / "graph_000.wgr").string() +
                   R"(", "analyses": {"cover_mc": true}})");
    CliRun r = run_cli("analyze --config " + (dir / "an.json").string() + " --out " +
                           (dir / "a").string(),
                       dir);
    CHECK(r.exit_code == 2);
    CHECK(parse_out(r).at("error").at("code") == "InvalidParameters");
}

TEST_CASE("config file problems map to exit 2") {
    fs::path dir = fresh_dir("bad_config");

    write_text(dir / "broken.json", "{this is not json");
    CliRun r1 = run_cli("gen --config " + (dir / "broken.json").string(), dir);
    CHECK(r1.exit_code == 2);
    CHECK(parse_out(r1).at("error").at("code") == "MalformedFile");

    write_text(dir / "typo.json", R"({"familly": {"kind": "cycle"}, "n": 8})");
    CliRun r2 = run_cli("gen --config " + (dir / "typo.json").string(), dir);
    CHECK(r2.exit_code == 2);
    CHECK(parse_out(r2).at("error").at("code") == "InvalidParameters");

    write_text(dir / "wrongkey.json",
               R"({"family": {"kind": "cycle", "pendants": 3}, "n": 8})");
    CliRun r3 = run_cli("gen --config " + (dir / "wrongkey.json").string(), dir);
    CHECK(r3.exit_code == 2);

    CliRun r4 = run_cli("gen --config " + (dir / "missing.json").string(), dir);
    CHECK(r4.exit_code == 2);
    CHECK(parse_out(r4).at("error").at("code") == "IoFailure");

    CliRun r5 = run_cli("bogus-subcommand", dir);
    CHECK(r5.exit_code == 2);
}

TEST_CASE("exhausted step budget maps to exit 3") {
    fs::path dir = fresh_dir("step_budget");
    write_text(dir / "gen.json", R"({"family": {"kind": "cycle"}, "n": 64})");
    REQUIRE(run_cli("gen --config " + (dir / "gen.json").string() + " --out " +
                        (dir / "g").string(),
                    dir)
                .exit_code == 0);
    write_text(dir / "an.json",
               std::string(R"({"graph": ")") + (dir / "g" / "graph_000.wgr").string() +
                   R"(", "analyses": {"resistance": false, "cover_mc": true},
                      "seed": 11, "budgets": {"step_cap": 16}})");
    CliRun r = run_cli("analyze --config " + (dir / "an.json").string() + " --out " +
                           (dir / "a").string(),
                       dir);
    CHECK(r.exit_code == 3);
    CHECK(parse_out(r).at("error").at("code") == "StepBudgetExceeded");
}

TEST_CASE("classify output is reproducible and thread-count independent") {
    fs::path dir = fresh_dir("classify_repro");
    write_text(dir / "cl.json",
               R"({"family": {"kind": "cycle"}, "n_values": [4, 6, 8],
                   "samples_per_n": 10, "seed": 21,
                   "budgets": {"cover_replicas": 4, "hitting_replicas": 2}})");
    std::string base = "classify --config " + (dir / "cl.json").string();

    REQUIRE(run_cli(base + " --out " + (dir / "r1").string() + " --threads 1", dir).exit_code == 0);
    REQUIRE(run_cli(base + " --out " + (dir / "r2").string() + " --threads 1", dir).exit_code == 0);
    REQUIRE(run_cli(base + " --out " + (dir / "r3").string() + " --threads 2", dir).exit_code == 0);

    for (const char* name : {"classify_report.json", "ensemble_stats.csv", "medians.dat"}) {
        std::string a = read_text(dir / "r1" / name);
        CHECK(a == read_text(dir / "r2" / name));
        CHECK(a == read_text(dir / "r3" / name));
        CHECK(!a.empty());
    }
}

TEST_CASE("catalog config is validated before any heavy work") {
    fs::path dir = fresh_dir("catalog_cfg");
    write_text(dir / "cfg.json", R"({"replica_scale": 0})");
    CliRun r = run_cli("catalog --config " + (dir / "cfg.json").string(), dir);
    CHECK(r.exit_code == 2);
    CHECK(parse_out(r).at("error").at("code") == "InvalidParameters");
}
