#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mechmatch/corpus.hpp"
#include "mechmatch/io.hpp"

namespace fs = std::filesystem;
using namespace mechmatch;

namespace {

struct RunResult {
    int status = -1;
    std::string out;
    std::string err;
};

const std::string& binary() {
    static const std::string path = [] {
        if (const char* p = std::getenv("MECHMATCH_CLI_PATH")) return std::string(p);
#ifdef MECHMATCH_CLI_PATH
        return std::string(MECHMATCH_CLI_PATH);
#else
        REQUIRE_MESSAGE(false, "MECHMATCH_CLI_PATH must point at the CLI");
        return std::string{};
#endif
    }();
    REQUIRE_MESSAGE(fs::exists(path), "CLI binary not found at " << path);
    return path;
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        std::string tmpl = (fs::temp_directory_path() / "mm-cli-XXXXXX").string();
        REQUIRE(mkdtemp(tmpl.data()) != nullptr);
        return fs::path(tmpl);
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Runs the CLI in a fresh process; `env` may carry VAR=value prefixes.
RunResult run(const std::string& args, const std::string& env = {}) {
    static int counter = 0;
    const fs::path out = work_dir() / ("out" + std::to_string(counter));
    const fs::path err = work_dir() / ("err" + std::to_string(counter));
    ++counter;
    std::string cmd = env.empty() ? std::string{} : env + " ";
    cmd += binary() + " " + args + " >" + out.string() + " 2>" + err.string();
    const int rc = std::system(cmd.c_str());
    RunResult r;
    if (WIFEXITED(rc)) r.status = WEXITSTATUS(rc);
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.rfind(prefix, 0) == 0;
}

// Figure instance files shared by the test cases below.
fs::path figure_file(const std::string& name) {
    const fs::path p = work_dir() / (name + ".json");
    if (!fs::exists(p)) {
        const RunResult r = run("gen --kind figure --name " + name +
                                " --out " + p.string());
        REQUIRE(r.status == 0);
    }
    return p;
}

}  // namespace

TEST_CASE("gen writes byte-identical files and mirrors them to stdout") {
    const fs::path a = work_dir() / "gen-a.json";
    const fs::path b = work_dir() / "gen-b.json";
    RunResult r = run("gen --kind figure --name fig1a --out " + a.string());
    CHECK(r.status == 0);
    CHECK(r.out.empty());
    r = run("gen --kind figure --name fig1a --out " + b.string());
    CHECK(r.status == 0);
    CHECK(slurp(a) == slurp(b));
    r = run("gen --kind figure --name fig1a");
    CHECK(r.status == 0);
    CHECK(r.out == slurp(a));

    InstanceMeta meta;
    CHECK(read_instance(slurp(a), &meta) == figure("fig1a"));
    CHECK(meta.name == "fig1a");
}

TEST_CASE("gen builds paths from owner patterns") {
    const fs::path p = work_dir() / "p4.json";
    const RunResult r = run(
        "gen --kind path --vertices 4 --pattern 1,2,2,1 --name p4 --out " +
        p.string());
    CHECK(r.status == 0);
    InstanceMeta meta;
    CHECK(read_instance(slurp(p), &meta) == figure("fig5"));
    CHECK(meta.name == "p4");
}

TEST_CASE("gen random is seed-deterministic") {
    const RunResult a = run("gen --kind random --vertices 6 --p 700 --seed 5");
    const RunResult b = run("gen --kind random --vertices 6 --p 700 --seed 5");
    const RunResult c = run("gen --kind random --vertices 6 --p 700 --seed 6");
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
}

TEST_CASE("solve prints the matching and utilities of a deterministic rule") {
    const RunResult r = run("solve --mechanism matchpi --bipartition 1 " +
                            figure_file("fig1a").string());
    CHECK(r.status == 0);
    CHECK(r.err.empty());
    CHECK(r.out ==
          "M = {(v2,v3),(v4,v5),(v6,v7)}\n"
          "u = (3,3)\n");
}

TEST_CASE("solve prints the full distribution of the mixture") {
    const RunResult r =
        run("solve --mechanism mix " + figure_file("fig1a").string());
    CHECK(r.status == 0);
    CHECK(r.out ==
          "p = 1/4: M = {(v2,v3),(v4,v5)}\n"
          "p = 1/4: M = {(v2,v3),(v4,v5),(v6,v7)}\n"
          "p = 1/4: M = {(v2,v3),(v4,v5),(v6,v7)}\n"
          "p = 1/4: M = {(v2,v3),(v4,v5)}\n"
          "E|M| = 5/2\n"
          "E[u] = (5/2,5/2)\n");
    // Byte-determinism across runs.
    CHECK(run("solve --mechanism mix " + figure_file("fig1a").string()).out ==
          r.out);
}

TEST_CASE("solve runs a sampled mixture from a seed") {
    const RunResult a = run("solve --mechanism mix-sampled --seed 9 " +
                            figure_file("fig1a").string());
    CHECK(a.status == 0);
    CHECK(starts_with(a.out, "M = "));
    CHECK(run("solve --mechanism mix-sampled --seed 9 " +
              figure_file("fig1a").string())
              .out == a.out);
}

TEST_CASE("operational errors exit 1 with a single-line message") {
    const std::string f = figure_file("fig1a").string();
    RunResult r = run("solve --mechanism bogus " + f);
    CHECK(r.status == 1);
    CHECK(starts_with(r.err, "error: unknown mechanism 'bogus'"));

    r = run("solve --mechanism matchpi " + f);
    CHECK(r.status == 1);
    CHECK(starts_with(r.err, "error: "));
    CHECK(r.err.find("bipartition") != std::string::npos);

    r = run("solve --mechanism mix --exact --seed 3 " + f);
    CHECK(r.status == 1);
    CHECK(starts_with(r.err, "error: "));

    r = run("solve --mechanism matchpi --bipartition 5 " + f);
    CHECK(r.status == 1);
    CHECK(starts_with(r.err, "error: "));

    r = run("solve --mechanism matchpi --bipartition 1 " +
            (work_dir() / "missing.json").string());
    CHECK(r.status == 1);
    CHECK(starts_with(r.err, "error: cannot open"));

    r = run("");
    CHECK(r.status == 1);
    CHECK(starts_with(r.err, "error: "));

    CHECK(run("--help").status == 0);
    CHECK(run("audit --help").status == 0);

    // Errors never leave half-written output on stdout.
    CHECK(run("solve --mechanism bogus " + f).out.empty());
}

TEST_CASE("audit sp reports violations and exits 2") {
    const fs::path csv = work_dir() / "sp.csv";
    const RunResult r = run("audit sp --mechanism naive --csv " + csv.string() +
                            " " + figure_file("fig3").string());
    CHECK(r.status == 2);
    CHECK(r.out ==
          "violation: fig3: naive: agent 2 hides {v1,v5,v6}: 4 -> 5\n"
          "violation: fig3: naive: agent 2 hides {v5,v6}: 4 -> 6\n"
          "violation: fig3: naive: agent 2 hides {v5,v6,v10}: 4 -> 5\n");
    CHECK(slurp(csv) ==
          "instance_id,mechanism,bipartition,seed,opt_size,exp_num,exp_den,"
          "ratio_num,ratio_den,detail\n"
          "fig3,naive,,,,,,,,\"agent 2 hides {v1,v5,v6}: 4 -> 5\"\n"
          "fig3,naive,,,,,,,,\"agent 2 hides {v5,v6}: 4 -> 6\"\n"
          "fig3,naive,,,,,,,,\"agent 2 hides {v5,v6,v10}: 4 -> 5\"\n");
}

TEST_CASE("audit sp certifies clean instances and exits 0") {
    const fs::path csv = work_dir() / "sp-ok.csv";
    const RunResult r =
        run("audit sp --mechanism matchpi --bipartition 1 --csv " +
            csv.string() + " " + figure_file("fig1a").string());
    CHECK(r.status == 0);
    CHECK(r.out == "ok: fig1a: matchpi: no profitable hide-set\n");
    CHECK(slurp(csv) ==
          "instance_id,mechanism,bipartition,seed,opt_size,exp_num,exp_den,"
          "ratio_num,ratio_den,detail\n"
          "fig1a,matchpi,1,,,,,,,no profitable hide-set\n");
}

TEST_CASE("audit sp orders multiple instances by id") {
    const RunResult r = run("audit sp --mechanism mix " +
                            figure_file("fig5").string() + " " +
                            figure_file("fig1b").string());
    CHECK(r.status == 0);
    CHECK(r.out ==
          "ok: fig1b: mix: no profitable hide-set\n"
          "ok: fig5: mix: no profitable hide-set\n");
}

TEST_CASE("audit approx reports exact ratios") {
    const fs::path csv = work_dir() / "approx.csv";
    RunResult r = run("audit approx --mechanism mix --csv " + csv.string() +
                      " " + figure_file("fig5").string());
    CHECK(r.status == 0);
    CHECK(r.out == "ratio: fig5: mix: opt 2, E|M| 1, ratio 2\n");
    CHECK(slurp(csv) ==
          "instance_id,mechanism,bipartition,seed,opt_size,exp_num,exp_den,"
          "ratio_num,ratio_den,detail\n"
          "fig5,mix,,,2,1,1,2,1,\n");

    r = run("audit approx --mechanism mix " + figure_file("fig1a").string());
    CHECK(r.out == "ratio: fig1a: mix: opt 3, E|M| 5/2, ratio 6/5\n");
}

TEST_CASE("audit approx marks an edgeless graph undefined") {
    const fs::path p = work_dir() / "bare.json";
    RunResult r = run("gen --kind random --vertices 2 --p 0 --name bare --out " +
                      p.string());
    REQUIRE(r.status == 0);
    r = run("audit approx --mechanism mix " + p.string());
    CHECK(r.status == 0);
    CHECK(r.out == "ratio: bare: mix: opt 0, E|M| 0, ratio undefined\n");
}

TEST_CASE("audit fixtures passes and prints one line per check") {
    const RunResult r = run("audit fixtures");
    CHECK(r.status == 0);
    CHECK(r.out.find("fail:") == std::string::npos);
    CHECK(r.out.find("pass: ") != std::string::npos);
    CHECK(r.out.find(" fixtures passed\n") != std::string::npos);
}

TEST_CASE("hunt flip-sp clears the small exhaustive tier") {
    const RunResult r = run("hunt flip-sp --max-vertices 4");
    CHECK(r.status == 0);
    CHECK(r.out == "checked " + std::to_string(hunt_corpus(4).size()) +
                       " instances: no counterexample\n");
}

TEST_CASE("corpus materializes a tier that parses back") {
    const fs::path dir = work_dir() / "tier";
    const RunResult r =
        run("corpus --tier hunt --max-vertices 3 --out " + dir.string());
    CHECK(r.status == 0);
    const std::vector<CorpusInstance> expect = hunt_corpus(3);
    CHECK(r.out == "wrote " + std::to_string(expect.size()) +
                       " instances to " + dir.string() + "\n");
    for (const CorpusInstance& ci : expect) {
        const fs::path f = dir / (ci.id + ".json");
        CAPTURE(ci.id);
        REQUIRE(fs::exists(f));
        InstanceMeta meta;
        CHECK(read_instance(slurp(f), &meta) == ci.graph);
        CHECK(meta.name == ci.id);
    }
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        (void)entry;
        ++files;
    }
    CHECK(files == expect.size());
}

TEST_CASE("the brute-force bound is adjustable through the environment") {
    const fs::path p = work_dir() / "p17.json";
    RunResult r =
        run("gen --kind path --vertices 17 --name p17 --out " + p.string());
    REQUIRE(r.status == 0);
    r = run("solve --mechanism naive " + p.string());
    CHECK(r.status == 1);
    CHECK(starts_with(r.err, "error: "));
    r = run("solve --mechanism naive " + p.string(),
            "MECHMATCH_ORACLE_BOUND=18");
    CHECK(r.status == 0);
    CHECK(starts_with(r.out, "M = "));
}
