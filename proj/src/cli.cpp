#include "mechmatch/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mechmatch/audit.hpp"
#include "mechmatch/corpus.hpp"
#include "mechmatch/io.hpp"
#include "mechmatch/mechanisms.hpp"
#include "mechmatch/strategy.hpp"

namespace mechmatch {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFinding = 2;

std::string show_vertex(int v) { return "v" + std::to_string(v); }

std::string show_matching(const Matching& m) {
    std::string s = "{";
    bool first = true;
    for (const Edge& e : m.edges) {
        if (!first) s += ",";
        first = false;
        s += "(" + show_vertex(e.first) + "," + show_vertex(e.second) + ")";
    }
    return s + "}";
}

std::string show_vertex_set(const std::set<int>& vs) {
    std::string s = "{";
    bool first = true;
    for (int v : vs) {
        if (!first) s += ",";
        first = false;
        s += show_vertex(v);
    }
    return s + "}";
}

std::string show_rats(const std::vector<Rat>& u) {
    std::string s = "(";
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i) s += ",";
        s += format_rat(u[i]);
    }
    return s + ")";
}

std::string violation_text(const Violation& v) {
    return "agent " + std::to_string(v.agent) + " hides " +
           show_vertex_set(v.hidden) + ": " + format_rat(v.truthful) + " -> " +
           format_rat(v.deviating);
}

// Mechanism selection as collected from flags. The Mechanism itself is
// built per instance: bipartition text can only be resolved against a
// concrete agent count.
struct MechanismSpec {
    std::string name;
    std::string bipartition;  // empty = flag not given
    std::optional<std::uint64_t> seed;
    bool exact = false;
};

Mechanism build_mechanism(const MechanismSpec& spec, const LabeledGraph& g) {
    const bool has_bip = !spec.bipartition.empty();
    auto no_bipartition = [&] {
        if (has_bip)
            throw InputError("mechanism '" + spec.name +
                             "' does not take --bipartition");
    };
    auto no_seed = [&] {
        if (spec.seed)
            throw InputError("mechanism '" + spec.name + "' does not take --seed");
    };
    if (spec.name == "matchpi" || spec.name == "matchpi-reference") {
        if (!has_bip)
            throw InputError("mechanism '" + spec.name + "' needs --bipartition");
        no_seed();
        const Bipartition pi = parse_bipartition(spec.bipartition, g.num_agents);
        return spec.name == "matchpi" ? make_match_pi(pi)
                                      : make_match_pi_reference(pi);
    }
    if (spec.name == "mix") {
        no_bipartition();
        return spec.seed ? make_mix_sampled(*spec.seed) : make_mix();
    }
    if (spec.name == "mix-sampled") {
        no_bipartition();
        if (!spec.seed) throw InputError("mechanism 'mix-sampled' needs --seed");
        return make_mix_sampled(*spec.seed);
    }
    if (spec.name == "flip") {
        no_bipartition();
        no_seed();
        return make_flip();
    }
    if (spec.name == "optimal") {
        no_bipartition();
        no_seed();
        return make_optimal();
    }
    if (spec.name == "naive") {
        no_bipartition();
        no_seed();
        return make_naive();
    }
    throw InputError("unknown mechanism '" + spec.name + "'");
}

struct LoadedInstance {
    std::string id;
    LabeledGraph graph;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

LoadedInstance load_instance(const std::string& path) {
    InstanceMeta meta;
    LabeledGraph g = read_instance(read_file(path), &meta);
    const std::string id =
        meta.name.value_or(std::filesystem::path(path).stem().string());
    return {id, std::move(g)};
}

// Inputs are processed in instance-id order so output bytes do not depend
// on argv file order.
std::vector<LoadedInstance> load_instances(const std::vector<std::string>& paths) {
    std::vector<LoadedInstance> out;
    out.reserve(paths.size());
    for (const std::string& p : paths) out.push_back(load_instance(p));
    std::stable_sort(out.begin(), out.end(),
                     [](const LoadedInstance& a, const LoadedInstance& b) {
                         return a.id < b.id;
                     });
    return out;
}

void write_text_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << bytes;
}

void write_csv_if(const std::string& path, const std::vector<ResultRow>& rows) {
    if (!path.empty()) write_text_file(path, write_results(rows));
}

std::vector<int> parse_owner_pattern(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        int value = 0;
        try {
            value = std::stoi(item, &pos);
        } catch (...) {
            pos = std::string::npos;
        }
        if (pos != item.size() || item.empty())
            throw InputError("malformed owner pattern '" + text + "'");
        out.push_back(value);
    }
    if (out.empty()) throw InputError("malformed owner pattern '" + text + "'");
    return out;
}

struct Config {
    // gen
    std::string gen_kind;
    std::string gen_name;
    std::string gen_pattern;
    std::string gen_out;
    int gen_vertices = 0;
    int gen_agents = 2;
    int gen_p = 500;
    std::uint64_t gen_seed = 0;
    // solve / audit
    MechanismSpec mech;
    std::vector<std::string> files;
    std::string csv_path;
    // hunt
    int hunt_max_vertices = 6;
    int hunt_random_count = 0;
    int hunt_random_max_vertices = 8;
    std::uint64_t hunt_seed = 1729;
    // corpus
    std::string corpus_tier;
    int corpus_count = 10000;
    int corpus_max_vertices = 6;
    std::string corpus_out;
};

int cmd_gen(const Config& c) {
    LabeledGraph g;
    InstanceMeta meta;
    if (c.gen_kind == "figure") {
        if (c.gen_name.empty()) throw InputError("--kind figure needs --name");
        g = figure(c.gen_name);
        meta.name = c.gen_name;
    } else if (c.gen_kind == "path") {
        if (c.gen_vertices <= 0)
            throw InputError("--kind path needs --vertices >= 1");
        std::vector<int> pattern;
        if (!c.gen_pattern.empty()) pattern = parse_owner_pattern(c.gen_pattern);
        g = generate_path(c.gen_vertices, c.gen_agents, pattern);
        if (!c.gen_name.empty()) meta.name = c.gen_name;
    } else {  // random
        if (c.gen_vertices <= 0)
            throw InputError("--kind random needs --vertices >= 1");
        g = generate_random(c.gen_vertices, c.gen_agents, c.gen_p, c.gen_seed);
        if (!c.gen_name.empty()) meta.name = c.gen_name;
    }
    const std::string bytes = write_instance(g, meta);
    if (c.gen_out.empty())
        std::cout << bytes;
    else
        write_text_file(c.gen_out, bytes);
    return kExitOk;
}

int cmd_solve(const Config& c) {
    const LoadedInstance inst = load_instance(c.files.front());
    const Mechanism mech = build_mechanism(c.mech, inst.graph);
    const OutcomeDistribution dist = mech.run(inst.graph);
    if (dist.outcomes.size() == 1 && dist.outcomes.front().probability == Rat(1)) {
        const Matching& m = dist.outcomes.front().matching;
        std::cout << "M = " << show_matching(m) << "\n";
        std::cout << "u = " << format_utilities(utilities(inst.graph, m)) << "\n";
    } else {
        for (const Outcome& o : dist.outcomes)
            std::cout << "p = " << format_rat(o.probability)
                      << ": M = " << show_matching(o.matching) << "\n";
        std::cout << "E|M| = " << format_rat(expected_size(dist)) << "\n";
        std::cout << "E[u] = " << show_rats(expected_utilities(inst.graph, dist))
                  << "\n";
    }
    return kExitOk;
}

int cmd_audit_sp(const Config& c) {
    std::vector<ResultRow> rows;
    bool found = false;
    for (const LoadedInstance& inst : load_instances(c.files)) {
        const Mechanism mech = build_mechanism(c.mech, inst.graph);
        ResultRow base;
        base.instance_id = inst.id;
        base.mechanism = mech.name;
        if (mech.bipartition) base.bipartition = bipartition_text(*mech.bipartition);
        base.seed = mech.seed;
        const std::vector<Violation> violations = verify_sp(inst.graph, mech);
        if (violations.empty()) {
            std::cout << "ok: " << inst.id << ": " << mech.name
                      << ": no profitable hide-set\n";
            ResultRow row = base;
            row.detail = "no profitable hide-set";
            rows.push_back(row);
        } else {
            found = true;
            for (const Violation& v : violations) {
                std::cout << "violation: " << inst.id << ": " << mech.name << ": "
                          << violation_text(v) << "\n";
                ResultRow row = base;
                row.detail = violation_text(v);
                rows.push_back(row);
            }
        }
    }
    write_csv_if(c.csv_path, rows);
    return found ? kExitFinding : kExitOk;
}

int cmd_audit_approx(const Config& c) {
    std::vector<ResultRow> rows;
    for (const LoadedInstance& inst : load_instances(c.files)) {
        const Mechanism mech = build_mechanism(c.mech, inst.graph);
        const ApproxReport rep = approx_ratio(inst.graph, mech);
        ResultRow row;
        row.instance_id = inst.id;
        row.mechanism = mech.name;
        if (mech.bipartition) row.bipartition = bipartition_text(*mech.bipartition);
        row.seed = mech.seed;
        row.opt_size = rep.opt_size;
        row.exp_num = boost::multiprecision::numerator(rep.expected);
        row.exp_den = boost::multiprecision::denominator(rep.expected);
        std::cout << "ratio: " << inst.id << ": " << mech.name << ": opt "
                  << rep.opt_size << ", E|M| " << format_rat(rep.expected);
        switch (rep.kind) {
            case ApproxReport::Kind::finite:
                row.ratio_num = boost::multiprecision::numerator(*rep.ratio);
                row.ratio_den = boost::multiprecision::denominator(*rep.ratio);
                std::cout << ", ratio " << format_rat(*rep.ratio) << "\n";
                break;
            case ApproxReport::Kind::infinite:
                row.detail = "ratio infinite: empty expectation against a nonempty optimum";
                std::cout << ", ratio infinite\n";
                break;
            case ApproxReport::Kind::undefined:
                row.detail = "ratio undefined: the graph has no matching";
                std::cout << ", ratio undefined\n";
                break;
        }
        rows.push_back(row);
    }
    write_csv_if(c.csv_path, rows);
    return kExitOk;
}

int cmd_audit_fixtures() {
    const std::vector<FixtureResult> results = fixtures();
    int passed = 0;
    for (const FixtureResult& r : results) {
        if (r.passed) {
            ++passed;
            std::cout << "pass: " << r.name << "\n";
        } else {
            std::cout << "fail: " << r.name << ": " << r.detail << "\n";
        }
    }
    std::cout << passed << "/" << results.size() << " fixtures passed\n";
    return passed == static_cast<int>(results.size()) ? kExitOk : kExitFinding;
}

int cmd_hunt(const Config& c) {
    HuntParams params;
    params.exhaustive_max_vertices = c.hunt_max_vertices;
    params.random_count = c.hunt_random_count;
    params.random_max_vertices = c.hunt_random_max_vertices;
    params.seed = c.hunt_seed;
    const HuntResult res = hunt_flip_sp(params);
    if (res.certificates.empty()) {
        std::cout << "checked " << res.instances_checked
                  << " instances: no counterexample\n";
        return kExitOk;
    }
    for (const HuntCertificate& cert : res.certificates) {
        std::cout << "counterexample: " << cert.instance_id << ": "
                  << violation_text(cert.violation) << "\n";
        InstanceMeta meta;
        meta.name = cert.instance_id;
        std::cout << write_instance(cert.graph, meta);
    }
    std::cout << "checked " << res.instances_checked << " instances: "
              << res.certificates.size() << " counterexample(s) confirmed\n";
    return kExitFinding;
}

int cmd_corpus(const Config& c) {
    std::vector<CorpusInstance> instances;
    if (c.corpus_tier == "exhaustive")
        instances = exhaustive_corpus(c.corpus_max_vertices);
    else if (c.corpus_tier == "random")
        instances = random_corpus(c.corpus_count);
    else
        instances = hunt_corpus(c.corpus_max_vertices);
    std::error_code ec;
    std::filesystem::create_directories(c.corpus_out, ec);
    if (ec)
        throw InputError("cannot create '" + c.corpus_out + "': " + ec.message());
    for (const CorpusInstance& inst : instances) {
        InstanceMeta meta;
        meta.name = inst.id;
        write_text_file(c.corpus_out + "/" + inst.id + ".json",
                        write_instance(inst.graph, meta));
    }
    std::cout << "wrote " << instances.size() << " instances to " << c.corpus_out
              << "\n";
    return kExitOk;
}

std::string one_line(std::string msg) {
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    return msg;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"agent-labeled matching mechanisms: generate, solve, audit, hunt"};
    app.require_subcommand(1);
    Config cfg;

    CLI::App* gen = app.add_subcommand("gen", "emit one instance file");
    gen->add_option("--kind", cfg.gen_kind, "path | random | figure")
        ->required()
        ->check(CLI::IsMember({"path", "random", "figure"}));
    gen->add_option("--name", cfg.gen_name,
                    "figure name, or a name to embed in the instance");
    gen->add_option("--vertices", cfg.gen_vertices, "vertex count");
    gen->add_option("--agents", cfg.gen_agents, "agent count (default 2)");
    gen->add_option("--pattern", cfg.gen_pattern,
                    "comma-separated owner pattern, cycled along the path");
    gen->add_option("--p", cfg.gen_p,
                    "edge probability in permille (default 500)");
    gen->add_option("--seed", cfg.gen_seed, "generator seed (default 0)");
    gen->add_option("--out", cfg.gen_out, "output file (stdout when omitted)");

    const char* mechanism_help =
        "matchpi | matchpi-reference | mix | mix-sampled | flip | optimal | naive";
    auto add_mechanism_options = [&cfg, mechanism_help](CLI::App* cmd) {
        cmd->add_option("--mechanism", cfg.mech.name, mechanism_help)->required();
        cmd->add_option("--bipartition", cfg.mech.bipartition,
                        "side-1 agent ids, comma-separated ('-' = empty side 1)");
        CLI::Option* seed =
            cmd->add_option("--seed", cfg.mech.seed, "sampling seed (mix only)");
        CLI::Option* exact = cmd->add_flag("--exact", cfg.mech.exact,
                                           "force the exact distribution (mix)");
        exact->excludes(seed);
    };

    CLI::App* solve =
        app.add_subcommand("solve", "run one mechanism on one instance");
    add_mechanism_options(solve);
    solve->add_option("files", cfg.files, "instance file")
        ->required()
        ->expected(1);

    CLI::App* audit = app.add_subcommand("audit", "verification suites");
    audit->require_subcommand(1);
    CLI::App* audit_sp =
        audit->add_subcommand("sp", "exhaustive hide-set strategyproofness audit");
    add_mechanism_options(audit_sp);
    audit_sp->add_option("--csv", cfg.csv_path, "also write rows as CSV");
    audit_sp->add_option("files", cfg.files, "instance files")->required();
    CLI::App* audit_approx =
        audit->add_subcommand("approx", "exact approximation-ratio report");
    add_mechanism_options(audit_approx);
    audit_approx->add_option("--csv", cfg.csv_path, "also write rows as CSV");
    audit_approx->add_option("files", cfg.files, "instance files")->required();
    CLI::App* audit_fixtures = audit->add_subcommand(
        "fixtures", "named regression checks over the bundled graphs");

    CLI::App* hunt = app.add_subcommand("hunt", "counterexample searches");
    hunt->require_subcommand(1);
    CLI::App* hunt_flip = hunt->add_subcommand(
        "flip-sp", "search for a coin-flip strategyproofness counterexample");
    hunt_flip->add_option("--max-vertices", cfg.hunt_max_vertices,
                          "exhaustive tier size cap (default 6)");
    hunt_flip->add_option("--random-count", cfg.hunt_random_count,
                          "extra random instances (default 0)");
    hunt_flip->add_option("--random-max-vertices", cfg.hunt_random_max_vertices,
                          "random tier size cap (default 8)");
    hunt_flip->add_option("--seed", cfg.hunt_seed,
                          "random tier master seed (default 1729)");

    CLI::App* corpus =
        app.add_subcommand("corpus", "materialize a corpus tier as files");
    corpus->add_option("--tier", cfg.corpus_tier, "exhaustive | random | hunt")
        ->required()
        ->check(CLI::IsMember({"exhaustive", "random", "hunt"}));
    corpus->add_option("--count", cfg.corpus_count,
                       "random tier instance count (default 10000)");
    corpus->add_option("--max-vertices", cfg.corpus_max_vertices,
                       "exhaustive/hunt tier size cap (default 6)");
    corpus->add_option("--out", cfg.corpus_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return kExitError;
    }

    try {
        if (gen->parsed()) return cmd_gen(cfg);
        if (solve->parsed()) return cmd_solve(cfg);
        if (audit_sp->parsed()) return cmd_audit_sp(cfg);
        if (audit_approx->parsed()) return cmd_audit_approx(cfg);
        if (audit_fixtures->parsed()) return cmd_audit_fixtures();
        if (hunt_flip->parsed()) return cmd_hunt(cfg);
        if (corpus->parsed()) return cmd_corpus(cfg);
        std::cerr << "error: no subcommand selected\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return kExitError;
    }
}

}  // namespace mechmatch
