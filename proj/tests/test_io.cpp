#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "mechmatch/io.hpp"

using namespace mechmatch;

namespace {

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::string error_of(const std::string& bytes) {
    try {
        read_instance(bytes);
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("round trip is the identity on every bundled graph") {
    for (const std::string& name : figure_names()) {
        const LabeledGraph g = figure(name);
        InstanceMeta meta;
        meta.name = name;
        const std::string bytes = write_instance(g, meta);
        InstanceMeta back;
        CHECK(read_instance(bytes, &back) == g);
        CHECK(back.name == name);
        CHECK_FALSE(back.provenance.has_value());
        // byte-level: serialize(parse(bytes)) == bytes
        CHECK(write_instance(read_instance(bytes, &back), back) == bytes);
    }
}

TEST_CASE("round trip on random graphs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const LabeledGraph g = generate_random(9, 4, 400, seed);
        CHECK(read_instance(write_instance(g)) == g);
    }
}

TEST_CASE("empty graph round trips") {
    LabeledGraph g;
    const std::string bytes = write_instance(g);
    const LabeledGraph back = read_instance(bytes);
    CHECK(back == g);
    CHECK(back.num_vertices() == 0);
}

TEST_CASE("metadata is optional and preserved") {
    InstanceMeta meta;
    meta.name = "example";
    meta.provenance = "hand made, for tests";
    const std::string bytes = write_instance(figure("fig5"), meta);
    InstanceMeta back;
    read_instance(bytes, &back);
    CHECK(back.name == "example");
    CHECK(back.provenance == "hand made, for tests");
}

TEST_CASE("malformed instances are rejected with located errors") {
    CHECK(contains(error_of("not json"), "byte"));
    CHECK(contains(error_of("[]"), "root"));
    CHECK(contains(error_of("{}"), "schema_version"));
    CHECK(contains(error_of(R"({"schema_version": 99})"), "schema_version"));
    const std::string head = R"({"schema_version": 1, "agents": 2, )";
    CHECK(contains(error_of(R"({"schema_version": 1})"), "agents"));
    CHECK(contains(
        error_of(head + R"("vertices": [[1, 0]], "edges": []})"),
        "owner 0 out of range"));
    CHECK(contains(
        error_of(head + R"("vertices": [[1, 3]], "edges": []})"),
        "out of range"));
    CHECK(contains(
        error_of(head + R"("vertices": [[1, 1], [1, 2]], "edges": []})"),
        "duplicate vertex"));
    CHECK(contains(
        error_of(head + R"("vertices": [[1, 1], [2, 2]], "edges": [[1, 9]]})"),
        "not a declared vertex"));
    CHECK(contains(
        error_of(head + R"("vertices": [[1, 1]], "edges": [[1, 1]]})"),
        "self-loop"));
    CHECK(contains(
        error_of(head +
                 R"("vertices": [[1, 1], [2, 2]], "edges": [[1, 2], [2, 1]]})"),
        "duplicate edge"));
    CHECK(contains(error_of(head + R"("vertices": 3, "edges": []})"),
                   "vertices"));
    CHECK(contains(
        error_of(head + R"("vertices": [[0, 1]], "edges": []})"),
        "positive"));
}

TEST_CASE("figures and their shapes") {
    CHECK(figure_names() ==
          std::vector<std::string>{"fig1a", "fig1b", "fig1c", "fig2", "fig3",
                                   "fig3b", "fig5", "fig6"});
    CHECK_THROWS_AS((void)figure("fig9"), InputError);

    const LabeledGraph f2 = figure("fig2");
    CHECK(f2.num_agents == 3);
    CHECK(f2.num_vertices() == 14);
    const std::vector<int> owners2 = {2, 2, 2, 1, 1, 1, 1, 3, 3, 3, 1, 1, 1, 2};
    for (int v = 1; v <= 14; ++v) CHECK(f2.owner(v) == owners2[v - 1]);
    CHECK(f2.num_edges() == 13);

    CHECK(figure("fig5").owner(1) == 1);
    CHECK(figure("fig5").owner(2) == 2);
    CHECK(figure("fig6").num_agents == 3);
    for (const std::string& name : figure_names())
        CHECK(validate(figure(name)).empty());
}

TEST_CASE("generate_path") {
    CHECK(generate_path(7, 2, {1, 2, 2, 1, 1, 1, 2}) == figure("fig1a"));
    const LabeledGraph alt = generate_path(5, 2, {});
    CHECK(alt.owner(1) == 1);
    CHECK(alt.owner(2) == 2);
    CHECK(alt.owner(3) == 1);  // default pattern cycles 1,2
    const LabeledGraph cyc = generate_path(5, 3, {1, 2, 3});
    CHECK(cyc.owner(4) == 1);
    CHECK(cyc.owner(5) == 2);
    CHECK(generate_path(0, 2, {}).num_vertices() == 0);
    CHECK(generate_path(1, 2, {}).num_edges() == 0);
    CHECK_THROWS_AS(generate_path(3, 2, {1, 3}), InputError);
    CHECK_THROWS_AS(generate_path(-1, 2, {}), InputError);
    CHECK_THROWS_AS(generate_path(3, 0, {}), InputError);
}

TEST_CASE("generate_random determinism and parameter effects") {
    const LabeledGraph a = generate_random(6, 2, 500, 7);
    const LabeledGraph b = generate_random(6, 2, 500, 7);
    CHECK(a == b);
    CHECK(write_instance(a) == write_instance(b));
    CHECK(validate(a).empty());

    const LabeledGraph c = generate_random(6, 2, 500, 8);
    CHECK_FALSE(a == c);  // one seed apart, overwhelmingly different

    CHECK(generate_random(6, 2, 0, 3).num_edges() == 0);
    CHECK(generate_random(6, 2, 1000, 3).num_edges() == 15);  // complete

    const LabeledGraph d = generate_random(30, 3, 500, 11);
    CHECK(d.num_vertices() == 30);
    for (int v : d.vertex_ids()) {
        CHECK(d.owner(v) >= 1);
        CHECK(d.owner(v) <= 3);
    }
    CHECK_THROWS_AS(generate_random(3, 2, 1001, 0), InputError);
    CHECK_THROWS_AS(generate_random(3, 2, -1, 0), InputError);
    CHECK_THROWS_AS(generate_random(3, 0, 500, 0), InputError);
}

TEST_CASE("uniform_below is unbiased-by-construction and deterministic") {
    std::mt19937_64 rng(42);
    std::mt19937_64 rng2(42);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t x = uniform_below(rng, 10);
        CHECK(x < 10);
        CHECK(x == uniform_below(rng2, 10));
    }
    std::mt19937_64 one(5);
    CHECK(uniform_below(one, 1) == 0);
    CHECK_THROWS_AS((void)uniform_below(one, 0), InputError);
}

TEST_CASE("results CSV") {
    CHECK(write_results({}) ==
          "instance_id,mechanism,bipartition,seed,opt_size,exp_num,exp_den,"
          "ratio_num,ratio_den,detail\n");

    ResultRow full;
    full.instance_id = "fig5";
    full.mechanism = "mix";
    full.bipartition = "1";
    full.seed = 7;
    full.opt_size = 2;
    full.exp_num = 1;
    full.exp_den = 1;
    full.ratio_num = 2;
    full.ratio_den = 1;
    full.detail = "plain";
    ResultRow sparse;
    sparse.instance_id = "fig3";
    sparse.mechanism = "naive";
    sparse.detail = "agent 2 hides {v5,v6}: 4 -> 6, gain \"2\"";
    const std::string csv = write_results({full, sparse});
    CHECK(csv ==
          "instance_id,mechanism,bipartition,seed,opt_size,exp_num,exp_den,"
          "ratio_num,ratio_den,detail\n"
          "fig5,mix,1,7,2,1,1,2,1,plain\n"
          "fig3,naive,,,,,,,,\"agent 2 hides {v5,v6}: 4 -> 6, gain \"\"2\"\"\"\n");
}

TEST_CASE("huge rationals persist exactly") {
    ResultRow row;
    row.instance_id = "big";
    row.mechanism = "mix";
    const Int huge = Int(1) << 100;
    row.exp_num = Int(huge * 3 + 1);
    row.exp_den = huge;
    const std::string csv = write_results({row});
    CHECK(contains(csv, Int(huge * 3 + 1).str()));
    CHECK(contains(csv, "," + huge.str() + ","));
}
