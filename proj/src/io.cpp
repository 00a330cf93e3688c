#include "mechmatch/io.hpp"

#include <limits>
#include <sstream>

#include "json.hpp"

namespace mechmatch {

namespace {

using nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

// Figure fixtures are paths; owners are listed per vertex 1..k.
LabeledGraph path_with_owners(const std::vector<int>& owners, int num_agents) {
    LabeledGraph g;
    g.num_agents = num_agents;
    for (std::size_t i = 0; i < owners.size(); ++i)
        g.owners.emplace(static_cast<int>(i) + 1, owners[i]);
    for (std::size_t i = 1; i < owners.size(); ++i)
        g.edges.insert(make_edge(static_cast<int>(i), static_cast<int>(i) + 1));
    return g;
}

}  // namespace

LabeledGraph read_instance(const std::string& bytes, InstanceMeta* meta) {
    ordered_json j;
    try {
        j = ordered_json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("instance parse error at byte " +
                         std::to_string(e.byte) + ": " + e.what());
    }
    if (!j.is_object()) throw InputError("instance root must be a JSON object");

    auto require_field = [&](const char* key) -> const ordered_json& {
        if (!j.contains(key))
            throw InputError(std::string("instance missing field \"") + key + "\"");
        return j.at(key);
    };

    const auto& ver = require_field("schema_version");
    if (!ver.is_number_integer() || ver.get<int>() != kSchemaVersion)
        throw InputError("schema_version: expected " +
                         std::to_string(kSchemaVersion));

    LabeledGraph g;
    const auto& agents = require_field("agents");
    if (!agents.is_number_integer() || agents.get<int>() < 1)
        throw InputError("agents: must be a positive integer");
    g.num_agents = agents.get<int>();

    const auto& vertices = require_field("vertices");
    if (!vertices.is_array()) throw InputError("vertices: must be an array");
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const auto& entry = vertices[i];
        std::string where = "vertices[" + std::to_string(i) + "]";
        if (!entry.is_array() || entry.size() != 2 ||
            !entry[0].is_number_integer() || !entry[1].is_number_integer())
            throw InputError(where + ": expected [id, owner]");
        int id = entry[0].get<int>(), owner = entry[1].get<int>();
        if (id < 1) throw InputError(where + ": vertex id must be positive");
        if (owner < 1 || owner > g.num_agents)
            throw InputError(where + ": owner " + std::to_string(owner) +
                             " out of range 1.." + std::to_string(g.num_agents));
        if (!g.owners.emplace(id, owner).second)
            throw InputError(where + ": duplicate vertex id " + std::to_string(id));
    }

    const auto& edges = require_field("edges");
    if (!edges.is_array()) throw InputError("edges: must be an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& entry = edges[i];
        std::string where = "edges[" + std::to_string(i) + "]";
        if (!entry.is_array() || entry.size() != 2 ||
            !entry[0].is_number_integer() || !entry[1].is_number_integer())
            throw InputError(where + ": expected [u, v]");
        int u = entry[0].get<int>(), v = entry[1].get<int>();
        if (u == v) throw InputError(where + ": self-loop at " + std::to_string(u));
        Edge e = make_edge(u, v);
        if (!g.has_vertex(e.first) || !g.has_vertex(e.second))
            throw InputError(where + ": endpoint is not a declared vertex");
        if (!g.edges.insert(e).second)
            throw InputError(where + ": duplicate edge (" +
                             std::to_string(e.first) + "," +
                             std::to_string(e.second) + ")");
    }

    if (meta != nullptr) {
        *meta = InstanceMeta{};
        if (j.contains("name")) {
            if (!j.at("name").is_string())
                throw InputError("name: must be a string");
            meta->name = j.at("name").get<std::string>();
        }
        if (j.contains("provenance")) {
            if (!j.at("provenance").is_string())
                throw InputError("provenance: must be a string");
            meta->provenance = j.at("provenance").get<std::string>();
        }
    }

    require_valid(g);
    return g;
}

std::string write_instance(const LabeledGraph& g, const InstanceMeta& meta) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    if (meta.name) j["name"] = *meta.name;
    if (meta.provenance) j["provenance"] = *meta.provenance;
    j["agents"] = g.num_agents;
    auto vertices = ordered_json::array();
    for (const auto& [v, a] : g.owners) vertices.push_back({v, a});
    j["vertices"] = std::move(vertices);
    auto edges = ordered_json::array();
    for (const auto& [u, v] : g.edges) edges.push_back({u, v});
    j["edges"] = std::move(edges);
    return j.dump(2) + "\n";
}

LabeledGraph figure(const std::string& name) {
    if (name == "fig1a")
        return path_with_owners({1, 2, 2, 1, 1, 1, 2}, 2);
    if (name == "fig1b")
        return induced_subgraph(figure("fig1a"), {1, 2, 3, 4, 7});
    if (name == "fig1c")
        return induced_subgraph(figure("fig1a"), {1, 4, 5, 6, 7});
    if (name == "fig2")
        return path_with_owners({2, 2, 2, 1, 1, 1, 1, 3, 3, 3, 1, 1, 1, 2}, 3);
    if (name == "fig3")
        return path_with_owners({2, 3, 1, 2, 2, 2, 2, 1, 3, 2}, 3);
    if (name == "fig3b")
        return induced_subgraph(figure("fig3"), {1, 2, 3, 4, 7, 8, 9, 10});
    if (name == "fig5")
        return path_with_owners({1, 2, 2, 1}, 2);
    if (name == "fig6")
        return path_with_owners({1, 1, 1, 3, 2, 2, 2}, 3);
    throw InputError("unknown figure \"" + name + "\"");
}

std::vector<std::string> figure_names() {
    return {"fig1a", "fig1b", "fig1c", "fig2", "fig3", "fig3b", "fig5", "fig6"};
}

LabeledGraph generate_path(int num_vertices, int num_agents,
                           const std::vector<int>& owner_pattern) {
    if (num_vertices < 0) throw InputError("generate_path: negative vertex count");
    if (num_agents < 1) throw InputError("generate_path: need at least one agent");
    std::vector<int> pattern = owner_pattern.empty()
                                   ? std::vector<int>{1, 2}
                                   : owner_pattern;
    for (int a : pattern)
        if (a < 1 || a > num_agents)
            throw InputError("generate_path: owner " + std::to_string(a) +
                             " out of range");
    std::vector<int> owners(num_vertices);
    for (int i = 0; i < num_vertices; ++i)
        owners[i] = pattern[i % pattern.size()];
    return path_with_owners(owners, num_agents);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw InputError("uniform_below: empty range");
    // Reject draws from the final partial block so every value is equally
    // likely regardless of platform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

LabeledGraph generate_random(int num_vertices, int num_agents, int p_permille,
                             std::uint64_t seed) {
    if (num_vertices < 0) throw InputError("generate_random: negative vertex count");
    if (num_agents < 1) throw InputError("generate_random: need at least one agent");
    if (p_permille < 0 || p_permille > 1000)
        throw InputError("generate_random: p_permille out of range 0..1000");
    std::mt19937_64 rng(seed);
    LabeledGraph g;
    g.num_agents = num_agents;
    for (int v = 1; v <= num_vertices; ++v)
        g.owners.emplace(v, 1 + static_cast<int>(uniform_below(
                                rng, static_cast<std::uint64_t>(num_agents))));
    for (int u = 1; u <= num_vertices; ++u)
        for (int v = u + 1; v <= num_vertices; ++v)
            if (uniform_below(rng, 1000) <
                static_cast<std::uint64_t>(p_permille))
                g.edges.insert({u, v});
    return g;
}

namespace {

// RFC-4180: quote a cell iff it contains a comma, quote, or newline.
std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string int_cell(const std::optional<Int>& v) {
    return v ? v->str() : std::string{};
}

}  // namespace

std::string write_results(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "instance_id,mechanism,bipartition,seed,opt_size,exp_num,exp_den,"
           "ratio_num,ratio_den,detail\n";
    for (const ResultRow& r : rows) {
        out << csv_cell(r.instance_id) << ',' << csv_cell(r.mechanism) << ','
            << csv_cell(r.bipartition) << ','
            << (r.seed ? std::to_string(*r.seed) : std::string{}) << ','
            << (r.opt_size ? std::to_string(*r.opt_size) : std::string{}) << ','
            << int_cell(r.exp_num) << ',' << int_cell(r.exp_den) << ','
            << int_cell(r.ratio_num) << ',' << int_cell(r.ratio_den) << ','
            << csv_cell(r.detail) << '\n';
    }
    return out.str();
}

}  // namespace mechmatch
