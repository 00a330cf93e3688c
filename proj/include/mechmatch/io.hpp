#pragma once

// Instance serialization (JSON), deterministic generators including the
// bundled named fixtures, and results persistence (CSV).

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mechmatch/graph.hpp"

namespace mechmatch {

// Optional descriptive fields carried by an instance file.
struct InstanceMeta {
    std::optional<std::string> name;
    std::optional<std::string> provenance;
};

// Parses an instance file. Rejects malformed bytes with an InputError whose
// message pinpoints the offending element (JSON byte offset or field path);
// the resulting graph always passes validate(). If `meta` is non-null the
// optional name/provenance fields are returned through it.
LabeledGraph read_instance(const std::string& bytes, InstanceMeta* meta = nullptr);

// Serializes a graph (and optional metadata) to canonical JSON bytes.
// write_instance and read_instance round-trip exactly: parsing the output
// and re-serializing reproduces it byte for byte.
std::string write_instance(const LabeledGraph& g, const InstanceMeta& meta = {});

// Named fixture graphs used throughout the test and audit suites:
//   fig1a  7-vertex path, 2 agents      fig1b  fig1a minus {5,6}
//   fig1c  fig1a minus {2,3}            fig2   14-vertex path, 3 agents
//   fig3   10-vertex path, 3 agents     fig3b  fig3 minus {5,6}
//   fig5   4-vertex path, 2 agents      fig6   7-vertex path, 3 agents
// Throws InputError for unknown names.
LabeledGraph figure(const std::string& name);
std::vector<std::string> figure_names();

// Path graph on `num_vertices` vertices 1..k. Owners follow `owner_pattern`
// repeated cyclically (default alternates 1,2 with num_agents = 2).
LabeledGraph generate_path(int num_vertices, int num_agents,
                           const std::vector<int>& owner_pattern);

// Erdos-Renyi-style graph: vertices 1..k, owners drawn uniformly from
// 1..num_agents, each possible edge kept with probability p_permille/1000.
// Fully determined by (parameters, seed): the generator draws from an
// mt19937_64 seeded with `seed`, consuming (a) one owner draw per vertex in
// ascending id order via unbiased rejection sampling, then (b) one per-mille
// draw per vertex pair (i,j), i < j, ascending lexicographic.
LabeledGraph generate_random(int num_vertices, int num_agents, int p_permille,
                             std::uint64_t seed);

// Uniform integer in [0, n) from the low bits of successive rng outputs,
// rejecting to avoid modulo bias. Used by every seeded generator so streams
// are reproducible across platforms.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

// One row of the results CSV. Optional columns render as empty cells.
struct ResultRow {
    std::string instance_id;
    std::string mechanism;
    std::string bipartition;           // side-1 agent ids "1,3"; "-" if empty
    std::optional<std::uint64_t> seed;
    std::optional<int> opt_size;
    std::optional<Int> exp_num;        // exact expected matching size
    std::optional<Int> exp_den;
    std::optional<Int> ratio_num;      // exact approximation ratio
    std::optional<Int> ratio_den;
    std::string detail;
};

// Renders rows as CSV (RFC-4180 quoting, "\n" line ends) with the fixed
// header
// instance_id,mechanism,bipartition,seed,opt_size,exp_num,exp_den,ratio_num,ratio_den,detail
std::string write_results(const std::vector<ResultRow>& rows);

}  // namespace mechmatch
