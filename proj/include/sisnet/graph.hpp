#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sisnet/rng.hpp"

namespace sis {

using vertex_t = std::uint32_t;
using vertex_set = std::vector<vertex_t>; // sorted, unique

/*
 * Immutable undirected simple graph on vertices 0..n-1.
 *
 * Neighbor lists are sorted. Vertices can be marked inactive (removed by an
 * intervention); an inactive vertex keeps its id but has no edges, so event
 * logs and estimates stay comparable across a removal.
 */
class Graph {
public:
    Graph() = default;

    /// Builds from an edge list. Throws parameter_error on self-loops,
    /// duplicate edges, out-of-range ids or edges touching an inactive vertex.
    static Graph from_edges(std::size_t n, std::span<const std::pair<vertex_t, vertex_t>> edges,
                            vertex_set hubs = {}, vertex_set inactive = {});

    std::size_t size() const { return adjacency_.size(); }
    std::size_t edge_count() const;
    std::span<const vertex_t> neighbors(vertex_t v) const { return adjacency_[v]; }
    std::size_t degree(vertex_t v) const { return adjacency_[v].size(); }
    bool has_edge(vertex_t u, vertex_t v) const;
    bool is_active(vertex_t v) const { return active_[v]; }
    std::size_t active_count() const;
    const vertex_set& hub_labels() const { return hubs_; }

    /// Sorted (u < v) edge list.
    std::vector<std::pair<vertex_t, vertex_t>> edges() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    friend Graph remove_vertices(const Graph& g, std::span<const vertex_t> removed);

    std::vector<std::vector<vertex_t>> adjacency_;
    std::vector<bool> active_;
    vertex_set hubs_;
};

/// Parameters of the planted-hub benchmark: a random d-regular graph on
/// n_low vertices plus m hubs of degree D attached uniformly to it.
struct GraphSpec {
    std::size_t n_low = 1000;
    std::size_t d = 4;
    std::size_t m = 10;
    std::size_t D = 100;
    seed_t seed = 0;
};

/// Random simple d-regular graph via configuration-model pairing, restarting
/// from scratch whenever a self-loop or multi-edge appears.
Graph generate_regular(std::size_t n_low, std::size_t d, seed_t seed);

/// Appends m vertices, each joined to D distinct vertices of base drawn
/// uniformly without replacement. The new ids become the hub labels.
Graph add_hubs(const Graph& base, std::size_t m, std::size_t D, seed_t seed);

/// Benchmark graph for a spec. The regular base and the hubs use streams
/// derived from spec.seed.
Graph generate_benchmark(const GraphSpec& spec);

/// Induced subgraph on the complement of `removed`; ids are preserved and the
/// removed vertices become isolated and inactive.
Graph remove_vertices(const Graph& g, std::span<const vertex_t> removed);

/*
 * Edge-list text format:
 *
 *   n=<vertices>
 *   #hub <v>          (zero or more)
 *   <u> <v>           (one undirected edge per line)
 *
 * Blank lines and lines starting with "# " or "//" are ignored. The header
 * may be omitted, in which case n is one more than the largest id seen.
 * Inactive vertices are written as "#inactive <v>".
 */
Graph load_graph(const std::filesystem::path& path);
Graph parse_graph(std::istream& in);
void save_graph(const Graph& g, const std::filesystem::path& path);
void write_graph(const Graph& g, std::ostream& out);

} // namespace sis
