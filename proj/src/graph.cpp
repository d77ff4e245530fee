#include "sisnet/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "sisnet/error.hpp"

namespace sis {

Graph Graph::from_edges(std::size_t n, std::span<const std::pair<vertex_t, vertex_t>> edges,
                        vertex_set hubs, vertex_set inactive)
{
    Graph g;
    g.adjacency_.resize(n);
    g.active_.assign(n, true);
    for (auto v : inactive) {
        if (v >= n)
            throw parameter_error("inactive vertex " + std::to_string(v) + " out of range");
        g.active_[v] = false;
    }
    for (auto [u, v] : edges) {
        if (u >= n || v >= n)
            throw parameter_error("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                  ") out of range for n=" + std::to_string(n));
        if (u == v)
            throw parameter_error("self-loop at vertex " + std::to_string(u));
        if (!g.active_[u] || !g.active_[v])
            throw parameter_error("edge touches inactive vertex");
        g.adjacency_[u].push_back(v);
        g.adjacency_[v].push_back(u);
    }
    for (std::size_t v = 0; v < n; ++v) {
        auto& nb = g.adjacency_[v];
        std::sort(nb.begin(), nb.end());
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
            throw parameter_error("duplicate edge at vertex " + std::to_string(v));
    }
    std::sort(hubs.begin(), hubs.end());
    hubs.erase(std::unique(hubs.begin(), hubs.end()), hubs.end());
    if (!hubs.empty() && hubs.back() >= n)
        throw parameter_error("hub label " + std::to_string(hubs.back()) + " out of range");
    g.hubs_ = std::move(hubs);
    return g;
}

std::size_t Graph::edge_count() const
{
    std::size_t twice = 0;
    for (const auto& nb : adjacency_)
        twice += nb.size();
    return twice / 2;
}

bool Graph::has_edge(vertex_t u, vertex_t v) const
{
    const auto& nb = adjacency_[u];
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::size_t Graph::active_count() const
{
    return static_cast<std::size_t>(std::count(active_.begin(), active_.end(), true));
}

std::vector<std::pair<vertex_t, vertex_t>> Graph::edges() const
{
    std::vector<std::pair<vertex_t, vertex_t>> out;
    out.reserve(edge_count());
    for (vertex_t u = 0; u < size(); ++u)
        for (auto v : adjacency_[u])
            if (u < v)
                out.emplace_back(u, v);
    return out;
}

Graph generate_regular(std::size_t n_low, std::size_t d, seed_t seed)
{
    if (d < 1)
        throw parameter_error("regular graph degree must be >= 1");
    if (d >= n_low)
        throw parameter_error("regular graph degree " + std::to_string(d) +
                              " must be smaller than vertex count " + std::to_string(n_low));
    if ((n_low * d) % 2 != 0)
        throw parameter_error("n*d must be even for a d-regular graph");

    rng_t rng = make_rng(seed);
    std::vector<vertex_t> stubs(n_low * d);
    for (std::size_t i = 0; i < stubs.size(); ++i)
        stubs[i] = static_cast<vertex_t>(i / d);

    std::vector<std::pair<vertex_t, vertex_t>> edges(stubs.size() / 2);
    for (;;) {
        std::shuffle(stubs.begin(), stubs.end(), rng);
        bool simple = true;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            auto u = stubs[2 * i], v = stubs[2 * i + 1];
            if (u == v) {
                simple = false;
                break;
            }
            edges[i] = std::minmax(u, v);
        }
        if (!simple)
            continue;
        std::vector<std::pair<vertex_t, vertex_t>> sorted = edges;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            continue;
        return Graph::from_edges(n_low, edges);
    }
}

Graph add_hubs(const Graph& base, std::size_t m, std::size_t D, seed_t seed)
{
    if (m == 0)
        return base;
    if (D > base.size())
        throw parameter_error("hub degree " + std::to_string(D) + " exceeds base vertex count " +
                              std::to_string(base.size()));
    if (base.active_count() != base.size())
        throw parameter_error("add_hubs requires a base graph without removed vertices");

    rng_t rng = make_rng(seed);
    auto edges = base.edges();
    std::vector<vertex_t> pool(base.size());
    std::iota(pool.begin(), pool.end(), vertex_t{0});

    vertex_set hubs;
    std::vector<vertex_t> chosen;
    chosen.reserve(D);
    for (std::size_t h = 0; h < m; ++h) {
        auto hub = static_cast<vertex_t>(base.size() + h);
        hubs.push_back(hub);
        chosen.clear();
        std::sample(pool.begin(), pool.end(), std::back_inserter(chosen), D, rng);
        for (auto v : chosen)
            edges.emplace_back(v, hub);
    }

    return Graph::from_edges(base.size() + m, edges, std::move(hubs));
}

Graph generate_benchmark(const GraphSpec& spec)
{
    auto base = generate_regular(spec.n_low, spec.d, derive_seed(spec.seed, "regular"));
    return add_hubs(base, spec.m, spec.D, derive_seed(spec.seed, "hubs"));
}

Graph remove_vertices(const Graph& g, std::span<const vertex_t> removed)
{
    Graph out = g;
    if (removed.empty())
        return out;
    std::vector<bool> gone(g.size(), false);
    for (auto v : removed) {
        if (v >= g.size())
            throw parameter_error("removed vertex " + std::to_string(v) + " out of range");
        gone[v] = true;
    }
    for (vertex_t v = 0; v < g.size(); ++v) {
        auto& nb = out.adjacency_[v];
        if (gone[v]) {
            nb.clear();
            out.active_[v] = false;
        } else {
            std::erase_if(nb, [&](vertex_t u) { return gone[u]; });
        }
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Parses whitespace-separated unsigned integers; fails on anything else.
bool parse_ids(std::string_view s, std::vector<std::uint64_t>& out)
{
    out.clear();
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
            ++i;
        if (i == s.size())
            break;
        std::uint64_t x = 0;
        auto [p, ec] = std::from_chars(s.data() + i, s.data() + s.size(), x);
        if (ec != std::errc{})
            return false;
        i = static_cast<std::size_t>(p - s.data());
        if (i < s.size() && s[i] != ' ' && s[i] != '\t')
            return false;
        out.push_back(x);
    }
    return true;
}

} // namespace

Graph parse_graph(std::istream& in)
{
    std::optional<std::size_t> n;
    std::vector<std::pair<vertex_t, vertex_t>> edges;
    std::vector<std::size_t> edge_lines;
    vertex_set hubs, inactive;
    std::set<std::pair<vertex_t, vertex_t>> seen;
    std::uint64_t max_id = 0;
    bool any_id = false;

    std::string raw;
    std::size_t line_no = 0;
    std::vector<std::uint64_t> ids;
    auto check_id = [&](std::uint64_t v) {
        if (v > std::numeric_limits<vertex_t>::max())
            throw format_error("vertex id " + std::to_string(v) + " too large", line_no);
        if (n && v >= *n)
            throw format_error("vertex id " + std::to_string(v) + " out of range for n=" +
                                   std::to_string(*n),
                               line_no);
        max_id = std::max(max_id, v);
        any_id = true;
        return static_cast<vertex_t>(v);
    };

    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.starts_with("//") || line.starts_with("# "))
            continue;
        if (line.starts_with("n=")) {
            if (n || !edges.empty() || any_id)
                throw format_error("header n=... must come first and only once", line_no);
            if (!parse_ids(line.substr(2), ids) || ids.size() != 1)
                throw format_error("malformed header '" + std::string(line) + "'", line_no);
            n = static_cast<std::size_t>(ids[0]);
            continue;
        }
        if (line.starts_with("#hub") || line.starts_with("#inactive")) {
            bool hub = line.starts_with("#hub");
            auto rest = line.substr(hub ? 4 : 9);
            if (!parse_ids(rest, ids) || ids.size() != 1)
                throw format_error("malformed '" + std::string(line) + "'", line_no);
            (hub ? hubs : inactive).push_back(check_id(ids[0]));
            continue;
        }
        if (line.starts_with("#"))
            throw format_error("unknown directive '" + std::string(line) + "'", line_no);
        if (!parse_ids(line, ids) || ids.size() != 2)
            throw format_error("expected 'u v', got '" + std::string(line) + "'", line_no);
        auto u = check_id(ids[0]), v = check_id(ids[1]);
        if (u == v)
            throw format_error("self-loop at vertex " + std::to_string(u), line_no);
        if (!seen.insert(std::minmax(u, v)).second)
            throw format_error("duplicate edge " + std::to_string(u) + " " + std::to_string(v),
                               line_no);
        edges.emplace_back(u, v);
        edge_lines.push_back(line_no);
    }

    std::size_t count = n ? *n : (any_id ? static_cast<std::size_t>(max_id) + 1 : 0);
    std::sort(inactive.begin(), inactive.end());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto [u, v] = edges[i];
        if (std::binary_search(inactive.begin(), inactive.end(), u) ||
            std::binary_search(inactive.begin(), inactive.end(), v))
            throw format_error("edge touches inactive vertex", edge_lines[i]);
    }
    return Graph::from_edges(count, edges, std::move(hubs), std::move(inactive));
}

Graph load_graph(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw parameter_error("cannot open graph file '" + path.string() + "'");
    try {
        return parse_graph(in);
    } catch (const format_error& e) {
        throw format_error(path.string() + ": " + e.what());
    }
}

void write_graph(const Graph& g, std::ostream& out)
{
    out << "n=" << g.size() << '\n';
    for (auto h : g.hub_labels())
        out << "#hub " << h << '\n';
    for (vertex_t v = 0; v < g.size(); ++v)
        if (!g.is_active(v))
            out << "#inactive " << v << '\n';
    for (auto [u, v] : g.edges())
        out << u << ' ' << v << '\n';
}

void save_graph(const Graph& g, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw parameter_error("cannot write graph file '" + path.string() + "'");
    write_graph(g, out);
    if (!out)
        throw parameter_error("write failed for '" + path.string() + "'");
}

} // namespace sis
