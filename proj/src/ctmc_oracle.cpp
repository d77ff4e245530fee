#include "sisnet/ctmc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sisnet/error.hpp"

namespace sis::oracle {

state_t state_of(const vertex_set& infected)
{
    state_t s = 0;
    for (auto v : infected) {
        if (v >= max_vertices)
            throw capacity_error("vertex " + std::to_string(v) + " beyond oracle capacity");
        s |= state_t{1} << v;
    }
    return s;
}

GeneratorMatrix::GeneratorMatrix(std::size_t vertices, std::vector<double> entries)
    : vertices_(vertices), dim_(std::size_t{1} << vertices), entries_(std::move(entries))
{
    if (entries_.size() != dim_ * dim_)
        throw parameter_error("generator entry count does not match 2^n x 2^n");
}

GeneratorMatrix build_generator(const Graph& g, const EpidemicParams& params)
{
    params.validate();
    const auto n = g.size();
    if (n > max_vertices)
        throw capacity_error("oracle supports at most " + std::to_string(max_vertices) +
                             " vertices, graph has " + std::to_string(n));
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> q(dim * dim, 0.0);
    for (state_t a = 0; a < dim; ++a) {
        double out = 0.0;
        for (vertex_t v = 0; v < n; ++v) {
            state_t bit = state_t{1} << v;
            double rate;
            if (a & bit) {
                rate = params.gamma;
            } else {
                int infected_nb = 0;
                for (auto u : g.neighbors(v))
                    infected_nb += (a >> u) & 1u;
                rate = params.beta * infected_nb;
            }
            if (rate > 0.0) {
                q[a * dim + (a ^ bit)] = rate;
                out += rate;
            }
        }
        q[a * dim + a] = -out;
    }
    return GeneratorMatrix(n, std::move(q));
}

namespace {

struct sparse_row {
    std::vector<std::pair<state_t, double>> entries;
};

} // namespace

std::vector<double> transient_uniformization(const GeneratorMatrix& gen, state_t init, double t)
{
    if (!(t >= 0.0))
        throw parameter_error("time must be >= 0");
    const auto dim = gen.dim();
    if (init >= dim)
        throw parameter_error("initial state out of range");

    double lambda = 0.0;
    for (state_t i = 0; i < dim; ++i)
        lambda = std::max(lambda, -gen(i, i));

    std::vector<double> p(dim, 0.0);
    p[init] = 1.0;
    if (lambda == 0.0 || t == 0.0)
        return p;

    // P = I + Q / lambda, stored by row
    std::vector<sparse_row> rows(dim);
    for (state_t i = 0; i < dim; ++i)
        for (state_t j = 0; j < dim; ++j) {
            double x = gen(i, j) / lambda + (i == j ? 1.0 : 0.0);
            if (x != 0.0)
                rows[i].entries.emplace_back(j, x);
        }

    constexpr double max_step_mass = 16.0;
    constexpr double tail = 1e-14;
    auto steps = static_cast<std::size_t>(std::ceil(lambda * t / max_step_mass));
    double lt = lambda * t / static_cast<double>(steps);

    std::vector<double> term(dim), next(dim), acc(dim);
    for (std::size_t s = 0; s < steps; ++s) {
        term = p;
        double weight = std::exp(-lt);
        double mass = weight;
        for (std::size_t i = 0; i < dim; ++i)
            acc[i] = weight * term[i];
        for (std::size_t k = 1; 1.0 - mass > tail && k < 10000; ++k) {
            std::fill(next.begin(), next.end(), 0.0);
            for (state_t i = 0; i < dim; ++i) {
                if (term[i] == 0.0)
                    continue;
                for (auto [j, x] : rows[i].entries)
                    next[j] += term[i] * x;
            }
            term.swap(next);
            weight *= lt / static_cast<double>(k);
            mass += weight;
            for (std::size_t i = 0; i < dim; ++i)
                acc[i] += weight * term[i];
        }
        p = acc;
    }
    return p;
}

std::vector<double> transient_series(const GeneratorMatrix& gen, state_t init, double t)
{
    if (!(t >= 0.0))
        throw parameter_error("time must be >= 0");
    if (gen.vertices() > 8)
        throw capacity_error("series method limited to 8 vertices");
    const auto dim = gen.dim();
    if (init >= dim)
        throw parameter_error("initial state out of range");

    auto matmul = [dim](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> c(dim * dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t k = 0; k < dim; ++k) {
                double x = a[i * dim + k];
                if (x == 0.0)
                    continue;
                for (std::size_t j = 0; j < dim; ++j)
                    c[i * dim + j] += x * b[k * dim + j];
            }
        return c;
    };

    double norm = 0.0; // max absolute row sum of tQ
    for (std::size_t i = 0; i < dim; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < dim; ++j)
            row += std::abs(gen(static_cast<state_t>(i), static_cast<state_t>(j)));
        norm = std::max(norm, row * t);
    }
    int squarings = 0;
    while (norm > 0.25) {
        norm /= 2.0;
        ++squarings;
    }
    double scale = t / std::ldexp(1.0, squarings);

    std::vector<double> a(dim * dim);
    for (std::size_t i = 0; i < dim * dim; ++i)
        a[i] = gen.entries()[i] * scale;

    std::vector<double> result(dim * dim, 0.0), term(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
        result[i * dim + i] = term[i * dim + i] = 1.0;
    // ||A|| <= 1/4 so 20 terms leave a remainder below 1e-30
    for (int k = 1; k <= 20; ++k) {
        term = matmul(term, a);
        for (auto& x : term)
            x /= k;
        for (std::size_t i = 0; i < dim * dim; ++i)
            result[i] += term[i];
    }
    for (int s = 0; s < squarings; ++s)
        result = matmul(result, result);

    return {result.begin() + static_cast<std::ptrdiff_t>(init * dim),
            result.begin() + static_cast<std::ptrdiff_t>((init + 1) * dim)};
}

double marginal(const std::vector<double>& dist, vertex_t v)
{
    double p = 0.0;
    for (state_t s = 0; s < dist.size(); ++s)
        if ((s >> v) & 1u)
            p += dist[s];
    return p;
}

double marginal_infection_prob(const GeneratorMatrix& gen, state_t init, double t, vertex_t v)
{
    if (v >= gen.vertices())
        throw parameter_error("vertex out of range");
    return marginal(transient_uniformization(gen, init, t), v);
}

std::vector<double> marginals(const GeneratorMatrix& gen, state_t init, double t)
{
    auto dist = transient_uniformization(gen, init, t);
    std::vector<double> out(gen.vertices());
    for (vertex_t v = 0; v < gen.vertices(); ++v)
        out[v] = marginal(dist, v);
    return out;
}

} // namespace sis::oracle
