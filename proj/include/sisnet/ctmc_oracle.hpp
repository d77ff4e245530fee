#pragma once

#include <cstdint>
#include <vector>

#include "sisnet/graph.hpp"
#include "sisnet/sim.hpp"

namespace sis::oracle {

/// States are bitmasks of the infected set: bit v set means v is infected.
using state_t = std::uint32_t;

inline constexpr std::size_t max_vertices = 12;

state_t state_of(const vertex_set& infected);

/// Dense 2^n x 2^n rate matrix of the SIS chain. Row-major; rows sum to zero.
class GeneratorMatrix {
public:
    GeneratorMatrix(std::size_t vertices, std::vector<double> entries);

    std::size_t vertices() const { return vertices_; }
    std::size_t dim() const { return dim_; }
    double operator()(state_t from, state_t to) const { return entries_[from * dim_ + to]; }
    const std::vector<double>& entries() const { return entries_; }

private:
    std::size_t vertices_;
    std::size_t dim_;
    std::vector<double> entries_;
};

/// Throws capacity_error when g has more than max_vertices vertices.
GeneratorMatrix build_generator(const Graph& g, const EpidemicParams& params);

/*
 * p(t) = e_init * exp(t Q) by uniformization. The horizon is split into
 * steps with rate*dt <= 16 and each step's Poisson series is truncated once
 * the remaining mass drops below 1e-14, so the l1 error is far below 1e-9
 * for every horizon the tests use.
 */
std::vector<double> transient_uniformization(const GeneratorMatrix& gen, state_t init, double t);

/// p(t) via scaling-and-squaring of a truncated Taylor series of exp(tQ).
/// Dense cubic cost, so limited to 8 vertices.
std::vector<double> transient_series(const GeneratorMatrix& gen, state_t init, double t);

/// P(v infected at t) from a transient distribution.
double marginal(const std::vector<double>& dist, vertex_t v);

/// P(v in I(t)) starting from `init`, by uniformization.
double marginal_infection_prob(const GeneratorMatrix& gen, state_t init, double t, vertex_t v);

/// All per-vertex marginals at t.
std::vector<double> marginals(const GeneratorMatrix& gen, state_t init, double t);

} // namespace sis::oracle
