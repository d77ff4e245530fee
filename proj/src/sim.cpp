#include "sisnet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "sisnet/error.hpp"

namespace sis {

void EpidemicParams::validate() const
{
    if (!(std::isfinite(beta) && beta > 0.0))
        throw parameter_error("beta must be a positive finite rate");
    if (!(std::isfinite(gamma) && gamma > 0.0))
        throw parameter_error("gamma must be a positive finite rate");
}

InitialCondition InitialCondition::explicit_set(vertex_set v)
{
    InitialCondition init;
    init.mode = Mode::explicit_set;
    init.infected = std::move(v);
    return init;
}

InitialCondition InitialCondition::random_fraction(double fraction, bool force_hubs, seed_t seed)
{
    InitialCondition init;
    init.mode = Mode::random_fraction_plus_hubs;
    init.fraction = fraction;
    init.force_hubs = force_hubs;
    init.seed = seed;
    return init;
}

vertex_set resolve_initial(const Graph& g, const InitialCondition& init)
{
    vertex_set out;
    if (init.mode == InitialCondition::Mode::explicit_set) {
        out = init.infected;
    } else {
        if (!(init.fraction >= 0.0 && init.fraction <= 1.0))
            throw parameter_error("initial infected fraction must lie in [0,1]");
        std::vector<vertex_t> pool;
        pool.reserve(g.size());
        for (vertex_t v = 0; v < g.size(); ++v)
            if (g.is_active(v))
                pool.push_back(v);
        auto k = static_cast<std::size_t>(std::floor(init.fraction * static_cast<double>(pool.size())));
        rng_t rng = make_rng(init.seed);
        std::sample(pool.begin(), pool.end(), std::back_inserter(out), k, rng);
    }
    if (init.force_hubs)
        out.insert(out.end(), g.hub_labels().begin(), g.hub_labels().end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (auto v : out) {
        if (v >= g.size())
            throw parameter_error("initially infected vertex " + std::to_string(v) +
                                  " out of range for n=" + std::to_string(g.size()));
        if (!g.is_active(v))
            throw state_error("initially infected vertex " + std::to_string(v) + " is inactive");
    }
    return out;
}

EventLog EventLog::prefix(double t) const
{
    if (!(t >= 0.0 && t <= horizon))
        throw parameter_error("prefix time " + std::to_string(t) + " outside [0, " +
                              std::to_string(horizon) + "]");
    EventLog out;
    out.horizon = t;
    out.n = n;
    out.initial = initial;
    auto end = std::upper_bound(events.begin(), events.end(), t,
                                [](double x, const Event& e) { return x < e.time; });
    out.events.assign(events.begin(), end);
    return out;
}

std::size_t EventLog::infection_count() const
{
    return static_cast<std::size_t>(std::count_if(
        events.begin(), events.end(), [](const Event& e) { return e.kind == EventKind::infection; }));
}

vertex_set infected_at(const EventLog& log, double t)
{
    if (!(t >= 0.0 && t <= log.horizon))
        throw parameter_error("query time " + std::to_string(t) + " outside [0, " +
                              std::to_string(log.horizon) + "]");
    std::vector<char> state(log.n, 0);
    for (auto v : log.initial)
        state[v] = 1;
    for (const auto& e : log.events) {
        if (e.time > t)
            break;
        state[e.vertex] = e.kind == EventKind::infection ? 1 : 0;
    }
    vertex_set out;
    for (vertex_t v = 0; v < log.n; ++v)
        if (state[v])
            out.push_back(v);
    return out;
}

namespace {

// Fenwick tree over non-negative integer weights with weighted sampling.
class fenwick {
public:
    explicit fenwick(std::size_t n) : tree_(n + 1, 0)
    {
        top_ = 1;
        while (top_ * 2 <= n)
            top_ *= 2;
    }

    void add(std::size_t i, std::int64_t delta)
    {
        total_ += delta;
        for (++i; i < tree_.size(); i += i & (~i + 1))
            tree_[i] += delta;
    }

    std::int64_t total() const { return total_; }

    // Smallest index i with prefix_sum(i) > r, for r in [0, total).
    std::size_t find(std::int64_t r) const
    {
        std::size_t pos = 0;
        for (std::size_t step = top_; step > 0; step /= 2) {
            auto next = pos + step;
            if (next < tree_.size() && tree_[next] <= r) {
                pos = next;
                r -= tree_[next];
            }
        }
        return pos;
    }

private:
    std::vector<std::int64_t> tree_;
    std::size_t top_ = 1;
    std::int64_t total_ = 0;
};

// Exp(rate) via inversion on a (0,1] uniform built from 53 random bits.
double sample_exponential(rng_t& rng, double rate)
{
    double u = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
    return -std::log(u) / rate;
}

class sis_process {
public:
    sis_process(const Graph& g, const EpidemicParams& params, const vertex_set& initial,
                const SimOptions& options)
        : g_(g), params_(params), check_(options.check_counts), infected_(g.size(), 0),
          frozen_(g.size(), 0), pressure_(g.size(), 0), pos_(g.size(), npos), weights_(g.size())
    {
        for (auto v : options.frozen)
            frozen_[v] = 1;
        for (auto v : initial)
            infect(v);
        for (auto v : options.frozen)
            if (!infected_[v])
                infect(v);
    }

    EventLog run(double horizon, rng_t& rng)
    {
        EventLog log;
        log.horizon = horizon;
        log.n = g_.size();
        for (vertex_t v = 0; v < g_.size(); ++v)
            if (infected_[v])
                log.initial.push_back(v);

        double t = 0.0;
        for (;;) {
            double recovery_rate = params_.gamma * static_cast<double>(recoverable_.size());
            double infection_rate = params_.beta * static_cast<double>(weights_.total());
            double total = recovery_rate + infection_rate;
            if (total <= 0.0)
                break;
            double next = t + sample_exponential(rng, total);
            if (next > horizon)
                break;
            if (next <= t)
                throw internal_error("event time tie at t=" + std::to_string(t));
            t = next;

            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            if (u < recovery_rate) {
                auto idx = std::uniform_int_distribution<std::size_t>(0, recoverable_.size() - 1)(rng);
                vertex_t v = recoverable_[idx];
                recover(v);
                log.events.push_back({t, v, EventKind::recovery});
            } else {
                auto r = std::uniform_int_distribution<std::int64_t>(0, weights_.total() - 1)(rng);
                auto v = static_cast<vertex_t>(weights_.find(r));
                if (infected_[v] || pressure_[v] == 0)
                    throw internal_error("infection sampled for ineligible vertex");
                infect(v);
                log.events.push_back({t, v, EventKind::infection});
            }
            if (check_)
                verify_counts();
        }
        return log;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    void infect(vertex_t v)
    {
        infected_[v] = 1;
        weights_.add(v, -static_cast<std::int64_t>(pressure_[v]));
        if (!frozen_[v]) {
            pos_[v] = recoverable_.size();
            recoverable_.push_back(v);
        }
        for (auto u : g_.neighbors(v)) {
            ++pressure_[u];
            if (!infected_[u])
                weights_.add(u, 1);
        }
    }

    void recover(vertex_t v)
    {
        infected_[v] = 0;
        weights_.add(v, static_cast<std::int64_t>(pressure_[v]));
        auto p = pos_[v];
        recoverable_[p] = recoverable_.back();
        pos_[recoverable_[p]] = p;
        recoverable_.pop_back();
        pos_[v] = npos;
        for (auto u : g_.neighbors(v)) {
            --pressure_[u];
            if (!infected_[u])
                weights_.add(u, -1);
        }
    }

    void verify_counts() const
    {
        std::int64_t total = 0;
        for (vertex_t v = 0; v < g_.size(); ++v) {
            std::uint32_t c = 0;
            for (auto u : g_.neighbors(v))
                c += infected_[u];
            if (c != pressure_[v])
                throw internal_error("infected-neighbor count mismatch at vertex " + std::to_string(v));
            if (!infected_[v])
                total += c;
        }
        if (total != weights_.total())
            throw internal_error("infection weight total mismatch");
    }

    const Graph& g_;
    EpidemicParams params_;
    bool check_;
    std::vector<char> infected_;
    std::vector<char> frozen_;
    std::vector<std::uint32_t> pressure_; // infected neighbors per vertex
    std::vector<std::size_t> pos_;        // index into recoverable_
    std::vector<vertex_t> recoverable_;   // infected and not frozen
    fenwick weights_;                     // pressure of susceptible vertices
};

} // namespace

EventLog simulate(const Graph& g, const EpidemicParams& params, const InitialCondition& init,
                  double horizon, seed_t seed, const SimOptions& options)
{
    params.validate();
    if (!(horizon >= 0.0))
        throw parameter_error("horizon must be >= 0");
    auto initial = resolve_initial(g, init);
    for (auto v : options.frozen) {
        if (v >= g.size())
            throw parameter_error("frozen vertex out of range");
        if (!g.is_active(v))
            throw state_error("frozen vertex " + std::to_string(v) + " is inactive");
    }
    rng_t rng = make_rng(seed);
    sis_process proc(g, params, initial, options);
    return proc.run(horizon, rng);
}

EventLog resume(const Graph& g, const vertex_set& infected, const EpidemicParams& params,
                double extra, seed_t seed)
{
    for (auto v : infected) {
        if (v >= g.size())
            throw parameter_error("infected vertex " + std::to_string(v) + " out of range");
        if (!g.is_active(v))
            throw state_error("cannot resume with inactive vertex " + std::to_string(v) +
                              " infected");
    }
    return simulate(g, params, InitialCondition::explicit_set(infected), extra, seed);
}

} // namespace sis
