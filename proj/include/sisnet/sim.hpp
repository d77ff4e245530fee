#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <vector>

#include "sisnet/graph.hpp"
#include "sisnet/rng.hpp"

namespace sis {

struct EpidemicParams {
    double beta = 1.0;  // per infected neighbor per unit time
    double gamma = 0.5; // per unit time

    /// Throws parameter_error unless both rates are finite and positive.
    void validate() const;
};

/// How the infected set at time zero is chosen.
struct InitialCondition {
    enum class Mode { explicit_set, random_fraction_plus_hubs };

    Mode mode = Mode::explicit_set;
    vertex_set infected;     // explicit_set only
    double fraction = 0.0;   // random_fraction_plus_hubs only
    bool force_hubs = false; // union with the graph's hub labels
    seed_t seed = 0;

    static InitialCondition explicit_set(vertex_set v);
    static InitialCondition random_fraction(double fraction, bool force_hubs, seed_t seed);
};

/// Resolves an initial condition on g. The random mode samples
/// floor(fraction * active_count) active vertices without replacement, then
/// adds the hubs when force_hubs is set. Throws parameter_error or
/// state_error if the result would infect a missing or inactive vertex.
vertex_set resolve_initial(const Graph& g, const InitialCondition& init);

enum class EventKind : char { infection = 'I', recovery = 'R' };

struct Event {
    double time;
    vertex_t vertex;
    EventKind kind;

    friend bool operator==(const Event&, const Event&) = default;
};

/*
 * Everything observed in [0, horizon]: the infected set at time zero and the
 * time-ordered infection/recovery events. Event times are strictly
 * increasing. A vertex is infected on [I_k, S_k): infected at its infection
 * timestamp and susceptible at its recovery timestamp.
 */
struct EventLog {
    double horizon = 0.0;
    std::size_t n = 0;
    vertex_set initial;
    std::vector<Event> events;

    /// The log restricted to [0, t]. Throws parameter_error if t is outside
    /// [0, horizon].
    EventLog prefix(double t) const;

    std::size_t infection_count() const;

    friend bool operator==(const EventLog&, const EventLog&) = default;
};

/// Infected set at time t (half-open infection intervals).
vertex_set infected_at(const EventLog& log, double t);

struct SimOptions {
    /// Vertices that are infected from time zero and never recover. Used to
    /// pin a known infection pressure in rate tests.
    vertex_set frozen;
    /// Recount infected neighbors from scratch after every event and throw
    /// internal_error on mismatch. Quadratic; tests only.
    bool check_counts = false;
};

/// Exact sample path of the SIS Markov chain on g over [0, horizon]. The
/// horizon may be +infinity, in which case the run ends at extinction.
EventLog simulate(const Graph& g, const EpidemicParams& params, const InitialCondition& init,
                  double horizon, seed_t seed, const SimOptions& options = {});

/// Continues the process from `infected` for `extra` time units. Event times
/// in the returned log are offsets in [0, extra]. Throws state_error if an
/// infected vertex is inactive in g.
EventLog resume(const Graph& g, const vertex_set& infected, const EpidemicParams& params,
                double extra, seed_t seed);

/*
 * Event-log text format:
 *
 *   T=<horizon> n=<vertices>
 *   #init v1 v2 ...
 *   <time> <vertex> <I|R>
 *
 * Times are written with 17 significant digits so a save/load round trip is
 * exact. An infinite horizon is written as "inf".
 */
void write_event_log(const EventLog& log, std::ostream& out);
EventLog parse_event_log(std::istream& in);
void save_event_log(const EventLog& log, const std::filesystem::path& path);
EventLog load_event_log(const std::filesystem::path& path);

} // namespace sis
