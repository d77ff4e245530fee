#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sisnet/graph.hpp"
#include "sisnet/sim.hpp"

namespace sis {

/*
 * Infection and recovery times of one vertex inside the observation window.
 * An initially infected vertex has infections[0] == 0. Valid timelines
 * satisfy I_1 <= S_1 <= I_2 <= S_2 <= ... with at most one open (unrecovered)
 * infection at the end.
 */
struct NodeTimeline {
    vertex_t vertex = 0;
    std::vector<double> infections;
    std::vector<double> recoveries;
    bool initially_infected = false;
};

/// Splits a log into one timeline per vertex, indexed by vertex id.
std::vector<NodeTimeline> node_timelines(const EventLog& log);

/// Throws data_error unless the timeline alternates infection/recovery.
void validate_timeline(const NodeTimeline& tl);

/// I_{k+1} - S_k for every k where both are observed, in order.
std::vector<double> reinfection_gaps(const NodeTimeline& tl);

/// Largest of the first K re-infection gaps, or nullopt when fewer than K
/// gaps were observed.
std::optional<double> r_k(const NodeTimeline& tl, std::size_t K);

/*
 * Per-vertex score used by the estimators. Both require at least K observed
 * gaps (I_{K+1} <= T).
 *   first_k     R_K: the largest of the first K gaps.
 *   window_max  the largest gap observed anywhere in the window. Keeps
 *               sharpening as T grows; this is what the ranking experiments
 *               use.
 */
enum class RankStatistic { first_k, window_max };

/// Largest of all observed gaps, or nullopt when fewer than K were observed.
std::optional<double> window_max_gap(const NodeTimeline& tl, std::size_t K);

std::optional<double> score(const NodeTimeline& tl, std::size_t K, RankStatistic stat);

struct EstimatorConfig {
    enum class Rule { threshold, top_m };

    std::size_t K = 1;
    Rule rule = Rule::top_m;
    RankStatistic statistic = RankStatistic::first_k;
    double h = 0.0;       // threshold rule
    std::size_t m = 10;   // top-m rule
    std::optional<double> alpha;

    void validate() const;
};

struct Estimate {
    vertex_set selected;                            // subset of eligible
    std::vector<std::pair<vertex_t, double>> scores; // one per eligible vertex, by id
    vertex_set eligible;
};

/// Vertices infected more than K times with R_K <= h.
Estimate estimate_threshold(const EventLog& log, std::size_t K, double h,
                            RankStatistic stat = RankStatistic::first_k);

/// The m eligible vertices with smallest R_K; ties go to the smaller id.
Estimate estimate_top_m(const EventLog& log, std::size_t K, std::size_t m,
                        RankStatistic stat = RankStatistic::first_k);

Estimate estimate(const EventLog& log, const EstimatorConfig& config);

/// ceil(3 / alpha), the re-infection count that makes false positives vanish.
std::size_t theorem_k(double alpha);

/// n^(-alpha/2), the matching threshold.
double theorem_h(std::size_t n, double alpha);

/// Total infected time of v within [0, T].
double cumulative_infection_time(const NodeTimeline& tl, double T);

/*
 * Baseline ranking by cumulative infected time in [0, T]. Vertices that were
 * never infected in the window carry no information and are not eligible.
 * The m largest are selected; ties go to the smaller id.
 */
Estimate baseline_cumulative(const EventLog& log, std::size_t m, double T);

} // namespace sis
