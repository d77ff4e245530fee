#include "sisnet/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sisnet/error.hpp"

namespace sis {

std::vector<NodeTimeline> node_timelines(const EventLog& log)
{
    std::vector<NodeTimeline> out(log.n);
    for (vertex_t v = 0; v < log.n; ++v)
        out[v].vertex = v;
    for (auto v : log.initial) {
        out[v].initially_infected = true;
        out[v].infections.push_back(0.0);
    }
    for (const auto& e : log.events) {
        auto& tl = out[e.vertex];
        (e.kind == EventKind::infection ? tl.infections : tl.recoveries).push_back(e.time);
    }
    return out;
}

void validate_timeline(const NodeTimeline& tl)
{
    const auto& I = tl.infections;
    const auto& S = tl.recoveries;
    if (S.size() > I.size() || I.size() > S.size() + 1)
        throw data_error("vertex " + std::to_string(tl.vertex) + ": " + std::to_string(I.size()) +
                         " infections and " + std::to_string(S.size()) +
                         " recoveries cannot alternate");
    if (tl.initially_infected && (I.empty() || I.front() != 0.0))
        throw data_error("vertex " + std::to_string(tl.vertex) +
                         ": initially infected but I_1 != 0");
    for (std::size_t k = 0; k < S.size(); ++k) {
        if (S[k] < I[k])
            throw data_error("vertex " + std::to_string(tl.vertex) + ": S_" +
                             std::to_string(k + 1) + " precedes I_" + std::to_string(k + 1));
        if (k + 1 < I.size() && I[k + 1] < S[k])
            throw data_error("vertex " + std::to_string(tl.vertex) + ": I_" +
                             std::to_string(k + 2) + " precedes S_" + std::to_string(k + 1));
    }
}

std::vector<double> reinfection_gaps(const NodeTimeline& tl)
{
    validate_timeline(tl);
    std::vector<double> gaps;
    if (tl.infections.size() < 2)
        return gaps;
    gaps.reserve(tl.infections.size() - 1);
    for (std::size_t k = 0; k + 1 < tl.infections.size(); ++k)
        gaps.push_back(tl.infections[k + 1] - tl.recoveries[k]);
    return gaps;
}

std::optional<double> r_k(const NodeTimeline& tl, std::size_t K)
{
    if (K < 1)
        throw parameter_error("K must be >= 1");
    auto gaps = reinfection_gaps(tl);
    if (gaps.size() < K)
        return std::nullopt;
    return *std::max_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(K));
}

std::optional<double> window_max_gap(const NodeTimeline& tl, std::size_t K)
{
    if (K < 1)
        throw parameter_error("K must be >= 1");
    auto gaps = reinfection_gaps(tl);
    if (gaps.size() < K)
        return std::nullopt;
    return *std::max_element(gaps.begin(), gaps.end());
}

std::optional<double> score(const NodeTimeline& tl, std::size_t K, RankStatistic stat)
{
    return stat == RankStatistic::first_k ? r_k(tl, K) : window_max_gap(tl, K);
}

void EstimatorConfig::validate() const
{
    if (K < 1)
        throw parameter_error("K must be >= 1");
    if (rule == Rule::threshold && !(h > 0.0))
        throw parameter_error("threshold h must be > 0");
    if (rule == Rule::top_m && m < 1)
        throw parameter_error("ranking size m must be >= 1");
    if (alpha && !(*alpha > 0.0 && *alpha < 1.0))
        throw parameter_error("alpha must lie in (0,1)");
}

namespace {

// Eligible vertices (I_{K+1} observed) and their scores, by vertex id.
std::vector<std::pair<vertex_t, double>> score_eligible(const EventLog& log, std::size_t K,
                                                        RankStatistic stat)
{
    if (K < 1)
        throw parameter_error("K must be >= 1");
    std::vector<std::pair<vertex_t, double>> scores;
    for (const auto& tl : node_timelines(log))
        if (auto r = score(tl, K, stat))
            scores.emplace_back(tl.vertex, *r);
    return scores;
}

vertex_set ids_of(const std::vector<std::pair<vertex_t, double>>& scores)
{
    vertex_set out;
    out.reserve(scores.size());
    for (const auto& [v, s] : scores)
        out.push_back(v);
    return out;
}

// First m entries under `before`, returned sorted by id.
template <typename Less>
vertex_set select_best(std::vector<std::pair<vertex_t, double>> ranked, std::size_t m, Less before)
{
    auto k = std::min(m, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(),
                      before);
    vertex_set out;
    for (std::size_t i = 0; i < k; ++i)
        out.push_back(ranked[i].first);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

Estimate estimate_threshold(const EventLog& log, std::size_t K, double h, RankStatistic stat)
{
    if (!(h > 0.0))
        throw parameter_error("threshold h must be > 0");
    Estimate est;
    est.scores = score_eligible(log, K, stat);
    est.eligible = ids_of(est.scores);
    for (const auto& [v, s] : est.scores)
        if (s <= h)
            est.selected.push_back(v);
    return est;
}

Estimate estimate_top_m(const EventLog& log, std::size_t K, std::size_t m, RankStatistic stat)
{
    if (m < 1)
        throw parameter_error("ranking size m must be >= 1");
    Estimate est;
    est.scores = score_eligible(log, K, stat);
    est.eligible = ids_of(est.scores);
    est.selected = select_best(est.scores, m, [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    return est;
}

Estimate estimate(const EventLog& log, const EstimatorConfig& config)
{
    config.validate();
    if (config.rule == EstimatorConfig::Rule::threshold)
        return estimate_threshold(log, config.K, config.h, config.statistic);
    return estimate_top_m(log, config.K, config.m, config.statistic);
}

std::size_t theorem_k(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw parameter_error("alpha must lie in (0,1)");
    return static_cast<std::size_t>(std::ceil(3.0 / alpha));
}

double theorem_h(std::size_t n, double alpha)
{
    if (n < 1)
        throw parameter_error("n must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw parameter_error("alpha must lie in (0,1)");
    return 1.0 / std::pow(static_cast<double>(n), alpha / 2.0);
}

double cumulative_infection_time(const NodeTimeline& tl, double T)
{
    double total = 0.0;
    for (std::size_t k = 0; k < tl.infections.size(); ++k) {
        double start = tl.infections[k];
        if (start >= T)
            break;
        double end = k < tl.recoveries.size() ? std::min(tl.recoveries[k], T) : T;
        total += end - start;
    }
    return total;
}

Estimate baseline_cumulative(const EventLog& log, std::size_t m, double T)
{
    if (m < 1)
        throw parameter_error("ranking size m must be >= 1");
    if (!(T >= 0.0 && T <= log.horizon))
        throw parameter_error("baseline horizon outside [0, log horizon]");
    Estimate est;
    for (const auto& tl : node_timelines(log)) {
        double c = cumulative_infection_time(tl, T);
        if (c > 0.0)
            est.scores.emplace_back(tl.vertex, c);
    }
    est.eligible = ids_of(est.scores);
    est.selected = select_best(est.scores, m, [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    return est;
}

} // namespace sis
