#include <doctest.h>

#include <cmath>
#include <limits>

#include "sisnet/error.hpp"
#include "sisnet/estimator.hpp"
#include "synthetic.hpp"

using namespace sis;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

NodeTimeline timeline(std::vector<double> I, std::vector<double> S)
{
    NodeTimeline tl;
    tl.infections = std::move(I);
    tl.recoveries = std::move(S);
    tl.initially_infected = !tl.infections.empty() && tl.infections.front() == 0.0;
    return tl;
}

// Timeline with the given gaps: infected at 0, each infection lasts 0.1.
NodeTimeline from_gaps(const std::vector<double>& gaps)
{
    NodeTimeline tl;
    tl.initially_infected = true;
    double t = 0.0;
    tl.infections.push_back(t);
    for (double g : gaps) {
        t += 0.1;
        tl.recoveries.push_back(t);
        t += g;
        tl.infections.push_back(t);
    }
    return tl;
}

// Log in which vertex v recovers at 1.0 and is re-infected after gaps[v];
// a negative gap means no re-infection.
EventLog one_gap_log(const std::vector<double>& gaps, double horizon)
{
    EventLog log;
    log.n = gaps.size();
    log.horizon = horizon;
    for (vertex_t v = 0; v < gaps.size(); ++v) {
        log.initial.push_back(v);
        double r = 1.0 + 1e-6 * v;
        log.events.push_back({r, v, EventKind::recovery});
        if (gaps[v] >= 0.0)
            log.events.push_back({r + gaps[v], v, EventKind::infection});
    }
    std::sort(log.events.begin(), log.events.end(),
              [](const Event& a, const Event& b) { return a.time < b.time; });
    return log;
}

} // namespace

TEST_SUITE("estimator") {

TEST_CASE("reinfection gaps")
{
    CHECK(reinfection_gaps(timeline({0, 2, 5}, {1, 4})) == std::vector<double>{1, 1});
    CHECK(reinfection_gaps(timeline({0.3}, {0.9})).empty());
    CHECK(reinfection_gaps(timeline({0, 1, 2, 3}, {0.5, 1.5, 2.5})) ==
          std::vector<double>{0.5, 0.5, 0.5});
    CHECK(reinfection_gaps(timeline({}, {})).empty());
}

TEST_CASE("malformed timelines")
{
    CHECK_THROWS_AS(reinfection_gaps(timeline({0}, {1, 2})), data_error);
    CHECK_THROWS_AS(reinfection_gaps(timeline({0, 1, 2}, {0.5})), data_error);
    CHECK_THROWS_AS(reinfection_gaps(timeline({0, 1}, {2})), data_error);
    auto tl = timeline({0.5}, {});
    tl.initially_infected = true;
    CHECK_THROWS_AS(validate_timeline(tl), data_error);
}

TEST_CASE("r_k")
{
    auto tl = from_gaps({1, 3, 2});
    CHECK(*r_k(tl, 2) == doctest::Approx(3));
    CHECK_FALSE(r_k(tl, 5).has_value());
    CHECK(*r_k(from_gaps({0.4}), 1) == doctest::Approx(0.4));
    CHECK_THROWS_AS(r_k(tl, 0), parameter_error);

    CHECK(*r_k(tl, 1) == doctest::Approx(1));
    CHECK(*window_max_gap(tl, 1) == doctest::Approx(3));
    CHECK_FALSE(window_max_gap(tl, 4).has_value());
    CHECK(*score(tl, 1, RankStatistic::first_k) == *r_k(tl, 1));
    CHECK(*score(tl, 1, RankStatistic::window_max) == *window_max_gap(tl, 1));
}

TEST_CASE("brute-force agreement on random logs")
{
    auto rng = make_rng(2024);
    for (int rep = 0; rep < 200; ++rep) {
        auto log = testing::random_log(20, 4.0, rng);
        auto expect = testing::brute_gaps(log);
        auto tls = node_timelines(log);
        for (vertex_t v = 0; v < log.n; ++v) {
            auto gaps = reinfection_gaps(tls[v]);
            REQUIRE(gaps.size() == expect[v].size());
            for (std::size_t i = 0; i < gaps.size(); ++i)
                REQUIRE(gaps[i] == expect[v][i]);
            for (std::size_t K = 1; K <= 4; ++K)
                REQUIRE(r_k(tls[v], K) == testing::brute_r_k(expect[v], K));
        }
    }
}

TEST_CASE("threshold rule")
{
    // Vertices 0-2 stand in for hubs: short gaps.
    auto log = one_gap_log({0.01, 0.02, 0.015, 0.3, 0.25, 0.4, -1}, 5.0);
    CHECK(estimate_threshold(log, 1, 0.1).selected == vertex_set{0, 1, 2});
    CHECK(estimate_threshold(log, 1, inf).selected == vertex_set{0, 1, 2, 3, 4, 5});
    CHECK(estimate_threshold(log, 1, inf).eligible == vertex_set{0, 1, 2, 3, 4, 5});
    CHECK(estimate_threshold(log, 2, inf).selected.empty());
    CHECK_THROWS_AS(estimate_threshold(log, 1, 0.0), parameter_error);
}

TEST_CASE("top-m rule")
{
    std::vector<double> gaps;
    for (int i = 0; i < 10; ++i)
        gaps.push_back(0.01 + 0.001 * i);
    for (int i = 0; i < 40; ++i)
        gaps.push_back(0.25 + 0.001 * i);
    auto log = one_gap_log(gaps, 5.0);
    auto est = estimate_top_m(log, 1, 10);
    CHECK(est.selected == vertex_set{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(est.eligible.size() == 50);
    CHECK(est.scores.size() == 50);

    auto small = one_gap_log({0.3, 0.1, -1}, 5.0);
    CHECK(estimate_top_m(small, 1, 10).selected == vertex_set{0, 1});

    EventLog empty;
    empty.n = 5;
    empty.horizon = 3.0;
    CHECK(estimate_top_m(empty, 1, 10).selected.empty());
}

TEST_CASE("top-m ties go to the smaller id")
{
    // All three gaps are exactly 0.25.
    EventLog exact;
    exact.n = 3;
    exact.horizon = 5.0;
    exact.initial = {0, 1, 2};
    exact.events = {{1.0, 2, EventKind::recovery}, {1.25, 2, EventKind::infection},
                    {2.0, 1, EventKind::recovery}, {2.25, 1, EventKind::infection},
                    {3.0, 0, EventKind::recovery}, {3.25, 0, EventKind::infection}};
    CHECK(estimate_top_m(exact, 1, 2).selected == vertex_set{0, 1});
}

TEST_CASE("monotonicity on random logs")
{
    auto rng = make_rng(99);
    for (int rep = 0; rep < 100; ++rep) {
        auto log = testing::random_log(30, 5.0, rng);
        for (std::size_t K = 1; K <= 3; ++K) {
            auto lo = estimate_threshold(log, K, 0.2).selected;
            auto hi = estimate_threshold(log, K, 0.6).selected;
            REQUIRE(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
            auto e1 = estimate_threshold(log, K, inf).eligible;
            auto e2 = estimate_threshold(log, K + 1, inf).eligible;
            REQUIRE(std::includes(e1.begin(), e1.end(), e2.begin(), e2.end()));
        }
    }
}

TEST_CASE("estimate dispatch")
{
    auto log = one_gap_log({0.01, 0.3, 0.2}, 5.0);
    EstimatorConfig cfg;
    cfg.K = 1;
    cfg.m = 1;
    CHECK(estimate(log, cfg).selected == vertex_set{0});
    cfg.rule = EstimatorConfig::Rule::threshold;
    cfg.h = 0.25;
    CHECK(estimate(log, cfg).selected == vertex_set{0, 2});
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(estimate(log, cfg), parameter_error);
}

TEST_CASE("theorem parameters")
{
    CHECK(theorem_k(0.5) == 6);
    CHECK(theorem_k(0.75) == 4);
    // 3 / (1 - eps) is strictly above 3 for every eps > 0.
    CHECK(theorem_k(1.0 - 1e-9) == 4);
    CHECK_THROWS_AS(theorem_k(0.0), parameter_error);
    CHECK_THROWS_AS(theorem_k(1.0), parameter_error);

    CHECK(theorem_h(10000, 0.5) == 0.1);
    CHECK(theorem_h(1, 0.3) == 1.0);
    CHECK(theorem_h(1010, 0.6667) == doctest::Approx(0.09965738107826863).epsilon(1e-14));
    CHECK_THROWS_AS(theorem_h(10, 1.2), parameter_error);
}

TEST_CASE("cumulative infection time")
{
    CHECK(cumulative_infection_time(timeline({0, 2}, {1, 4}), 3.0) == doctest::Approx(2.0));
    CHECK(cumulative_infection_time(timeline({}, {}), 3.0) == 0.0);
    CHECK(cumulative_infection_time(timeline({19.5}, {}), 20.0) == doctest::Approx(0.5));
}

TEST_CASE("cumulative baseline")
{
    auto log = one_gap_log({0.5, 2.0, -1, 0.1}, 5.0);
    // Infected time: v0 1+3.5, v1 1+2, v2 1, v3 1+3.9
    auto est = baseline_cumulative(log, 2, 5.0);
    CHECK(est.selected == vertex_set{0, 3});
    CHECK(baseline_cumulative(log, 2, 0.0).selected.empty());
    CHECK_THROWS_AS(baseline_cumulative(log, 2, 6.0), parameter_error);
}

}
