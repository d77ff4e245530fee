#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sisnet/error.hpp"
#include "sisnet/experiments.hpp"

using namespace sis;

namespace {

ExperimentSpec small_spec(ExperimentSpec::Mode mode)
{
    auto s = ExperimentSpec::defaults(mode);
    s.graph = GraphSpec{200, 4, 5, 30, 3};
    s.t_grid = {0.0, 1.0, 2.5, 4.0};
    s.k_list = {1, 2};
    s.m = 5;
    s.removal_budget = 5;
    s.trials = 4;
    s.base_seed = 17;
    s.post_window = 2.0;
    return s;
}

std::string csv_of(const ExperimentReport& r)
{
    std::ostringstream out;
    write_trials_csv(r.trials, out);
    write_summary_csv(r.summary, out);
    return out.str();
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("accuracy ratio")
{
    vertex_set truth{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(accuracy(truth, truth) == 1.0);
    CHECK(accuracy({20, 21}, truth) == 0.0);
    CHECK(accuracy({1, 2, 3, 4, 5, 6, 7, 30, 31, 32}, truth) == doctest::Approx(0.7));
    CHECK_THROWS_AS(accuracy({1}, {}), parameter_error);

    // Adding a true hub never lowers accuracy.
    vertex_set est{1, 50};
    double before = accuracy(est, truth);
    est.push_back(2);
    CHECK(accuracy(est, truth) >= before);
}

TEST_CASE("defaults")
{
    auto a = ExperimentSpec::defaults(ExperimentSpec::Mode::accuracy);
    CHECK(a.trials == 50);
    CHECK(a.t_grid.size() == 40);
    CHECK(a.t_grid.front() == 0.5);
    CHECK(a.t_grid.back() == 20.0);
    CHECK(a.graph.n_low == 1000);
    CHECK(a.graph.D == 100);
    CHECK(a.m == 10);
    auto i = ExperimentSpec::defaults(ExperimentSpec::Mode::intervention);
    CHECK(i.trials == 40);
    CHECK(i.post_window == 5.0);
    CHECK_NOTHROW(a.validate());
}

TEST_CASE("config round trip")
{
    auto s = small_spec(ExperimentSpec::Mode::intervention);
    s.params = EpidemicParams{0.1 + 0.2, 1.0 / 3.0};
    s.statistic = RankStatistic::first_k;
    std::stringstream buf;
    write_spec(s, buf);
    CHECK(parse_spec(buf) == s);
}

TEST_CASE("config parsing")
{
    std::istringstream in("mode = accuracy\n# comment\nhub_degree = 25\nt_grid = 1:3:0.5\n"
                          "k_list = 3,4,5\nstatistic = first-k\n");
    auto s = parse_spec(in);
    CHECK(s.graph.D == 25);
    CHECK(s.t_grid == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
    CHECK(s.k_list == std::vector<std::size_t>{3, 4, 5});
    CHECK(s.statistic == RankStatistic::first_k);

    auto bad = [](const std::string& text) {
        std::istringstream is(text);
        return parse_spec(is);
    };
    CHECK_THROWS_AS(bad("mode = accuracy\ncolour = red\n"), parameter_error);
    CHECK_THROWS_AS(bad("mode = accuracy\nbeta = fast\n"), parameter_error);
    CHECK_THROWS_AS(bad("mode = accuracy\nbeta 1\n"), format_error);
    CHECK_THROWS_AS(bad("mode = accuracy\nbeta = 1\nbeta = 2\n"), format_error);
    CHECK_THROWS_AS(load_spec("/nonexistent/spec.cfg"), parameter_error);
}

TEST_CASE("validation")
{
    auto s = small_spec(ExperimentSpec::Mode::accuracy);
    s.trials = 0;
    CHECK_THROWS_AS(s.validate(), parameter_error);
    s = small_spec(ExperimentSpec::Mode::accuracy);
    s.t_grid = {2.0, 1.0};
    CHECK_THROWS_AS(s.validate(), parameter_error);
    s = small_spec(ExperimentSpec::Mode::intervention);
    s.removal_budget = 10000;
    CHECK_THROWS_AS(s.validate(), parameter_error);
    s = small_spec(ExperimentSpec::Mode::accuracy);
    CHECK_THROWS_AS(run_intervention(s), parameter_error);
}

TEST_CASE("accuracy sweep")
{
    auto s = small_spec(ExperimentSpec::Mode::accuracy);
    auto r = run_accuracy_sweep(s, 1);
    // 4 trials x 4 T x (2 K + baseline)
    CHECK(r.trials.size() == 4 * 4 * 3);
    CHECK(r.summary.size() == 4 * 3);
    for (const auto& rec : r.trials) {
        CHECK(rec.seed == s.base_seed + rec.trial);
        CHECK(rec.D == 30);
        CHECK(rec.value >= 0.0);
        CHECK(rec.value <= 1.0);
        if (rec.T == 0.0)
            CHECK(rec.value == 0.0);
    }
    CHECK(r.row("reinfection", 1, 0.0).mean == 0.0);
    CHECK(r.row("baseline_cumulative", 0, 0.0).mean == 0.0);
    CHECK(r.row("reinfection", 2, 4.0).n_trials == 4);
    CHECK_THROWS_AS(r.row("reinfection", 7, 4.0), parameter_error);
}

TEST_CASE("determinism across runs and thread counts")
{
    auto s = small_spec(ExperimentSpec::Mode::accuracy);
    auto one = csv_of(run_accuracy_sweep(s, 1));
    CHECK(one == csv_of(run_accuracy_sweep(s, 1)));
    CHECK(one == csv_of(run_accuracy_sweep(s, 3)));

    auto iv = small_spec(ExperimentSpec::Mode::intervention);
    CHECK(csv_of(run_intervention(iv, 1)) == csv_of(run_intervention(iv, 4)));

    s.trials = 1;
    CHECK(csv_of(run_accuracy_sweep(s, 1)) == csv_of(run_accuracy_sweep(s, 1)));
}

TEST_CASE("summary recomputes from persisted trials")
{
    auto r = run_intervention(small_spec(ExperimentSpec::Mode::intervention), 2);
    std::stringstream trials;
    write_trials_csv(r.trials, trials);
    auto back = read_trials_csv(trials);
    REQUIRE(back.size() == r.trials.size());

    std::ostringstream a, b;
    write_summary_csv(r.summary, a);
    write_summary_csv(summarize(back), b);
    CHECK(a.str() == b.str());

    std::istringstream sin(a.str());
    auto rows = read_summary_csv(sin);
    REQUIRE(rows.size() == r.summary.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].mean == r.summary[i].mean);
        CHECK(rows[i].stderr_mean == r.summary[i].stderr_mean);
    }
}

TEST_CASE("intervention records")
{
    auto s = small_spec(ExperimentSpec::Mode::intervention);
    auto r = run_intervention(s, 1);
    for (double T : s.t_grid)
        for (auto K : s.k_list) {
            auto events = [&](const char* m) { return r.row(m, K, T).mean; };
            CHECK(events("comparative_reduction") ==
                  doctest::Approx(events("events_random") - events("events_targeted")));
            CHECK(events("comparative_reduction_prevalence") ==
                  doctest::Approx(events("prevalence_random") - events("prevalence_targeted")));
        }
    CHECK(r.summary.front().method == "accuracy");
}

TEST_CASE("empty post window")
{
    auto s = small_spec(ExperimentSpec::Mode::intervention);
    s.post_window = 0.0;
    auto r = run_intervention(s, 1);
    for (const auto& rec : r.trials)
        if (rec.method.starts_with("events_") || rec.method == "comparative_reduction")
            CHECK(rec.value == 0.0);
}

TEST_CASE("identical removal sets give zero reduction in expectation")
{
    auto g = generate_benchmark(GraphSpec{200, 4, 5, 30, 2});
    auto log = simulate(g, {1.0, 0.5}, InitialCondition::random_fraction(0.5, true, 1), 5.0, 1);
    auto infected = infected_at(log, 5.0);
    vertex_set removed{3, 50, 120, 201};

    auto same = run_arm(g, infected, removed, {1.0, 0.5}, 3.0, 42);
    auto again = run_arm(g, infected, removed, {1.0, 0.5}, 3.0, 42);
    CHECK(same.infection_events == again.infection_events);
    CHECK(same.final_infected == again.final_infected);

    const int reps = 400;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < reps; ++i) {
        auto a = run_arm(g, infected, removed, {1.0, 0.5}, 3.0, derive_seed(7, "a", {std::uint64_t(i)}));
        auto b = run_arm(g, infected, removed, {1.0, 0.5}, 3.0, derive_seed(7, "b", {std::uint64_t(i)}));
        double d = double(b.infection_events) - double(a.infection_events);
        sum += d;
        sq += d * d;
    }
    double mean = sum / reps;
    double se = std::sqrt((sq / reps - mean * mean) / (reps - 1));
    CHECK(std::abs(mean) < 4 * se);
}

TEST_CASE("removed infected vertices stop transmitting")
{
    auto g = generate_regular(20, 4, 1);
    vertex_set all;
    for (vertex_t v = 0; v < 20; ++v)
        all.push_back(v);
    auto out = run_arm(g, all, all, {1.0, 0.5}, 10.0, 1);
    CHECK(out.infection_events == 0);
    CHECK(out.final_infected == 0);
}

}
