#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sisnet/estimator.hpp"
#include "sisnet/graph.hpp"
#include "sisnet/sim.hpp"

namespace sis {

/*
 * One replicated experiment on the planted-hub benchmark.
 *
 * Trial i uses seed base_seed + i. Inside a trial every random stream (the
 * initial infection, the trajectory, removal sets, post-removal arms) is
 * derived from that seed with derive_seed and a fixed tag, so results do not
 * depend on thread count or execution order.
 */
struct ExperimentSpec {
    enum class Mode { accuracy, intervention };

    Mode mode = Mode::accuracy;
    GraphSpec graph{1000, 4, 10, 100, 1};
    bool resample_graph = false; // fresh benchmark graph per trial
    EpidemicParams params{1.0, 0.5};
    double init_fraction = 0.5;
    bool force_hubs = true;
    std::vector<double> t_grid;
    std::vector<std::size_t> k_list{1};
    EstimatorConfig::Rule rule = EstimatorConfig::Rule::top_m;
    RankStatistic statistic = RankStatistic::window_max;
    std::size_t m = 10;
    double h = 0.1;
    bool baseline = true; // accuracy mode: also score the cumulative-time baseline
    std::size_t trials = 50;
    seed_t base_seed = 1;
    double post_window = 5.0;
    std::size_t removal_budget = 10;

    /// Accuracy defaults: 50 trials, T = 0.5, 1.0, ..., 20. Intervention
    /// defaults: 40 trials, same grid, 5.0 post window.
    static ExperimentSpec defaults(Mode mode);

    void validate() const;
};

/// 0.5, 1.0, ..., 20.0
std::vector<double> default_t_grid();

/*
 * Flat "key = value" config; '#' starts a comment. Unknown keys are errors.
 * Keys: mode, n_low, d, hubs, hub_degree, graph_seed, resample_graph, beta,
 * gamma, init_fraction, force_hubs, t_grid ("a,b,c" or "start:stop:step"),
 * k_list, rule (top-m | threshold), statistic (window-max | first-k), m, h,
 * baseline, trials, base_seed, post_window, removal_budget. Missing keys take
 * the mode's defaults.
 */
ExperimentSpec parse_spec(std::istream& in);
ExperimentSpec load_spec(const std::filesystem::path& path);

/// Writes every field in the config syntax; parse_spec(write_spec(s)) == s.
void write_spec(const ExperimentSpec& spec, std::ostream& out);

bool operator==(const ExperimentSpec& a, const ExperimentSpec& b);

/// One (trial, T, method, K) measurement.
struct TrialRecord {
    std::size_t trial = 0;
    seed_t seed = 0;
    std::size_t D = 0;
    double T = 0.0;
    std::string method;
    std::size_t K = 0; // 0 for methods that do not use K
    double value = 0.0;
};

struct SummaryRow {
    std::size_t D = 0;
    double T = 0.0;
    std::string method;
    std::size_t K = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
    std::size_t n_trials = 0;
};

struct ExperimentReport {
    ExperimentSpec spec;
    std::vector<TrialRecord> trials; // grouped by trial index
    std::vector<SummaryRow> summary;

    /// Summary row lookup; throws parameter_error when absent.
    const SummaryRow& row(const std::string& method, std::size_t K, double T) const;
};

/// |estimate ∩ truth| / |truth|. Throws parameter_error on an empty truth set.
double accuracy(const vertex_set& estimate, const vertex_set& truth);

struct ArmOutcome {
    std::size_t infection_events = 0;
    std::size_t final_infected = 0;
};

/// Removes `removed` from g (and from the infected set), then runs the
/// process for `window` time units.
ArmOutcome run_arm(const Graph& g, const vertex_set& infected, const vertex_set& removed,
                   const EpidemicParams& params, double window, seed_t seed);

/// Means and standard errors per (method, K, T), folded in trial order.
/// Rows are sorted by method, then K, then T.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

/*
 * Accuracy mode. Per trial one trajectory is simulated to max(T_grid); for
 * every T and K the estimator sees the log prefix [0, T]. Methods:
 *   reinfection          accuracy of the R_K estimate (top-m or threshold)
 *   baseline_cumulative  accuracy of the top-m cumulative-time ranking (K=0)
 */
ExperimentReport run_accuracy_sweep(const ExperimentSpec& spec, unsigned threads = 0);

/*
 * Intervention mode. Per trial and T the shared trajectory's state at T
 * seeds three arms, each resumed for post_window: targeted (remove the R_K
 * estimate), random (remove removal_budget uniform vertices), none. Methods:
 *   events_{targeted,random,none}       infection events in the window
 *   prevalence_{targeted,random,none}   infected count at window end
 *   comparative_reduction               events_random - events_targeted
 *   comparative_reduction_prevalence    prevalence_random - prevalence_targeted
 *   accuracy                            accuracy of the targeted set
 */
ExperimentReport run_intervention(const ExperimentSpec& spec, unsigned threads = 0);

ExperimentReport run_experiment(const ExperimentSpec& spec, unsigned threads = 0);

/*
 * trials.csv:  trial,seed,D,T,method,K,value
 * summary.csv: D,T,method,K,mean,stderr,n_trials
 *
 * Reals use the shortest representation that round-trips exactly.
 */
void write_trials_csv(const std::vector<TrialRecord>& records, std::ostream& out);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);
std::vector<TrialRecord> read_trials_csv(std::istream& in);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

} // namespace sis
