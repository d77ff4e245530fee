#include "sisnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "sisnet/error.hpp"

namespace sis {

namespace {

std::string fmt_real(double x)
{
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

std::string_view trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_real(std::string_view s, const std::string& what)
{
    s = trim(s);
    double x = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        throw parameter_error(what + ": expected a number, got '" + std::string(s) + "'");
    return x;
}

std::uint64_t to_uint(std::string_view s, const std::string& what)
{
    s = trim(s);
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        throw parameter_error(what + ": expected a non-negative integer, got '" + std::string(s) +
                              "'");
    return x;
}

bool to_bool(std::string_view s, const std::string& what)
{
    s = trim(s);
    if (s == "true" || s == "1" || s == "yes")
        return true;
    if (s == "false" || s == "0" || s == "no")
        return false;
    throw parameter_error(what + ": expected true/false, got '" + std::string(s) + "'");
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

std::vector<double> parse_grid(std::string_view s)
{
    s = trim(s);
    if (s.find(':') != std::string_view::npos) {
        auto parts = split(s, ':');
        if (parts.size() != 3)
            throw parameter_error("t_grid range must be start:stop:step");
        double start = to_real(parts[0], "t_grid"), stop = to_real(parts[1], "t_grid"),
               step = to_real(parts[2], "t_grid");
        if (!(step > 0.0) || stop < start)
            throw parameter_error("t_grid range needs step > 0 and stop >= start");
        auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        std::vector<double> grid;
        for (std::size_t i = 0; i < count; ++i)
            grid.push_back(start + static_cast<double>(i) * step);
        return grid;
    }
    std::vector<double> grid;
    for (auto part : split(s, ','))
        grid.push_back(to_real(part, "t_grid"));
    return grid;
}

const char* mode_name(ExperimentSpec::Mode m)
{
    return m == ExperimentSpec::Mode::accuracy ? "accuracy" : "intervention";
}

const char* rule_name(EstimatorConfig::Rule r)
{
    return r == EstimatorConfig::Rule::top_m ? "top-m" : "threshold";
}

const char* statistic_name(RankStatistic s)
{
    return s == RankStatistic::window_max ? "window-max" : "first-k";
}

} // namespace

std::vector<double> default_t_grid()
{
    std::vector<double> grid;
    for (int i = 1; i <= 40; ++i)
        grid.push_back(0.5 * i);
    return grid;
}

ExperimentSpec ExperimentSpec::defaults(Mode mode)
{
    ExperimentSpec s;
    s.mode = mode;
    s.t_grid = default_t_grid();
    s.trials = mode == Mode::accuracy ? 50 : 40;
    return s;
}

void ExperimentSpec::validate() const
{
    params.validate();
    if (trials < 1)
        throw parameter_error("trials must be >= 1");
    if (t_grid.empty())
        throw parameter_error("t_grid must not be empty");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(std::isfinite(t_grid[i]) && t_grid[i] >= 0.0))
            throw parameter_error("t_grid entries must be finite and >= 0");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            throw parameter_error("t_grid must be strictly increasing");
    }
    if (k_list.empty())
        throw parameter_error("k_list must not be empty");
    for (auto k : k_list)
        if (k < 1)
            throw parameter_error("every K must be >= 1");
    if (!(init_fraction >= 0.0 && init_fraction <= 1.0))
        throw parameter_error("init_fraction must lie in [0,1]");
    if (rule == EstimatorConfig::Rule::top_m && m < 1)
        throw parameter_error("m must be >= 1");
    if (rule == EstimatorConfig::Rule::threshold && !(h > 0.0))
        throw parameter_error("h must be > 0");
    if (graph.m < 1)
        throw parameter_error("the benchmark needs at least one hub to score against");
    if (mode == Mode::intervention) {
        if (!(std::isfinite(post_window) && post_window >= 0.0))
            throw parameter_error("post_window must be finite and >= 0");
        if (removal_budget > graph.n_low + graph.m)
            throw parameter_error("removal_budget exceeds vertex count");
    }
}

ExperimentSpec parse_spec(std::istream& in)
{
    std::map<std::string, std::string, std::less<>> kv;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw format_error("expected 'key = value'", line_no);
        std::string key(trim(line.substr(0, eq)));
        if (!kv.emplace(key, std::string(trim(line.substr(eq + 1)))).second)
            throw format_error("duplicate key '" + key + "'", line_no);
    }

    auto mode = ExperimentSpec::Mode::accuracy;
    if (auto it = kv.find("mode"); it != kv.end()) {
        if (it->second == "accuracy")
            mode = ExperimentSpec::Mode::accuracy;
        else if (it->second == "intervention")
            mode = ExperimentSpec::Mode::intervention;
        else
            throw parameter_error("mode must be accuracy or intervention");
        kv.erase(it);
    }
    auto s = ExperimentSpec::defaults(mode);

    for (const auto& [key, value] : kv) {
        if (key == "n_low")
            s.graph.n_low = to_uint(value, key);
        else if (key == "d")
            s.graph.d = to_uint(value, key);
        else if (key == "hubs")
            s.graph.m = to_uint(value, key);
        else if (key == "hub_degree")
            s.graph.D = to_uint(value, key);
        else if (key == "graph_seed")
            s.graph.seed = to_uint(value, key);
        else if (key == "resample_graph")
            s.resample_graph = to_bool(value, key);
        else if (key == "beta")
            s.params.beta = to_real(value, key);
        else if (key == "gamma")
            s.params.gamma = to_real(value, key);
        else if (key == "init_fraction")
            s.init_fraction = to_real(value, key);
        else if (key == "force_hubs")
            s.force_hubs = to_bool(value, key);
        else if (key == "t_grid")
            s.t_grid = parse_grid(value);
        else if (key == "k_list") {
            s.k_list.clear();
            for (auto part : split(value, ','))
                s.k_list.push_back(to_uint(part, key));
        } else if (key == "rule") {
            if (value == "top-m")
                s.rule = EstimatorConfig::Rule::top_m;
            else if (value == "threshold")
                s.rule = EstimatorConfig::Rule::threshold;
            else
                throw parameter_error("rule must be top-m or threshold");
        } else if (key == "statistic") {
            if (value == "window-max")
                s.statistic = RankStatistic::window_max;
            else if (value == "first-k")
                s.statistic = RankStatistic::first_k;
            else
                throw parameter_error("statistic must be window-max or first-k");
        } else if (key == "m")
            s.m = to_uint(value, key);
        else if (key == "h")
            s.h = to_real(value, key);
        else if (key == "baseline")
            s.baseline = to_bool(value, key);
        else if (key == "trials")
            s.trials = to_uint(value, key);
        else if (key == "base_seed")
            s.base_seed = to_uint(value, key);
        else if (key == "post_window")
            s.post_window = to_real(value, key);
        else if (key == "removal_budget")
            s.removal_budget = to_uint(value, key);
        else
            throw parameter_error("unknown config key '" + key + "'");
    }
    s.validate();
    return s;
}

ExperimentSpec load_spec(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw parameter_error("cannot open config '" + path.string() + "'");
    try {
        return parse_spec(in);
    } catch (const format_error& e) {
        throw format_error(path.string() + ": " + e.what());
    }
}

void write_spec(const ExperimentSpec& s, std::ostream& out)
{
    out << "mode = " << mode_name(s.mode) << '\n'
        << "n_low = " << s.graph.n_low << '\n'
        << "d = " << s.graph.d << '\n'
        << "hubs = " << s.graph.m << '\n'
        << "hub_degree = " << s.graph.D << '\n'
        << "graph_seed = " << s.graph.seed << '\n'
        << "resample_graph = " << (s.resample_graph ? "true" : "false") << '\n'
        << "beta = " << fmt_real(s.params.beta) << '\n'
        << "gamma = " << fmt_real(s.params.gamma) << '\n'
        << "init_fraction = " << fmt_real(s.init_fraction) << '\n'
        << "force_hubs = " << (s.force_hubs ? "true" : "false") << '\n';
    out << "t_grid = ";
    for (std::size_t i = 0; i < s.t_grid.size(); ++i)
        out << (i ? "," : "") << fmt_real(s.t_grid[i]);
    out << "\nk_list = ";
    for (std::size_t i = 0; i < s.k_list.size(); ++i)
        out << (i ? "," : "") << s.k_list[i];
    out << "\nrule = " << rule_name(s.rule) << '\n'
        << "statistic = " << statistic_name(s.statistic) << '\n'
        << "m = " << s.m << '\n'
        << "h = " << fmt_real(s.h) << '\n'
        << "baseline = " << (s.baseline ? "true" : "false") << '\n'
        << "trials = " << s.trials << '\n'
        << "base_seed = " << s.base_seed << '\n'
        << "post_window = " << fmt_real(s.post_window) << '\n'
        << "removal_budget = " << s.removal_budget << '\n';
}

bool operator==(const ExperimentSpec& a, const ExperimentSpec& b)
{
    auto tie = [](const ExperimentSpec& s) {
        return std::tie(s.mode, s.graph.n_low, s.graph.d, s.graph.m, s.graph.D, s.graph.seed,
                        s.resample_graph, s.params.beta, s.params.gamma, s.init_fraction,
                        s.force_hubs, s.t_grid, s.k_list, s.rule, s.statistic, s.m, s.h, s.baseline, s.trials,
                        s.base_seed, s.post_window, s.removal_budget);
    };
    return tie(a) == tie(b);
}

const SummaryRow& ExperimentReport::row(const std::string& method, std::size_t K, double T) const
{
    for (const auto& r : summary)
        if (r.method == method && r.K == K && r.T == T)
            return r;
    throw parameter_error("no summary row for " + method + " K=" + std::to_string(K) +
                          " T=" + fmt_real(T));
}

double accuracy(const vertex_set& estimate, const vertex_set& truth)
{
    if (truth.empty())
        throw parameter_error("accuracy needs a non-empty ground-truth set");
    std::size_t hits = 0;
    for (auto v : truth)
        hits += std::find(estimate.begin(), estimate.end(), v) != estimate.end();
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

ArmOutcome run_arm(const Graph& g, const vertex_set& infected, const vertex_set& removed,
                   const EpidemicParams& params, double window, seed_t seed)
{
    vertex_set gone = removed;
    std::sort(gone.begin(), gone.end());
    auto cut = remove_vertices(g, gone);
    vertex_set remaining;
    std::set_difference(infected.begin(), infected.end(), gone.begin(), gone.end(),
                        std::back_inserter(remaining));
    auto log = resume(cut, remaining, params, window, seed);
    return {log.infection_count(), infected_at(log, window).size()};
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records)
{
    using key_t = std::tuple<std::string, std::size_t, double>;
    std::map<key_t, std::vector<const TrialRecord*>> groups;
    for (const auto& r : records)
        groups[{r.method, r.K, r.T}].push_back(&r);

    std::vector<SummaryRow> out;
    for (const auto& [key, rs] : groups) {
        SummaryRow row;
        row.D = rs.front()->D;
        row.method = std::get<0>(key);
        row.K = std::get<1>(key);
        row.T = std::get<2>(key);
        row.n_trials = rs.size();
        double sum = 0.0;
        for (auto* r : rs)
            sum += r->value;
        row.mean = sum / static_cast<double>(rs.size());
        if (rs.size() > 1) {
            double ss = 0.0;
            for (auto* r : rs)
                ss += (r->value - row.mean) * (r->value - row.mean);
            row.stderr_mean = std::sqrt(ss / static_cast<double>(rs.size() - 1) /
                                        static_cast<double>(rs.size()));
        }
        out.push_back(std::move(row));
    }
    return out;
}

namespace {

struct trial_context {
    std::size_t index;
    seed_t seed;
    Graph graph;
    EventLog log;
};

trial_context prepare_trial(const ExperimentSpec& spec, const Graph& shared, std::size_t index)
{
    trial_context ctx{index, spec.base_seed + index, {}, {}};
    if (spec.resample_graph) {
        auto gs = spec.graph;
        gs.seed = derive_seed(ctx.seed, "graph");
        ctx.graph = generate_benchmark(gs);
    } else {
        ctx.graph = shared;
    }
    auto init =
        InitialCondition::random_fraction(spec.init_fraction, spec.force_hubs, derive_seed(ctx.seed, "init"));
    ctx.log = simulate(ctx.graph, spec.params, init, spec.t_grid.back(), derive_seed(ctx.seed, "sim"));
    return ctx;
}

Estimate targeted_estimate(const ExperimentSpec& spec, const EventLog& prefix, std::size_t K,
                           std::size_t m)
{
    if (spec.rule == EstimatorConfig::Rule::threshold)
        return estimate_threshold(prefix, K, spec.h, spec.statistic);
    return estimate_top_m(prefix, K, m, spec.statistic);
}

std::vector<TrialRecord> accuracy_trial(const ExperimentSpec& spec, const Graph& shared,
                                        std::size_t index)
{
    auto ctx = prepare_trial(spec, shared, index);
    const auto& truth = ctx.graph.hub_labels();
    std::vector<TrialRecord> out;
    for (double T : spec.t_grid) {
        auto prefix = ctx.log.prefix(T);
        for (auto K : spec.k_list) {
            auto est = targeted_estimate(spec, prefix, K, spec.m);
            out.push_back({index, ctx.seed, spec.graph.D, T, "reinfection", K,
                           accuracy(est.selected, truth)});
        }
        if (spec.baseline) {
            auto base = baseline_cumulative(prefix, spec.m, T);
            out.push_back({index, ctx.seed, spec.graph.D, T, "baseline_cumulative", 0,
                           accuracy(base.selected, truth)});
        }
    }
    return out;
}

std::vector<TrialRecord> intervention_trial(const ExperimentSpec& spec, const Graph& shared,
                                            std::size_t index)
{
    auto ctx = prepare_trial(spec, shared, index);
    const auto& g = ctx.graph;
    std::vector<vertex_t> all(g.size());
    for (vertex_t v = 0; v < g.size(); ++v)
        all[v] = v;

    std::vector<TrialRecord> out;
    for (std::size_t ti = 0; ti < spec.t_grid.size(); ++ti) {
        double T = spec.t_grid[ti];
        auto prefix = ctx.log.prefix(T);
        auto infected = infected_at(ctx.log, T);

        ArmOutcome none = run_arm(g, infected, {}, spec.params, spec.post_window,
                                  derive_seed(ctx.seed, "arm-none", {ti}));
        for (auto K : spec.k_list) {
            auto targeted = targeted_estimate(spec, prefix, K, spec.removal_budget).selected;

            vertex_set random_set;
            rng_t rng = make_rng(derive_seed(ctx.seed, "removal", {ti, K}));
            std::sample(all.begin(), all.end(), std::back_inserter(random_set), spec.removal_budget,
                        rng);

            auto a = run_arm(g, infected, targeted, spec.params, spec.post_window,
                             derive_seed(ctx.seed, "arm-targeted", {ti, K}));
            auto b = run_arm(g, infected, random_set, spec.params, spec.post_window,
                             derive_seed(ctx.seed, "arm-random", {ti, K}));

            auto rec = [&](const char* method, double value) {
                out.push_back({index, ctx.seed, spec.graph.D, T, method, K, value});
            };
            auto real = [](std::size_t x) { return static_cast<double>(x); };
            rec("events_targeted", real(a.infection_events));
            rec("events_random", real(b.infection_events));
            rec("events_none", real(none.infection_events));
            rec("prevalence_targeted", real(a.final_infected));
            rec("prevalence_random", real(b.final_infected));
            rec("prevalence_none", real(none.final_infected));
            rec("comparative_reduction", real(b.infection_events) - real(a.infection_events));
            rec("comparative_reduction_prevalence",
                real(b.final_infected) - real(a.final_infected));
            rec("accuracy", accuracy(targeted, g.hub_labels()));
        }
    }
    return out;
}

template <typename TrialFn>
ExperimentReport run_trials(const ExperimentSpec& spec, unsigned threads, TrialFn trial)
{
    spec.validate();
    Graph shared;
    if (!spec.resample_graph)
        shared = generate_benchmark(spec.graph);

    std::vector<std::vector<TrialRecord>> per_trial(spec.trials);
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, spec.trials));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            auto i = next.fetch_add(1);
            if (i >= spec.trials)
                return;
            try {
                per_trial[i] = trial(spec, shared, i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = spec.trials;
                return;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    ExperimentReport report;
    report.spec = spec;
    for (auto& rs : per_trial)
        report.trials.insert(report.trials.end(), rs.begin(), rs.end());
    report.summary = summarize(report.trials);
    return report;
}

} // namespace

ExperimentReport run_accuracy_sweep(const ExperimentSpec& spec, unsigned threads)
{
    if (spec.mode != ExperimentSpec::Mode::accuracy)
        throw parameter_error("run_accuracy_sweep needs mode = accuracy");
    return run_trials(spec, threads, accuracy_trial);
}

ExperimentReport run_intervention(const ExperimentSpec& spec, unsigned threads)
{
    if (spec.mode != ExperimentSpec::Mode::intervention)
        throw parameter_error("run_intervention needs mode = intervention");
    return run_trials(spec, threads, intervention_trial);
}

ExperimentReport run_experiment(const ExperimentSpec& spec, unsigned threads)
{
    return spec.mode == ExperimentSpec::Mode::accuracy ? run_accuracy_sweep(spec, threads)
                                                       : run_intervention(spec, threads);
}

void write_trials_csv(const std::vector<TrialRecord>& records, std::ostream& out)
{
    out << "trial,seed,D,T,method,K,value\n";
    for (const auto& r : records)
        out << r.trial << ',' << r.seed << ',' << r.D << ',' << fmt_real(r.T) << ',' << r.method
            << ',' << r.K << ',' << fmt_real(r.value) << '\n';
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out)
{
    out << "D,T,method,K,mean,stderr,n_trials\n";
    for (const auto& r : rows)
        out << r.D << ',' << fmt_real(r.T) << ',' << r.method << ',' << r.K << ','
            << fmt_real(r.mean) << ',' << fmt_real(r.stderr_mean) << ',' << r.n_trials << '\n';
}

namespace {

std::vector<std::vector<std::string_view>> read_csv(std::istream& in, std::string_view header,
                                                    std::vector<std::string>& storage)
{
    std::string line;
    if (!std::getline(in, line) || trim(line) != header)
        throw format_error("expected CSV header '" + std::string(header) + "'", 1);
    while (std::getline(in, line))
        storage.push_back(line);
    std::vector<std::vector<std::string_view>> rows;
    auto width = split(header, ',').size();
    for (std::size_t i = 0; i < storage.size(); ++i) {
        if (trim(storage[i]).empty())
            continue;
        auto cells = split(storage[i], ',');
        if (cells.size() != width)
            throw format_error("expected " + std::to_string(width) + " columns", i + 2);
        rows.push_back(std::move(cells));
    }
    return rows;
}

} // namespace

std::vector<TrialRecord> read_trials_csv(std::istream& in)
{
    std::vector<std::string> storage;
    std::vector<TrialRecord> out;
    for (const auto& c : read_csv(in, "trial,seed,D,T,method,K,value", storage))
        out.push_back({to_uint(c[0], "trial"), to_uint(c[1], "seed"), to_uint(c[2], "D"),
                       to_real(c[3], "T"), std::string(c[4]), to_uint(c[5], "K"),
                       to_real(c[6], "value")});
    return out;
}

std::vector<SummaryRow> read_summary_csv(std::istream& in)
{
    std::vector<std::string> storage;
    std::vector<SummaryRow> out;
    for (const auto& c : read_csv(in, "D,T,method,K,mean,stderr,n_trials", storage))
        out.push_back({to_uint(c[0], "D"), to_real(c[1], "T"), std::string(c[2]),
                       to_uint(c[3], "K"), to_real(c[4], "mean"), to_real(c[5], "stderr"),
                       to_uint(c[6], "n_trials")});
    return out;
}

} // namespace sis
