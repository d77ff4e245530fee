#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sisnet/ctmc_oracle.hpp"
#include "sisnet/error.hpp"
#include "sisnet/estimator.hpp"
#include "sisnet/experiments.hpp"
#include "sisnet/graph.hpp"
#include "sisnet/sim.hpp"

namespace sis::cli {

namespace fs = std::filesystem;

void RunManifest::write(std::ostream& out) const
{
    out << "# sisnet run manifest\n";
    out << "tool_version = " << tool_version << '\n';
    out << "subcommand = " << subcommand << '\n';
    for (const auto& [k, v] : fields)
        out << k << " = " << v << '\n';
    out << "wall_clock_seconds = " << std::fixed << std::setprecision(3) << wall_clock_seconds
        << '\n';
}

RunManifest RunManifest::parse(std::istream& in)
{
    RunManifest m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        auto eq = line.find(" = ");
        if (eq == std::string::npos)
            throw format_error("manifest: expected 'key = value'", line_no);
        auto key = line.substr(0, eq), value = line.substr(eq + 3);
        if (key == "subcommand")
            m.subcommand = value;
        else if (key == "wall_clock_seconds")
            m.wall_clock_seconds = std::stod(value);
        else if (key != "tool_version")
            m.fields[key] = value;
    }
    if (m.subcommand.empty())
        throw format_error("manifest has no subcommand");
    return m;
}

RunManifest RunManifest::load(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw parameter_error("cannot open manifest '" + path.string() + "'");
    return parse(in);
}

namespace {

using clock_type = std::chrono::steady_clock;

seed_t resolve_seed(const std::optional<seed_t>& flag)
{
    if (flag)
        return *flag;
    std::random_device rd;
    return (static_cast<seed_t>(rd()) << 32) ^ rd();
}

vertex_set parse_vertex_list(const std::string& s)
{
    vertex_set out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.find_first_not_of(" ") == std::string::npos)
            continue;
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(tok, &used);
        } catch (const std::exception&) {
            throw parameter_error("malformed vertex list '" + s + "'");
        }
        if (tok.find_first_not_of(" ", used) != std::string::npos)
            throw parameter_error("malformed vertex list '" + s + "'");
        out.push_back(static_cast<vertex_t>(v));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string join(const vertex_set& vs)
{
    std::string s;
    for (std::size_t i = 0; i < vs.size(); ++i)
        s += (i ? "," : "") + std::to_string(vs[i]);
    return s;
}

std::string real(double x)
{
    std::ostringstream ss;
    ss << std::setprecision(17) << x;
    return ss.str();
}

void write_manifest(const fs::path& path, RunManifest m, clock_type::time_point start)
{
    m.wall_clock_seconds = std::chrono::duration<double>(clock_type::now() - start).count();
    std::ofstream out(path);
    if (!out)
        throw parameter_error("cannot write manifest '" + path.string() + "'");
    m.write(out);
}

fs::path manifest_for_file(const fs::path& out) { return fs::path(out.string() + ".manifest"); }

void ensure_parent(const fs::path& out)
{
    if (out.has_parent_path())
        fs::create_directories(out.parent_path());
}

struct graph_gen_opts {
    std::size_t n = 1000, d = 4, hubs = 10, hub_degree = 100;
    std::optional<seed_t> seed;
    std::string out;
};

struct sim_run_opts {
    std::string graph, out, init;
    double beta = 1.0, gamma = 0.5, horizon = 20.0, init_frac = 0.5;
    bool force_hubs = false;
    std::optional<seed_t> seed;
};

struct estimate_opts {
    std::string log, rule = "top-m", statistic = "first-k", out;
    std::size_t K = 1, m = 10;
    std::optional<double> h, alpha;
};

struct oracle_opts {
    std::string graph, init, method = "uniformization";
    double beta = 1.0, gamma = 0.5, t = 1.0;
};

struct exp_opts {
    std::string config, out_dir, manifest;
    std::optional<seed_t> seed;
    unsigned threads = 0;
};

int run_graph_gen(const graph_gen_opts& o, std::ostream& out)
{
    auto start = clock_type::now();
    GraphSpec spec{o.n, o.d, o.hubs, o.hub_degree, resolve_seed(o.seed)};
    auto g = generate_benchmark(spec);
    ensure_parent(o.out);
    save_graph(g, o.out);

    RunManifest m;
    m.subcommand = "graph gen";
    m.fields = {{"n", std::to_string(o.n)},
                {"d", std::to_string(o.d)},
                {"hubs", std::to_string(o.hubs)},
                {"hub_degree", std::to_string(o.hub_degree)},
                {"seed", std::to_string(spec.seed)},
                {"artifact.graph", o.out}};
    write_manifest(manifest_for_file(o.out), m, start);
    out << "wrote " << g.size() << " vertices, " << g.edge_count() << " edges to " << o.out << '\n';
    return ok;
}

int run_sim(const sim_run_opts& o, std::ostream& out)
{
    auto start = clock_type::now();
    auto g = load_graph(o.graph);
    EpidemicParams params{o.beta, o.gamma};
    seed_t seed = resolve_seed(o.seed);
    InitialCondition init;
    if (!o.init.empty()) {
        init = InitialCondition::explicit_set(parse_vertex_list(o.init));
        init.force_hubs = o.force_hubs;
    } else {
        init = InitialCondition::random_fraction(o.init_frac, o.force_hubs, derive_seed(seed, "init"));
    }
    auto log = simulate(g, params, init, o.horizon, derive_seed(seed, "sim"));
    ensure_parent(o.out);
    save_event_log(log, o.out);

    RunManifest m;
    m.subcommand = "sim run";
    m.fields = {{"graph", o.graph},
                {"beta", real(o.beta)},
                {"gamma", real(o.gamma)},
                {"T", real(o.horizon)},
                {"init_frac", real(o.init_frac)},
                {"init", o.init},
                {"force_hubs", o.force_hubs ? "true" : "false"},
                {"seed", std::to_string(seed)},
                {"resolved_initial", join(log.initial)},
                {"artifact.log", o.out}};
    write_manifest(manifest_for_file(o.out), m, start);
    out << "wrote " << log.events.size() << " events to " << o.out << '\n';
    return ok;
}

int run_estimate(const estimate_opts& o, std::ostream& out)
{
    auto start = clock_type::now();
    auto log = load_event_log(o.log);
    EstimatorConfig cfg;
    cfg.K = o.K;
    cfg.m = o.m;
    cfg.alpha = o.alpha;
    cfg.statistic = o.statistic == "window-max" ? RankStatistic::window_max : RankStatistic::first_k;
    if (o.rule == "top-m") {
        cfg.rule = EstimatorConfig::Rule::top_m;
    } else {
        cfg.rule = EstimatorConfig::Rule::threshold;
        if (o.h)
            cfg.h = *o.h;
        else if (o.alpha)
            cfg.h = theorem_h(log.n, *o.alpha);
        else
            throw parameter_error("threshold rule needs --h or --alpha");
    }
    auto est = estimate(log, cfg);

    nlohmann::ordered_json j;
    j["selected"] = est.selected;
    nlohmann::ordered_json scores = nlohmann::ordered_json::object();
    for (const auto& [v, s] : est.scores)
        scores[std::to_string(v)] = s;
    j["scores"] = scores;
    j["eligible_count"] = est.eligible.size();
    auto line = j.dump();

    if (o.out.empty()) {
        out << line << '\n';
        return ok;
    }
    ensure_parent(o.out);
    std::ofstream f(o.out);
    if (!f)
        throw parameter_error("cannot write '" + o.out + "'");
    f << line << '\n';
    RunManifest m;
    m.subcommand = "estimate";
    m.fields = {{"log", o.log},
                {"K", std::to_string(cfg.K)},
                {"rule", o.rule},
                {"statistic", o.statistic},
                {"m", std::to_string(cfg.m)},
                {"h", real(cfg.h)},
                {"artifact.estimate", o.out}};
    write_manifest(manifest_for_file(o.out), m, start);
    return ok;
}

int run_oracle(const oracle_opts& o, std::ostream& out)
{
    auto g = load_graph(o.graph);
    auto gen = oracle::build_generator(g, {o.beta, o.gamma});
    auto init = oracle::state_of(parse_vertex_list(o.init));
    if (init >= gen.dim())
        throw parameter_error("initial vertex out of range");
    std::vector<double> dist;
    if (o.method == "uniformization")
        dist = oracle::transient_uniformization(gen, init, o.t);
    else
        dist = oracle::transient_series(gen, init, o.t);
    out << "vertex,probability\n";
    out << std::setprecision(12);
    for (vertex_t v = 0; v < g.size(); ++v)
        out << v << ',' << oracle::marginal(dist, v) << '\n';
    return ok;
}

std::string read_text(const fs::path& p)
{
    std::ifstream in(p);
    if (!in)
        throw parameter_error("cannot open config '" + p.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentSpec spec_for_mode(const std::string& text, ExperimentSpec::Mode mode)
{
    bool has_mode = false;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        auto b = line.find_first_not_of(" \t");
        if (b != std::string::npos && line.compare(b, 4, "mode") == 0)
            has_mode = true;
    }
    std::istringstream in(has_mode ? text
                                   : std::string("mode = ") +
                                         (mode == ExperimentSpec::Mode::accuracy ? "accuracy"
                                                                                  : "intervention") +
                                         "\n" + text);
    auto spec = parse_spec(in);
    if (spec.mode != mode)
        throw parameter_error("config mode does not match the subcommand");
    return spec;
}

int run_exp(const std::string& subcommand, ExperimentSpec spec, const exp_opts& o, std::ostream& out)
{
    auto start = clock_type::now();
    if (o.seed)
        spec.base_seed = *o.seed;
    spec.validate();
    auto report = run_experiment(spec, o.threads);

    fs::create_directories(o.out_dir);
    fs::path dir(o.out_dir);
    {
        std::ofstream f(dir / "trials.csv");
        write_trials_csv(report.trials, f);
        if (!f)
            throw parameter_error("cannot write trials.csv in '" + o.out_dir + "'");
    }
    {
        std::ofstream f(dir / "summary.csv");
        write_summary_csv(report.summary, f);
        if (!f)
            throw parameter_error("cannot write summary.csv in '" + o.out_dir + "'");
    }

    RunManifest m;
    m.subcommand = subcommand;
    std::ostringstream cfg;
    write_spec(spec, cfg);
    std::istringstream cfg_lines(cfg.str());
    std::string line;
    while (std::getline(cfg_lines, line)) {
        auto eq = line.find(" = ");
        m.fields["config." + line.substr(0, eq)] = line.substr(eq + 3);
    }
    m.fields["threads"] = std::to_string(o.threads);
    m.fields["artifact.trials"] = "trials.csv";
    m.fields["artifact.summary"] = "summary.csv";
    write_manifest(dir / "manifest.txt", m, start);

    out << "wrote " << report.trials.size() << " trial rows and " << report.summary.size()
        << " summary rows to " << o.out_dir << '\n';
    return ok;
}

int run_exp_rerun(const exp_opts& o, std::ostream& out)
{
    auto m = RunManifest::load(o.manifest);
    if (m.subcommand != "exp accuracy" && m.subcommand != "exp intervene")
        throw parameter_error("manifest '" + o.manifest + "' is not an experiment run");
    std::string text;
    for (const auto& [k, v] : m.fields)
        if (k.starts_with("config."))
            text += k.substr(7) + " = " + v + "\n";
    std::istringstream in(text);
    auto spec = parse_spec(in);
    exp_opts run = o;
    run.seed.reset();
    return run_exp(m.subcommand, spec, run, out);
}

} // namespace

int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact SIS epidemic simulation and super-spreader estimation", "sisnet"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    graph_gen_opts gg;
    auto* graph = app.add_subcommand("graph", "Contact network tools");
    graph->require_subcommand(1);
    auto* gen = graph->add_subcommand("gen", "Generate the planted-hub benchmark graph");
    gen->add_option("--n", gg.n, "Low-degree vertex count")->capture_default_str();
    gen->add_option("--d", gg.d, "Degree of the regular base graph")->capture_default_str();
    gen->add_option("--hubs", gg.hubs, "Number of hubs")->capture_default_str();
    gen->add_option("--hub-degree", gg.hub_degree, "Hub degree")->capture_default_str();
    gen->add_option("--seed", gg.seed, "RNG seed (default: system entropy)");
    gen->add_option("--out", gg.out, "Output edge-list file")->required();

    sim_run_opts so;
    auto* sim = app.add_subcommand("sim", "Epidemic simulation");
    sim->require_subcommand(1);
    auto* run = sim->add_subcommand("run", "Simulate the SIS process and write an event log");
    run->add_option("--graph", so.graph, "Edge-list file")->required();
    run->add_option("--beta", so.beta, "Infection rate per infected neighbor")->capture_default_str();
    run->add_option("--gamma", so.gamma, "Recovery rate")->capture_default_str();
    run->add_option("--T", so.horizon, "Observation horizon")->capture_default_str();
    run->add_option("--init-frac", so.init_frac, "Fraction infected at random at t=0")
        ->capture_default_str();
    run->add_option("--init", so.init, "Explicit initial infected set, e.g. \"0,2\"");
    run->add_flag("--force-hubs", so.force_hubs, "Also infect every hub at t=0");
    run->add_option("--seed", so.seed, "RNG seed (default: system entropy)");
    run->add_option("--out", so.out, "Output event-log file")->required();

    estimate_opts eo;
    auto* est = app.add_subcommand("estimate", "Estimate high-degree vertices from an event log");
    est->add_option("--log", eo.log, "Event-log file")->required();
    est->add_option("--K", eo.K, "Re-infection count")->capture_default_str();
    est->add_option("--rule", eo.rule, "top-m or threshold")
        ->check(CLI::IsMember({"top-m", "threshold"}))
        ->capture_default_str();
    est->add_option("--statistic", eo.statistic, "first-k (R_K) or window-max")
        ->check(CLI::IsMember({"first-k", "window-max"}))
        ->capture_default_str();
    est->add_option("--m", eo.m, "Ranking size for top-m")->capture_default_str();
    est->add_option("--h", eo.h, "Threshold for the threshold rule");
    est->add_option("--alpha", eo.alpha, "Degree exponent; sets h = n^(-alpha/2) when --h is absent");
    est->add_option("--out", eo.out, "Write the JSON record here instead of stdout");

    oracle_opts oo;
    auto* orc = app.add_subcommand("oracle", "Exact marginals on a tiny graph");
    orc->add_option("--graph", oo.graph, "Edge-list file (at most 12 vertices)")->required();
    orc->add_option("--beta", oo.beta)->capture_default_str();
    orc->add_option("--gamma", oo.gamma)->capture_default_str();
    orc->add_option("--init", oo.init, "Initially infected vertices, e.g. \"0,2\"")->required();
    orc->add_option("--t", oo.t, "Time")->capture_default_str();
    orc->add_option("--method", oo.method, "uniformization or series")
        ->check(CLI::IsMember({"uniformization", "series"}))
        ->capture_default_str();

    exp_opts xo;
    auto* exp = app.add_subcommand("exp", "Replicated experiments");
    exp->require_subcommand(1);
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out-dir", xo.out_dir, "Output directory")->required();
        sub->add_option("--threads", xo.threads, "Concurrent trials (0 = all cores)")
            ->capture_default_str();
    };
    auto* acc = exp->add_subcommand("accuracy", "Accuracy-vs-T sweep");
    acc->add_option("--config", xo.config, "Experiment config file")->required();
    acc->add_option("--seed", xo.seed, "Override base_seed");
    add_common(acc);
    auto* itv = exp->add_subcommand("intervene", "Targeted vs random removal");
    itv->add_option("--config", xo.config, "Experiment config file")->required();
    itv->add_option("--seed", xo.seed, "Override base_seed");
    add_common(itv);
    auto* rerun = exp->add_subcommand("rerun", "Repeat an experiment from its manifest");
    rerun->add_option("--manifest", xo.manifest, "manifest.txt of an earlier run")->required();
    add_common(rerun);

    std::vector<const char*> cargs;
    for (const auto& a : argv)
        cargs.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (gen->parsed())
            return run_graph_gen(gg, out);
        if (run->parsed())
            return run_sim(so, out);
        if (est->parsed())
            return run_estimate(eo, out);
        if (orc->parsed())
            return run_oracle(oo, out);
        if (acc->parsed())
            return run_exp("exp accuracy", spec_for_mode(read_text(xo.config), ExperimentSpec::Mode::accuracy), xo, out);
        if (itv->parsed())
            return run_exp("exp intervene",
                           spec_for_mode(read_text(xo.config), ExperimentSpec::Mode::intervention), xo,
                           out);
        if (rerun->parsed())
            return run_exp_rerun(xo, out);
    } catch (const internal_error& e) {
        err << "internal error: " << e.what() << '\n';
        return internal_failure;
    } catch (const parameter_error& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const format_error& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const state_error& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const data_error& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const capacity_error& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return internal_failure;
    }
    err << "error: no subcommand\n";
    return usage_error;
}

} // namespace sis::cli
