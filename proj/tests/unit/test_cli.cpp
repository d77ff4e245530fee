#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "sisnet/graph.hpp"
#include "sisnet/sim.hpp"
#include "tmp_dir.hpp"

using namespace sis;

namespace {

struct result {
    int status;
    std::string out;
    std::string err;
};

result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "sisnet");
    std::ostringstream out, err;
    int status = cli::dispatch(args, out, err);
    return {status, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help and bad usage")
{
    auto h = run({"--help"});
    CHECK(h.status == 0);
    CHECK(h.out.find("exp") != std::string::npos);
    CHECK(run({"frobnicate"}).status == 2);
    CHECK(run({"graph", "gen", "--bogus", "1"}).status == 2);
}

TEST_CASE("missing graph file")
{
    auto dir = scratch_dir("cli_missing");
    auto r = run({"sim", "run", "--graph", "/nonexistent/g.txt", "--seed", "1", "--out",
                  (dir / "log.txt").string()});
    CHECK(r.status == 2);
    CHECK(r.err.find("/nonexistent/g.txt") != std::string::npos);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

TEST_CASE("graph, sim, estimate pipeline")
{
    auto dir = scratch_dir("cli_pipeline");
    auto g = dir / "g.txt";
    REQUIRE(run({"graph", "gen", "--n", "200", "--hubs", "3", "--hub-degree", "40", "--seed", "5",
                 "--out", g.string()})
                .status == 0);
    CHECK(load_graph(g).size() == 203);
    CHECK(std::filesystem::exists(g.string() + ".manifest"));

    auto log = dir / "log.txt";
    REQUIRE(run({"sim", "run", "--graph", g.string(), "--T", "5", "--init-frac", "0.5",
                 "--force-hubs", "--seed", "9", "--out", log.string()})
                .status == 0);
    CHECK(load_event_log(log).horizon == 5.0);

    auto est = run({"estimate", "--log", log.string(), "--K", "1", "--m", "3"});
    CHECK(est.status == 0);
    CHECK(est.out.find("\"selected\"") != std::string::npos);

    CHECK(run({"estimate", "--log", log.string(), "--K", "0"}).status == 2);
    CHECK(run({"estimate", "--log", log.string(), "--rule", "threshold", "--alpha", "0.5"}).status ==
          0);
}

TEST_CASE("oracle subcommand")
{
    auto dir = scratch_dir("cli_oracle");
    write_file(dir / "edge.txt", "n=2\n0 1\n");
    auto r = run({"oracle", "--graph", (dir / "edge.txt").string(), "--init", "0", "--t", "1"});
    REQUIRE(r.status == 0);
    CHECK(r.out.find("1,0.41227562055") != std::string::npos);

    write_file(dir / "big.txt", "n=13\n");
    CHECK(run({"oracle", "--graph", (dir / "big.txt").string(), "--init", "0"}).status == 2);
}

TEST_CASE("experiment rerun is byte identical")
{
    auto dir = scratch_dir("cli_exp");
    write_file(dir / "exp.cfg", "mode = intervention\nn_low = 100\nhubs = 3\nhub_degree = 20\n"
                                "t_grid = 0.5,2\ntrials = 3\npost_window = 1\nremoval_budget = 3\n");
    auto first = dir / "first";
    REQUIRE(run({"exp", "intervene", "--config", (dir / "exp.cfg").string(), "--seed", "4",
                 "--out-dir", first.string(), "--threads", "2"})
                .status == 0);
    for (auto f : {"trials.csv", "summary.csv", "manifest.txt"})
        CHECK(std::filesystem::exists(first / f));

    auto second = dir / "second";
    REQUIRE(run({"exp", "rerun", "--manifest", (first / "manifest.txt").string(), "--out-dir",
                 second.string(), "--threads", "1"})
                .status == 0);
    CHECK(slurp(first / "trials.csv") == slurp(second / "trials.csv"));
    CHECK(slurp(first / "summary.csv") == slurp(second / "summary.csv"));

    auto m = cli::RunManifest::load(first / "manifest.txt");
    CHECK(m.subcommand == "exp intervene");
    CHECK(m.fields.at("config.base_seed") == "4");

    CHECK(run({"exp", "accuracy", "--config", (dir / "exp.cfg").string(), "--out-dir",
               (dir / "wrong").string()})
              .status == 2);
}

}
