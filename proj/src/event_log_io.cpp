#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "sisnet/error.hpp"
#include "sisnet/sim.hpp"

namespace sis {

namespace {

std::string format_time(double t)
{
    if (std::isinf(t))
        return "inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, t, std::chars_format::general, 17);
    return std::string(buf, p);
}

double parse_time(const std::string& s, std::size_t line_no)
{
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    double x = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(x))
        throw format_error("malformed time '" + s + "'", line_no);
    return x;
}

std::size_t parse_count(const std::string& s, std::size_t line_no)
{
    std::size_t x = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw format_error("malformed integer '" + s + "'", line_no);
    return x;
}

} // namespace

void write_event_log(const EventLog& log, std::ostream& out)
{
    out << "T=" << format_time(log.horizon) << " n=" << log.n << '\n';
    out << "#init";
    for (auto v : log.initial)
        out << ' ' << v;
    out << '\n';
    for (const auto& e : log.events)
        out << format_time(e.time) << ' ' << e.vertex << ' ' << static_cast<char>(e.kind) << '\n';
}

EventLog parse_event_log(std::istream& in)
{
    EventLog log;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    bool init = false;
    std::vector<char> state;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::istringstream ss(line);
        if (!header) {
            std::string a, b, extra;
            ss >> a >> b;
            if (!a.starts_with("T=") || !b.starts_with("n=") || (ss >> extra))
                throw format_error("expected header 'T=<horizon> n=<vertices>'", line_no);
            log.horizon = parse_time(a.substr(2), line_no);
            if (log.horizon < 0.0)
                throw format_error("negative horizon", line_no);
            log.n = parse_count(b.substr(2), line_no);
            state.assign(log.n, 0);
            header = true;
            continue;
        }
        if (line.starts_with("#init")) {
            if (init || !log.events.empty())
                throw format_error("#init must appear once, before any event", line_no);
            std::string tok;
            ss >> tok;
            while (ss >> tok) {
                auto v = parse_count(tok, line_no);
                if (v >= log.n)
                    throw format_error("vertex " + tok + " out of range", line_no);
                if (!log.initial.empty() && v <= log.initial.back())
                    throw format_error("#init list must be strictly increasing", line_no);
                log.initial.push_back(static_cast<vertex_t>(v));
                state[v] = 1;
            }
            init = true;
            continue;
        }
        std::string ts, vs, ks, extra;
        if (!(ss >> ts >> vs >> ks) || (ss >> extra))
            throw format_error("expected '<time> <vertex> <I|R>'", line_no);
        double t = parse_time(ts, line_no);
        auto v = parse_count(vs, line_no);
        if (v >= log.n)
            throw format_error("vertex " + vs + " out of range", line_no);
        if (ks != "I" && ks != "R")
            throw format_error("event kind must be I or R, got '" + ks + "'", line_no);
        if (t < 0.0 || t > log.horizon)
            throw format_error("event time outside [0, T]", line_no);
        if (!log.events.empty() && t <= log.events.back().time)
            throw format_error("event times must be strictly increasing", line_no);
        auto kind = ks == "I" ? EventKind::infection : EventKind::recovery;
        char want = kind == EventKind::infection ? 0 : 1;
        if (state[v] != want)
            throw format_error("vertex " + vs + " does not alternate infection/recovery", line_no);
        state[v] = static_cast<char>(1 - want);
        log.events.push_back({t, static_cast<vertex_t>(v), kind});
    }
    if (!header)
        throw format_error("missing header 'T=<horizon> n=<vertices>'");
    return log;
}

void save_event_log(const EventLog& log, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw parameter_error("cannot write event log '" + path.string() + "'");
    write_event_log(log, out);
}

EventLog load_event_log(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw parameter_error("cannot open event log '" + path.string() + "'");
    try {
        return parse_event_log(in);
    } catch (const format_error& e) {
        throw format_error(path.string() + ": " + e.what());
    }
}

} // namespace sis
