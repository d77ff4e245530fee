#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sis::cli {

inline constexpr const char* tool_version = "0.1.0";

enum exit_status : int { ok = 0, internal_failure = 1, usage_error = 2 };

/*
 * Plain-text "key = value" record written next to every artifact. Keys with
 * the "config." prefix hold the fully resolved experiment configuration, so
 * `exp rerun --manifest FILE` reproduces the run exactly.
 */
struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> fields; // resolved options, seeds, artifacts
    double wall_clock_seconds = 0.0;

    void write(std::ostream& out) const;
    static RunManifest parse(std::istream& in);
    static RunManifest load(const std::filesystem::path& path);
};

/// Runs one CLI invocation. argv[0] is the program name.
int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

} // namespace sis::cli
