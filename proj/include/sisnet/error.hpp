#pragma once

#include <stdexcept>
#include <string>

namespace sis {

/// Invalid argument or infeasible parameter combination.
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
struct format_error : std::runtime_error {
    format_error(const std::string& msg, std::size_t line_no = 0)
        : std::runtime_error(line_no ? "line " + std::to_string(line_no) + ": " + msg : msg),
          line(line_no) {}
    std::size_t line;
};

/// Simulation state that is inconsistent with the graph (e.g. infected inactive vertex).
struct state_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Timeline that violates the infection/recovery alternation.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Problem too large for a dense exact method.
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Broken internal invariant. Never the caller's fault.
struct internal_error : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace sis
