#pragma once

// Command-line front end: flag/config-file parsing into a RunConfig,
// command dispatch, and exit-code mapping. Kept as a small library so the
// parsing and dispatch logic is testable without spawning processes.

#include <optional>
#include <string>
#include <vector>

#include "cpd/integrators.hpp"

namespace cpd::cli {

enum class Command { Simulate, Energy, Converge, Timing, Check };

enum class OutputFormat { Csv, Json };

struct RunConfig {
    Command command = Command::Check;
    /// Absent means: sweep all schemes for energy/converge, compare the
    /// default pair for timing. simulate requires it.
    std::optional<SchemeId> scheme;
    std::string field = "experiment";
    /// Absent means the command's default sweep.
    std::optional<double> eps;
    double c0 = 1.0;
    Vec3 x0{0.0, 1.0, 0.1};
    Vec3 v0{0.09, 0.05, 0.2};
    std::optional<double> h;
    std::optional<double> T;
    double t_end = 1.0;
    int k_min = 6;
    int k_max = 12;
    double rtol = 1e-12;
    double atol = 1e-12;
    int repetitions = 3;
    std::optional<std::string> out;
    OutputFormat format = OutputFormat::Csv;
    bool format_given = false;
};

/// Parses argv-style arguments (program name excluded). Returns nullopt
/// when --help was requested (help text already printed). Throws
/// UsageError with a message naming the offending key otherwise.
std::optional<RunConfig> parse_config(const std::vector<std::string>& args);

/// Executes a parsed command. Returns the process exit code for
/// non-throwing outcomes (0 success; 2 when a run completed with a
/// recorded numeric failure or a self-check failed). Throws cpd errors
/// for the caller to map.
int run_command(const RunConfig& cfg);

/// Full entry point with exit-code mapping: 0 success, 1 usage,
/// 2 domain/numeric failure, 3 I/O.
int main_with_args(const std::vector<std::string>& args);

}  // namespace cpd::cli
