#pragma once

#include <iosfwd>
#include <string>

#include "quadrix/config.hpp"

namespace quadrix {

/// Process exit codes shared by all subcommands.
enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,        // config error, or a failed verify suite
    exit_convexity = 2,      // curvature: a point failed the convexity certificate
    exit_inconclusive = 3,   // classify: not_characterized because of errors
    exit_all_rows_failed = 4 // measures / sweep: every row failed
};

/// Each command writes its artifact to `out` and diagnostics to `log`.
int cmd_curvature(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_measures(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& log);

/// 17 significant digits with a "." decimal point; empty for NaN.
std::string format_number(double v);

} // namespace quadrix
