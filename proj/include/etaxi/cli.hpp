#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace etaxi::cli {

enum ExitCode : int { ok = 0, config_error = 1, data_error = 2, runtime_error = 3 };

/// Runs the `etaxi` command line. `args` excludes the program name. Errors
/// are reported on `err` as one line: `error: <kind>: <reason>`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SweepRow {
    double x = 0.0;
    double mean_wait_min = 0.0;
    double gini = 0.0;
    double fulfill_rate = 0.0;
    double mean_distance_km = 0.0;
};

inline constexpr const char* sweep_header = "x,mean_wait_min,gini,fulfill_rate,mean_distance_km";

} // namespace etaxi::cli
