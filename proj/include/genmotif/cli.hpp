#pragma once

#include <chrono>
#include <iosfwd>
#include <string>
#include <vector>

namespace genmotif::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kBadFlags = 1,
    kBadInput = 2,
    kInfeasible = 3,
    kRuntimeError = 4,
};

/// Parses "500ms", "2.5s", "2min" or a bare number of seconds.
std::chrono::nanoseconds parse_duration(const std::string& text);

/// `discover ...`; args exclude the program name and the subcommand.
int run_discover(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// `bench plant|race|sweep|score ...`; args exclude the program name and "bench".
int run_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Full command line without the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace genmotif::cli
