#pragma once

// Command-line front end. Every command writes to the given streams and
// returns its exit code, so the same code paths serve the binary and tests.

#include "mgsim/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mgsim {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kValidation = 1;  // parse, semantic, topology or usage error
inline constexpr int kIo = 2;
inline constexpr int kDivergence = 3;
}  // namespace exit_code

/// Command-line overrides of the scenario's solver settings.
struct RunOptions {
    std::optional<double> dt;
    std::optional<Method> method;
    std::optional<double> t_end;
    std::optional<std::size_t> decimation;
    bool summary_json = false;
    std::optional<std::uint64_t> seed;  // accepted and ignored; runs are deterministic
};

/// Validates a netlist (or the topology of a scenario file).
int cmd_validate(const std::filesystem::path& path, std::ostream& out, std::ostream& err);

/// Runs a scenario, writes the CSV and prints the summary.
int cmd_run(const std::string& scenario, const std::filesystem::path& csv_path, const RunOptions& options,
            std::ostream& out, std::ostream& err);

/// One run per value of `param`, fanned out over `jobs` workers (0 = hardware concurrency).
int cmd_sweep(const std::string& scenario, const std::string& param, const std::vector<double>& values,
              const RunOptions& options, std::ostream& out, std::ostream& err, unsigned jobs = 0);

/// Parses argv and dispatches. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mgsim
