#ifndef COMBOFILTER_COMMANDS_HPP
#define COMBOFILTER_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "combofilter/experiment.hpp"

namespace combofilter {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitOutput = 3;

struct CommandOptions {
    std::optional<std::string> preset;
    std::optional<std::filesystem::path> config;
    std::filesystem::path out{"out"};
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    unsigned jobs{1};
};

/// Config file (or preset, default example1) with --trials / --seed applied.
/// Throws ConfigError.
ExperimentConfig resolve_config(const CommandOptions& options);

/// Writes curve_<name>.csv, mixing_<name>.csv, report.csv and manifest.json.
int cmd_run(const CommandOptions& options, std::ostream& log);

/// `param` is "N0" or "rho_a". Runs the first combination algorithm of the
/// config once per value and writes curve_<name>_<param>_<value>.csv plus
/// sweep_summary.csv.
int cmd_sweep(const CommandOptions& options, const std::string& param,
              const std::vector<double>& values, std::ostream& log);

/// Runs all configured algorithms on shared streams, writes their curves and
/// delta_<a>_vs_<b>.csv for `pair` (default: the first two algorithms).
int cmd_compare(const CommandOptions& options,
                const std::optional<std::pair<std::string, std::string>>& pair,
                std::ostream& log);

}  // namespace combofilter

#endif  // COMBOFILTER_COMMANDS_HPP
