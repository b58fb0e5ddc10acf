#ifndef COMBOFILTER_CONFIG_HPP
#define COMBOFILTER_CONFIG_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "combofilter/errors.hpp"
#include "combofilter/experiment.hpp"

namespace combofilter {

inline constexpr std::string_view kManifestVersion = "combofilter-manifest/1";

/// Names accepted by preset(): "example1", "example2".
std::vector<std::string> preset_names();

/// Built-in experiment. Throws ConfigError("preset", ...) for unknown names.
ExperimentConfig preset(std::string_view name);

/// Parses a JSON experiment description. Every key is optional; missing keys
/// come from the preset named by "preset" (default "example1"). A manifest
/// written by write_manifest() is accepted as well and yields its embedded
/// configuration. The result is validated.
///
/// Throws ConfigError. Syntax errors carry the line and column, semantic
/// errors the dotted field path.
ExperimentConfig parse_config(std::string_view text);

/// Reads and parses a config file.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved configuration as pretty-printed JSON. parse_config() of the
/// result reproduces an equal configuration.
std::string config_to_json(const ExperimentConfig& config);

struct RunManifest {
    std::string command;
    std::string source;
    std::string output_dir;
    ExperimentConfig config;
};

std::string manifest_to_json(const RunManifest& manifest);

std::string to_string(AlgorithmKind kind);
std::string to_string(MixingRule rule);
std::string to_string(Transfer transfer);
std::string to_string(ChangeKind kind);

}  // namespace combofilter

#endif  // COMBOFILTER_CONFIG_HPP
