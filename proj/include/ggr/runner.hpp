#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ggr/error.hpp"
#include "ggr/report_io.hpp"

namespace ggr
{
    inline constexpr const char* commands[] = {"gen", "gabor", "cheeger", "entire", "stability"};

    /// A parsed experiment: the subcommand and its parameter block. Relative input paths
    /// resolve against base_dir (the config file's directory).
    struct ExperimentConfig
    {
        std::string command;
        Json params;
        std::filesystem::path base_dir = ".";
    };

    /// ErrorKind::config on malformed JSON, an unknown command, or a "command" field that
    /// disagrees with `command`.
    ExperimentConfig parse_config(std::string_view text, const std::string& command,
                                  const std::filesystem::path& base_dir = ".");
    ExperimentConfig load_config(const std::filesystem::path& path, const std::string& command);

    struct RunContext
    {
        std::filesystem::path out_dir = ".";
        std::optional<std::uint64_t> seed;  ///< overrides every seed in the config
    };

    struct RunResult
    {
        std::vector<std::filesystem::path> artifacts;
        std::vector<std::string> summary;  ///< one line per result
    };

    /// Runs the pipeline for the config and writes its artifacts atomically into out_dir.
    RunResult run_config(const ExperimentConfig& config, const RunContext& context);

    /// 2 config, 3 admissibility, 4 non-convergence, 5 I/O. Invalid arguments inside a
    /// config are config errors.
    int exit_code(ErrorKind kind);

    /// load + run with errors mapped to exit codes; summaries to `out`, errors to `err`.
    int run_command(const std::string& command, const std::filesystem::path& config_path, const RunContext& context,
                    std::ostream& out, std::ostream& err);
}  // namespace ggr
