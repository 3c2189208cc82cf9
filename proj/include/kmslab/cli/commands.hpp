#pragma once

#include "kmslab/cli/run_config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kmslab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitInadmissible = 2,
  kExitHypothesis = 3,
  kExitNonConvergence = 4,
};

const std::vector<std::string>& command_names();

struct CommandOptions {
  std::optional<std::string> outdir;
  std::optional<std::string> label;
};

/// Runs one command on a parsed config. Every failure is mapped to an exit code;
/// nothing propagates.
int run_command(const std::string& command, RunConfig config, const CommandOptions& options,
                std::ostream& out, std::ostream& err);

/// Loads the config file first; a load failure is a config error.
int run_command_file(const std::string& command, const std::filesystem::path& config_path,
                     const CommandOptions& options, std::ostream& out, std::ostream& err);

} // namespace kmslab::cli
