#pragma once

#include <optional>

#include "torusnf/clusters.hpp"
#include "torusnf/config.hpp"
#include "torusnf/dynamics.hpp"

namespace torusnf {

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

/// Executes one subcommand (validate | partition | normal-form | evolve |
/// fit | all) against a config file. Returns the process exit code:
/// 0 ok, 1 parse error, 2 validation failure, 3 numerical abort (with a
/// diagnostic JSON next to the other artifacts).
int run_experiment(const std::filesystem::path& config_path, const std::string& subcommand,
                   const RunOptions& opts = {});

}  // namespace torusnf
