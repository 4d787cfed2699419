#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "meltpinn/cli_io/config.hpp"
#include "meltpinn/stefan/study.hpp"

namespace meltpinn::io {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitDiverged = 3 };

struct CommandOptions {
  std::string config_path;             // required for train and eval
  std::string out_dir;                 // overrides the config's output_dir
  std::optional<std::uint64_t> seed;   // overrides train and network seeds
  bool full_scale = false;             // allows 3D benchmark training
  std::string checkpoint;              // eval input; defaults to <out>/model.ckpt
  int threads = 1;
};

// Solidification run settings taken from a configuration.
stefan::PinnRunSpec stefan_run_spec(const RunConfig& c);

// Each command reports progress on `log` and returns a process exit code.
int cmd_train(const CommandOptions& opts, std::ostream& log);
int cmd_eval(const CommandOptions& opts, std::ostream& log);
int cmd_bench(const std::string& which, const CommandOptions& opts, std::ostream& log);

}  // namespace meltpinn::io
