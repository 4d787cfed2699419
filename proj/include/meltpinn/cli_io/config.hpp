#pragma once

// Declarative run configuration (JSON). Unknown keys are errors.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meltpinn/errors.hpp"
#include "meltpinn/optimizer/train.hpp"

namespace meltpinn::io {

inline constexpr int kSchemaVersion = 1;

// A configuration problem tied to one field, e.g. "train.weights".
class ConfigError : public ContractViolation {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : ContractViolation("config field '" + field + "': " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ProblemKind { Stefan, AmBench, Mms };

struct StefanSettings {
  double ramp_fraction = 0.02;
  int initial_points = 400;
  double mushy_width = 1.0;
  double focus_fraction = 0.5;  // share of interior points near the mold wall
  double focus_half_width = 0.05;  // m
};

struct AmBenchSettings {
  std::string dataset;  // optional labeled CSV
  double window_min = 1.2e-3;
  double window_max = 1.5e-3;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string problem = "stefan";  // stefan | ambench-A | ambench-B | ambench-C | mms
  std::vector<int> hidden{200, 200, 200, 200, 200};
  std::uint64_t network_seed = 1;
  opt::TrainConfig train;
  StefanSettings stefan;
  AmBenchSettings ambench;
  std::vector<int> eval_grid{100, 100};  // points per input axis, t first
  std::string out_dir = "out";

  ProblemKind kind() const;
  std::string case_id() const;  // "A", "B" or "C" for ambench problems
};

// Parses and validates; throws ConfigError naming the offending field.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Defaults used by commands that run without a config file.
RunConfig default_config();

// Canonical serialization (sorted keys) of the effective configuration.
std::string canonical_json(const RunConfig& c);

}  // namespace meltpinn::io
