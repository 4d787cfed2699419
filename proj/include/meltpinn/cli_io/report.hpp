#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "meltpinn/ambench/ambench.hpp"
#include "meltpinn/optimizer/train.hpp"

namespace meltpinn::io {

inline constexpr const char* kVersion = "0.1.0";

// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Plain comma-separated table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
std::string to_csv(const CsvTable& table);
void write_text(const std::string& path, const std::string& text);

// epoch,L_data,L_pde1,L_pde2,total,lr
CsvTable history_table(const std::vector<opt::HistoryRow>& history);

struct Manifest {
  std::string command;
  std::string problem;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> artifacts;
  std::string status = "ok";
  std::vector<std::pair<std::string, double>> metrics;
};
std::string manifest_json(const Manifest& m);

// Reference ranges (um) of the measured melt-pool lengths.
struct ReferenceRange {
  double center = 0.0;
  double half_width = 0.0;
};
ReferenceRange reference_length(const std::string& case_id);

std::string dimension_report_json(const std::string& case_id, const ambench::MeltPoolDims& dims);

}  // namespace meltpinn::io
