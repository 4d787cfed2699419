#include "meltpinn/cli_io/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Core>
#include <json.hpp>

namespace meltpinn::io {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    require(row.size() == table.header.size(), "CSV row width differs from the header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

CsvTable history_table(const std::vector<opt::HistoryRow>& history) {
  CsvTable t{{"epoch", "L_data", "L_pde1", "L_pde2", "total", "lr"}, {}};
  for (const auto& h : history)
    t.rows.push_back({static_cast<double>(h.epoch), h.loss.data, h.loss.pde_interior, h.loss.pde_neumann,
                      h.loss.total, h.lr});
  return t;
}

std::string manifest_json(const Manifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["problem"] = m.problem;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["artifacts"] = m.artifacts;
  j["status"] = m.status;
  if (!m.metrics.empty()) {
    j["metrics"] = nlohmann::json::object();
    for (const auto& [k, v] : m.metrics) j["metrics"][k] = v;
  }
  j["versions"] = {
      {"meltpinn", kVersion},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
      {"compiler", __VERSION__},
      {"checkpoint_format", nn::kCheckpointVersion}};
  return j.dump(2) + "\n";
}

ReferenceRange reference_length(const std::string& case_id) {
  if (case_id == "A") return {659.0, 21.0};
  if (case_id == "B") return {782.0, 21.0};
  if (case_id == "C") return {754.0, 46.0};
  throw ContractViolation("unknown benchmark case '" + case_id + "'");
}

std::string dimension_report_json(const std::string& case_id, const ambench::MeltPoolDims& dims) {
  const auto ref = reference_length(case_id);
  nlohmann::json j;
  j["case"] = case_id;
  j["units"] = "um";
  j["molten"] = dims.molten;
  if (!dims.molten) j["warning"] = "no point reached the liquidus";
  j["length"] = dims.length * 1e6;
  j["width"] = dims.width * 1e6;
  j["depth"] = dims.depth * 1e6;
  j["reference"] = {{"length", ref.center}, {"length_uncertainty", ref.half_width}, {"width", nullptr},
                    {"depth", nullptr}};
  return j.dump(2) + "\n";
}

}  // namespace meltpinn::io
