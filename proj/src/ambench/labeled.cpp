#include <array>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "meltpinn/ambench/ambench.hpp"

namespace meltpinn::ambench {

namespace {

constexpr const char* kHeader = "t,x,y,z,u,v,w,p,T";
constexpr const char* kColumns[] = {"t", "x", "y", "z", "u", "v", "w", "p", "T"};

std::optional<double> parse_cell(const std::string& cell, int column, long line) {
  if (cell.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
    throw ParseError(std::string("column ") + kColumns[column] + ": bad number '" + cell + "'", line);
  return v;
}

struct Builder {
  std::vector<Eigen::Vector4d> points;
  std::vector<Eigen::VectorXd> targets;

  loss::FieldLabels finish(const std::string& field, int components) const {
    loss::FieldLabels l;
    l.field = field;
    l.points.resize(4, static_cast<Eigen::Index>(points.size()));
    l.targets.resize(components, static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      l.points.col(static_cast<Eigen::Index>(i)) = points[i];
      l.targets.col(static_cast<Eigen::Index>(i)) = targets[i];
    }
    l.region.assign(points.size(), 0);
    return l;
  }
};

}  // namespace

Eigen::Index LabeledWindow::count(const std::string& field) const {
  for (const auto& l : labels)
    if (l.field == field) return l.count();
  return 0;
}

LabeledWindow parse_labeled_csv(const std::string& text, double t_min, double t_max) {
  require(t_min <= t_max, "labeled window needs t_min <= t_max");
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  bool header = false;
  Builder vel, pres, temp;
  LabeledWindow out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kHeader) throw ParseError(std::string("expected header '") + kHeader + "'", line_no);
      header = true;
      continue;
    }
    std::array<std::string, 9> cells;
    std::size_t n = 0, start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (n == cells.size()) throw ParseError("too many columns", line_no);
      cells[n++] = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (n != cells.size()) throw ParseError("expected 9 columns, found " + std::to_string(n), line_no);
    std::array<std::optional<double>, 9> v;
    for (int c = 0; c < 9; ++c) v[c] = parse_cell(cells[c], c, line_no);
    for (int c = 0; c < 4; ++c)
      if (!v[c]) throw ParseError(std::string("column ") + kColumns[c] + " is required", line_no);
    const int vel_cells = (v[4] ? 1 : 0) + (v[5] ? 1 : 0) + (v[6] ? 1 : 0);
    if (vel_cells != 0 && vel_cells != 3) throw ParseError("velocity needs u, v and w together", line_no);

    if (*v[0] < t_min || *v[0] > t_max) continue;
    ++out.rows;
    const Eigen::Vector4d pt(*v[0], *v[1], *v[2], *v[3]);
    if (vel_cells == 3) {
      vel.points.push_back(pt);
      vel.targets.push_back(Eigen::Vector3d(*v[4], *v[5], *v[6]));
    }
    if (v[7]) {
      pres.points.push_back(pt);
      pres.targets.push_back(Eigen::VectorXd::Constant(1, *v[7]));
    }
    if (v[8]) {
      temp.points.push_back(pt);
      temp.targets.push_back(Eigen::VectorXd::Constant(1, *v[8]));
    }
  }
  if (!header) throw ParseError("empty labeled dataset", line_no + 1);
  require(out.rows > 0, "no labeled samples in the time window [" + std::to_string(t_min) + ", " +
                            std::to_string(t_max) + "]");
  if (!vel.points.empty()) out.labels.push_back(vel.finish("u", 3));
  if (!pres.points.empty()) out.labels.push_back(pres.finish("p", 1));
  if (!temp.points.empty()) out.labels.push_back(temp.finish("T", 1));
  return out;
}

LabeledWindow load_labeled_window(const std::string& path, double t_min, double t_max) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open labeled dataset " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_labeled_csv(ss.str(), t_min, t_max);
}

}  // namespace meltpinn::ambench
