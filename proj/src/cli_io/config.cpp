#include "meltpinn/cli_io/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "meltpinn/loss/sampling.hpp"

namespace meltpinn::io {

using nlohmann::json;

namespace {

// Object reader that remembers which keys were consumed so that leftovers
// can be reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    const json* v = find(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
        if constexpr (std::is_unsigned_v<T>)
          if (v->is_number_integer() && !v->is_number_unsigned())
            throw ConfigError(field(key), "expected a non-negative integer");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      }
      out = v->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), e.what());
    }
  }

  void get_ints(const std::string& key, std::vector<int>& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array()) throw ConfigError(field(key), "expected an array of integers");
    out.clear();
    for (const auto& e : *v) {
      if (!e.is_number_integer()) throw ConfigError(field(key), "expected an array of integers");
      out.push_back(e.get<int>());
    }
  }

  std::optional<Reader> child(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return Reader(*v, field(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_train(Reader& r, opt::TrainConfig& t) {
  r.get("epochs", t.epochs);
  r.get("seed", t.seed);
  r.get("interior_pool", t.interior_pool);
  r.get("checkpoint_interval", t.checkpoint_interval);
  std::string mode = t.bc_mode == loss::BcMode::Hard ? "hard" : "soft";
  r.get("bc_mode", mode);
  if (mode == "hard") t.bc_mode = loss::BcMode::Hard;
  else if (mode == "soft") t.bc_mode = loss::BcMode::Soft;
  else throw ConfigError(r.field("bc_mode"), "expected 'hard' or 'soft'");
  std::string sampling = loss::to_string(t.sampling);
  r.get("sampling", sampling);
  try {
    t.sampling = loss::parse_sampling_strategy(sampling);
  } catch (const ContractViolation& e) {
    throw ConfigError(r.field("sampling"), e.what());
  }
  if (auto a = r.child("adam")) {
    a->get("lr", t.adam.lr);
    a->get("beta1", t.adam.beta1);
    a->get("beta2", t.adam.beta2);
    a->get("eps", t.adam.eps);
    a->finish();
  }
  if (auto s = r.child("schedule")) {
    std::string kind = t.schedule.kind == opt::LrScheduleKind::StepDecay ? "step" : "constant";
    s->get("kind", kind);
    if (kind == "step") t.schedule.kind = opt::LrScheduleKind::StepDecay;
    else if (kind == "constant") t.schedule.kind = opt::LrScheduleKind::Constant;
    else throw ConfigError(s->field("kind"), "expected 'step' or 'constant'");
    s->get("factor", t.schedule.factor);
    s->get("period_fraction", t.schedule.period_fraction);
    s->finish();
  }
  if (auto w = r.child("weights")) {
    w->get("pde_interior", t.weights.pde_interior);
    w->get("pde_neumann", t.weights.pde_neumann);
    w->get("soft_bc", t.weights.soft_bc);
    w->finish();
  }
  if (auto c = r.child("collocation")) {
    c->get("interior", t.counts.interior);
    c->get("traction", t.counts.traction);
    c->get("flux", t.counts.flux);
    c->get("dirichlet", t.counts.dirichlet);
    c->get("contact", t.counts.contact);
    c->finish();
  }
  r.finish();
}

// Validation messages start with the field they concern ("adam.lr must ...",
// "weights: ..."); map that onto the config path.
std::string field_of(const std::string& message) {
  const std::string token = message.substr(0, message.find_first_of(" :"));
  if (token == "train.interior_points") return "train.collocation.interior";
  if (token == "train.focus.fraction") return "stefan.focus_fraction";
  if (token.rfind("train", 0) == 0) return token;
  for (const char* prefix : {"adam", "schedule", "weights"})
    if (token.rfind(prefix, 0) == 0) return "train." + token;
  return "train";
}

void validate(const RunConfig& c) {
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(c.schema_version) +
                                            " (expected " + std::to_string(kSchemaVersion) + ")");
  (void)c.kind();
  if (c.hidden.empty()) throw ConfigError("network.hidden", "need at least one hidden layer");
  for (int h : c.hidden)
    if (h < 1) throw ConfigError("network.hidden", "layer widths must be positive");
  try {
    c.train.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const ContractViolation& e) {
    throw ConfigError(field_of(e.what()), e.what());
  }
  if (c.kind() == ProblemKind::Stefan) {
    if (!(c.stefan.ramp_fraction > 0.0 && c.stefan.ramp_fraction < 0.5))
      throw ConfigError("stefan.ramp_fraction", "must lie in (0, 0.5)");
    if (c.stefan.initial_points < 1) throw ConfigError("stefan.initial_points", "must be positive");
    if (!(c.stefan.mushy_width > 0.0)) throw ConfigError("stefan.mushy_width", "must be positive");
    if (!(c.stefan.focus_fraction >= 0.0 && c.stefan.focus_fraction < 1.0))
      throw ConfigError("stefan.focus_fraction", "must lie in [0, 1)");
    if (!(c.stefan.focus_half_width > 0.0 && c.stefan.focus_half_width <= 0.4))
      throw ConfigError("stefan.focus_half_width", "must lie in (0, 0.4]");
    if (c.train.counts.traction > 0 || c.train.counts.flux > 0)
      throw ConfigError("train.collocation", "the 1D benchmark has no traction or flux faces");
  }
  if (!c.ambench.dataset.empty() && !std::ifstream(c.ambench.dataset))
    throw ConfigError("ambench.dataset", "file '" + c.ambench.dataset + "' does not exist");
  if (!(c.ambench.window_min <= c.ambench.window_max))
    throw ConfigError("ambench.window", "window start must not exceed its end");
  const std::size_t inputs = c.kind() == ProblemKind::Stefan ? 2 : 4;
  if (c.eval_grid.size() != inputs)
    throw ConfigError("eval.grid", "expected " + std::to_string(inputs) + " counts (one per input axis)");
  for (int n : c.eval_grid)
    if (n < 0) throw ConfigError("eval.grid", "counts must be non-negative");
  if (c.out_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

}  // namespace

ProblemKind RunConfig::kind() const {
  if (problem == "stefan") return ProblemKind::Stefan;
  if (problem == "mms") return ProblemKind::Mms;
  if (problem == "ambench-A" || problem == "ambench-B" || problem == "ambench-C") return ProblemKind::AmBench;
  throw ConfigError("problem", "unknown problem '" + problem + "' (expected stefan, ambench-A/B/C or mms)");
}

std::string RunConfig::case_id() const { return kind() == ProblemKind::AmBench ? problem.substr(8) : ""; }

RunConfig default_config() {
  RunConfig c;
  c.train.epochs = 6000;
  c.train.seed = 1;
  c.train.counts = {500, 0, 0, 0, 64};
  c.train.track_bc_mismatch = true;
  return c;
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("not valid JSON: ") + e.what());
  }
  RunConfig c = default_config();
  Reader r(j, "");
  if (!r.find("schema_version")) throw ConfigError("schema_version", "required");
  r.get("schema_version", c.schema_version);
  r.get("problem", c.problem);
  r.get("output_dir", c.out_dir);
  if (auto n = r.child("network")) {
    n->get_ints("hidden", c.hidden);
    n->get("seed", c.network_seed);
    n->finish();
  }
  if (auto t = r.child("train")) read_train(*t, c.train);
  if (auto s = r.child("stefan")) {
    s->get("ramp_fraction", c.stefan.ramp_fraction);
    s->get("initial_points", c.stefan.initial_points);
    s->get("mushy_width", c.stefan.mushy_width);
    s->get("focus_fraction", c.stefan.focus_fraction);
    s->get("focus_half_width", c.stefan.focus_half_width);
    s->finish();
  }
  if (auto a = r.child("ambench")) {
    a->get("dataset", c.ambench.dataset);
    if (const json* w = a->find("window")) {
      if (!w->is_array() || w->size() != 2 || !(*w)[0].is_number() || !(*w)[1].is_number())
        throw ConfigError("ambench.window", "expected [t_min, t_max]");
      c.ambench.window_min = (*w)[0].get<double>();
      c.ambench.window_max = (*w)[1].get<double>();
    }
    a->finish();
  }
  if (auto e = r.child("eval")) {
    e->get_ints("grid", c.eval_grid);
    e->finish();
  } else if (c.kind() != ProblemKind::Stefan) {
    c.eval_grid = {5, 41, 17, 13};
  }
  r.finish();
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("--config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_json(const RunConfig& c) {
  const auto& t = c.train;
  json j;
  j["schema_version"] = c.schema_version;
  j["problem"] = c.problem;
  j["output_dir"] = c.out_dir;
  j["network"] = {{"hidden", c.hidden}, {"seed", c.network_seed}};
  j["train"] = {
      {"epochs", t.epochs},
      {"seed", t.seed},
      {"interior_pool", t.interior_pool},
      {"checkpoint_interval", t.checkpoint_interval},
      {"bc_mode", t.bc_mode == loss::BcMode::Hard ? "hard" : "soft"},
      {"sampling", loss::to_string(t.sampling)},
      {"adam", {{"lr", t.adam.lr}, {"beta1", t.adam.beta1}, {"beta2", t.adam.beta2}, {"eps", t.adam.eps}}},
      {"schedule",
       {{"kind", t.schedule.kind == opt::LrScheduleKind::StepDecay ? "step" : "constant"},
        {"factor", t.schedule.factor},
        {"period_fraction", t.schedule.period_fraction}}},
      {"weights",
       {{"pde_interior", t.weights.pde_interior},
        {"pde_neumann", t.weights.pde_neumann},
        {"soft_bc", t.weights.soft_bc}}},
      {"collocation",
       {{"interior", t.counts.interior},
        {"traction", t.counts.traction},
        {"flux", t.counts.flux},
        {"dirichlet", t.counts.dirichlet},
        {"contact", t.counts.contact}}}};
  j["stefan"] = {{"ramp_fraction", c.stefan.ramp_fraction},
                 {"initial_points", c.stefan.initial_points},
                 {"mushy_width", c.stefan.mushy_width},
                 {"focus_fraction", c.stefan.focus_fraction},
                 {"focus_half_width", c.stefan.focus_half_width}};
  j["ambench"] = {{"dataset", c.ambench.dataset}, {"window", {c.ambench.window_min, c.ambench.window_max}}};
  j["eval"] = {{"grid", c.eval_grid}};
  return j.dump();
}

}  // namespace meltpinn::io
