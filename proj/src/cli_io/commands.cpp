#include "meltpinn/cli_io/commands.hpp"

#include <chrono>
#include <filesystem>
#include <ostream>

#include "meltpinn/ambench/ambench.hpp"
#include "meltpinn/cli_io/config.hpp"
#include "meltpinn/cli_io/report.hpp"
#include "meltpinn/loss/model.hpp"
#include "meltpinn/stefan/analytic.hpp"
#include "meltpinn/stefan/study.hpp"

namespace meltpinn::io {

namespace fs = std::filesystem;

namespace {

struct Setup {
  RunConfig config;
  std::string out;
  std::string hash;
};

Setup prepare(const CommandOptions& opts, bool config_required) {
  Setup s;
  if (opts.config_path.empty()) {
    if (config_required) throw ConfigError("--config", "a configuration file is required");
    s.config = default_config();
  } else {
    s.config = load_config(opts.config_path);
  }
  s.hash = hex64(fnv1a64(canonical_json(s.config)));
  if (opts.seed) {
    s.config.train.seed = *opts.seed;
    s.config.network_seed = *opts.seed;
  }
  s.out = opts.out_dir.empty() ? s.config.out_dir : opts.out_dir;
  fs::create_directories(s.out);
  return s;
}

Manifest manifest_for(const Setup& s, const std::string& command) {
  Manifest m;
  m.command = command;
  m.problem = s.config.problem;
  m.config_hash = s.hash;
  m.seed = s.config.train.seed;
  return m;
}

std::string in(const Setup& s, const std::string& name) { return (fs::path(s.out) / name).string(); }

loss::PinnProblem build_problem(const RunConfig& c) {
  switch (c.kind()) {
    case ProblemKind::Stefan:
      return stefan::make_stefan_problem({c.stefan.ramp_fraction, c.stefan.initial_points, c.stefan.mushy_width});
    case ProblemKind::Mms:
      return ambench::make_mms_problem(200, c.train.seed);
    case ProblemKind::AmBench: {
      auto p = ambench::make_problem(ambench::build_case(c.case_id()));
      if (!c.ambench.dataset.empty()) {
        auto w = ambench::load_labeled_window(c.ambench.dataset, c.ambench.window_min, c.ambench.window_max);
        for (auto& l : w.labels) l.scale = l.field == "T" ? p.scaling.scale(4) : l.field == "p" ? p.scaling.scale(3) : 1.0;
        p.labels = std::move(w.labels);
      }
      return p;
    }
  }
  throw ContractViolation("unhandled problem kind");
}

std::vector<int> layer_sizes(const RunConfig& c, const loss::PinnProblem& p) {
  std::vector<int> sizes{p.box.input_dim()};
  sizes.insert(sizes.end(), c.hidden.begin(), c.hidden.end());
  sizes.push_back(p.outputs);
  return sizes;
}

std::string join_sizes(const std::vector<int>& sizes) {
  std::string out;
  for (int v : sizes) out += (out.empty() ? "" : "x") + std::to_string(v);
  return out;
}


std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

CsvTable interface_table(const std::vector<std::string>& labels, const std::vector<stefan::Assessment>& runs) {
  CsvTable t{{"t", "analytic"}, {}};
  for (const auto& l : labels) t.header.push_back(l);
  for (std::size_t j = 0; j < runs.front().t.size(); ++j) {
    std::vector<double> row{runs.front().t[j], stefan::analytic_interface(runs.front().t[j])};
    for (const auto& r : runs) row.push_back(r.interface_x[j]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void log_epoch(std::ostream& log, const opt::HistoryRow& r, int epochs) {
  const int every = std::max(1, epochs / 20);
  if (r.epoch % every == 0 || r.epoch == epochs - 1)
    log << "epoch " << r.epoch << " total " << format_double(r.loss.total) << " lr " << r.lr << std::endl;
}

template <typename Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractViolation& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const opt::DivergenceError& e) {
    log << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

// ---- bench bodies -----------------------------------------------------------------

int bench_fem(const Setup& s, const CommandOptions& opts, std::ostream& log, Manifest& m) {
  const std::vector<int> elements{50, 100, 150, 200};
  const auto runs = stefan::fem_refinement(elements, stefan::FemOptions{}, opts.threads);
  CsvTable table{{"n_x", "l2_error", "max_interface_error", "seconds"}, {}};
  std::vector<stefan::Assessment> series;
  std::vector<std::string> labels;
  bool decreasing = true;
  double total_seconds = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    table.rows.push_back({double(r.elements), r.assessment.l2_error, r.assessment.max_interface_error, r.seconds});
    series.push_back(r.assessment);
    labels.push_back("n_x_" + std::to_string(r.elements));
    if (i > 0) decreasing = decreasing && r.assessment.l2_error < runs[i - 1].assessment.l2_error;
    total_seconds += r.seconds;
  }
  write_text(in(s, "fem_refine.csv"), to_csv(table));
  write_text(in(s, "fem_interface.csv"), to_csv(interface_table(labels, series)));
  const bool iface = runs.back().assessment.max_interface_error < 0.03;
  std::string summary = verdict(decreasing) + " fem-refine l2 strictly decreasing over n_x\n" + verdict(iface) +
                        " fem-refine n_x=200 interface within 3% (max " +
                        format_double(runs.back().assessment.max_interface_error) + ")\n";
  write_text(in(s, "summary.txt"), summary);
  log << summary;
  m.artifacts = {"fem_refine.csv", "fem_interface.csv", "summary.txt"};
  m.metrics = {{"l2_error_n200", runs.back().assessment.l2_error}, {"seconds", total_seconds}};
  return decreasing && iface ? kExitOk : kExitFailure;
}

int bench_pinn(const Setup& s, const CommandOptions& opts, std::ostream& log, Manifest& m) {
  const std::vector<int> pools{50 * 50, 100 * 100, 150 * 150, 200 * 200};
  const auto runs = stefan::pinn_refinement(stefan_run_spec(s.config), pools, opts.threads);
  CsvTable table{{"collocation_points", "l2_error", "max_interface_error", "seconds"}, {}};
  std::vector<stefan::Assessment> series;
  std::vector<std::string> labels;
  bool non_increasing = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& a = runs[i].assessment;
    table.rows.push_back({double(pools[i]), a.l2_error, a.max_interface_error, runs[i].seconds});
    series.push_back(a);
    labels.push_back("n_" + std::to_string(pools[i]));
    if (i > 0) non_increasing = non_increasing && a.l2_error <= runs[i - 1].assessment.l2_error;
  }
  write_text(in(s, "pinn_refine.csv"), to_csv(table));
  write_text(in(s, "pinn_interface.csv"), to_csv(interface_table(labels, series)));
  const auto& best = runs.back().assessment;
  const std::string summary = verdict(non_increasing) + " pinn-refine l2 non-increasing over collocation count\n" +
                              verdict(best.l2_error < 0.02) + " pinn-refine largest set l2 < 2% (" +
                              format_double(best.l2_error) + ")\n" + verdict(best.max_interface_error < 0.05) +
                              " pinn-refine largest set interface within 5% (" +
                              format_double(best.max_interface_error) + ")\n";
  write_text(in(s, "summary.txt"), summary);
  log << summary;
  m.artifacts = {"pinn_refine.csv", "pinn_interface.csv", "summary.txt"};
  m.metrics = {{"l2_error_largest", best.l2_error}};
  return kExitOk;
}

int bench_bc(const Setup& s, const CommandOptions& opts, std::ostream& log, Manifest& m) {
  const auto cmp = stefan::compare_bc_modes(stefan_run_spec(s.config), opts.threads);
  const auto& h = cmp.hard.result.history;
  const auto& so = cmp.soft.result.history;
  write_text(in(s, "history_hard.csv"), to_csv(history_table(h)));
  write_text(in(s, "history_soft.csv"), to_csv(history_table(so)));
  CsvTable mismatch{{"epoch", "hard", "soft"}, {}};
  bool hard_zero = true, soft_positive = true;
  for (std::size_t i = 0; i < h.size(); ++i) {
    mismatch.rows.push_back({double(h[i].epoch), h[i].bc_mismatch, so[i].bc_mismatch});
    hard_zero = hard_zero && h[i].bc_mismatch == 0.0;
    soft_positive = soft_positive && so[i].bc_mismatch > 0.0;
  }
  write_text(in(s, "bc_mismatch.csv"), to_csv(mismatch));
  const double pde_hard = h.back().loss.pde_interior + h.back().loss.pde_neumann;
  const double pde_soft = so.back().loss.pde_interior + so.back().loss.pde_neumann;
  const std::string summary =
      verdict(hard_zero) + " hard-vs-soft hard boundary mismatch is zero at every epoch\n" + verdict(soft_positive) +
      " hard-vs-soft soft boundary mismatch is positive\n" + verdict(pde_hard <= pde_soft) +
      " hard-vs-soft final PDE loss hard " + format_double(pde_hard) + " <= soft " + format_double(pde_soft) + "\n";
  write_text(in(s, "summary.txt"), summary);
  log << summary;
  m.artifacts = {"history_hard.csv", "history_soft.csv", "bc_mismatch.csv", "summary.txt"};
  m.metrics = {{"final_pde_hard", pde_hard}, {"final_pde_soft", pde_soft}};
  return kExitOk;
}

int bench_mms(const Setup& s, std::ostream& log, Manifest& m) {
  const auto start = std::chrono::steady_clock::now();
  const auto rep = ambench::mms_verify_3d(10000, s.config.train.seed);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = rep.max_scaled < 1e-8;
  const std::string line = verdict(ok) + " mms points=" + std::to_string(rep.points) +
                           " max_scaled_residual=" + format_double(rep.max_scaled) +
                           " threshold=1e-8 seconds=" + format_double(secs) + "\n";
  write_text(in(s, "mms.txt"), line);
  log << line;
  m.artifacts = {"mms.txt"};
  m.metrics = {{"max_scaled_residual", rep.max_scaled}};
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

stefan::PinnRunSpec stefan_run_spec(const RunConfig& c) {
  stefan::PinnRunSpec spec;
  spec.hidden = c.hidden;
  spec.network_seed = c.network_seed;
  spec.train = c.train;
  spec.options = {c.stefan.ramp_fraction, c.stefan.initial_points, c.stefan.mushy_width};
  spec.focus_fraction = c.stefan.focus_fraction;
  spec.focus_half_width = c.stefan.focus_half_width;
  return spec;
}

int cmd_train(const CommandOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const Setup s = prepare(opts, true);
    const RunConfig& c = s.config;
    if (c.kind() == ProblemKind::AmBench && !opts.full_scale)
      throw ConfigError("problem", "3D benchmark training is beyond desk scale; pass --full-scale to run it");
    const auto problem = build_problem(c);
    opt::TrainConfig tc = c.train;
    tc.checkpoint_dir = s.out;
    if (c.kind() == ProblemKind::Stefan && c.stefan.focus_fraction > 0.0)
      tc.focus = stefan::stefan_focus(c.stefan.focus_fraction, c.stefan.focus_half_width);

    Manifest m = manifest_for(s, "train");
    std::vector<opt::HistoryRow> history;
    try {
      const auto result = opt::train(problem, nn::init_params(layer_sizes(c, problem), c.network_seed), tc,
                                     [&](const opt::HistoryRow& r) {
                                       history.push_back(r);
                                       log_epoch(log, r, tc.epochs);
                                     });
      nn::save_checkpoint(result.params, in(s, "model.ckpt"));
      m.artifacts = {"model.ckpt", "history.csv", "manifest.json"};
      if (c.kind() == ProblemKind::Stefan) {
        const auto a = stefan::assess_pinn(result.params, problem);
        m.metrics = {{"l2_error", a.l2_error}, {"max_interface_error", a.max_interface_error}};
        write_text(in(s, "interface.csv"), to_csv(interface_table({"pinn"}, {a})));
        m.artifacts.push_back("interface.csv");
      }
    } catch (const opt::DivergenceError& e) {
      m.status = "diverged";
      m.artifacts = {"last_good.ckpt", "history.csv", "manifest.json"};
      write_text(in(s, "history.csv"), to_csv(history_table(history)));
      write_text(in(s, "manifest.json"), manifest_json(m));
      throw;
    }
    write_text(in(s, "history.csv"), to_csv(history_table(history)));
    write_text(in(s, "manifest.json"), manifest_json(m));
    log << "wrote " << s.out << '\n';
    return int(kExitOk);
  });
}

int cmd_eval(const CommandOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const Setup s = prepare(opts, true);
    const RunConfig& c = s.config;
    const auto problem = build_problem(c);
    const std::string ckpt = opts.checkpoint.empty() ? in(s, "model.ckpt") : opts.checkpoint;
    const auto net = nn::load_checkpoint(ckpt);
    const auto expected = layer_sizes(c, problem);
    if (net.layer_sizes != expected)
      throw ContractViolation("checkpoint layers " + join_sizes(net.layer_sizes) + " do not match the configured " +
                              join_sizes(expected) + " for problem '" + c.problem + "'");

    const int dim = problem.box.input_dim();
    const Eigen::VectorXd lo = problem.box.input_lower(), hi = problem.box.input_upper();
    Eigen::Index total = 1;
    for (int n : c.eval_grid) total *= n;
    Eigen::MatrixXd pts(dim, total);
    for (Eigen::Index k = 0; k < total; ++k) {
      Eigen::Index rem = k;
      for (int a = dim - 1; a >= 0; --a) {
        const int n = c.eval_grid[a];
        const Eigen::Index i = rem % n;
        rem /= n;
        pts(a, k) = n == 1 ? lo(a) : lo(a) + (hi(a) - lo(a)) * double(i) / (n - 1);
      }
    }
    CsvTable table;
    const char* names[] = {"t", "x", "y", "z"};
    for (int a = 0; a < dim; ++a) table.header.push_back(names[a]);
    for (const auto& n : problem.output_names) table.header.push_back(n);
    const bool stefan = c.kind() == ProblemKind::Stefan;
    if (stefan) table.header.push_back("T");
    if (total > 0) {
      const Eigen::MatrixXd out = loss::evaluate_outputs(net, problem, loss::BcMode::Hard, pts);
      for (Eigen::Index k = 0; k < total; ++k) {
        std::vector<double> row(pts.col(k).data(), pts.col(k).data() + dim);
        for (Eigen::Index o = 0; o < out.rows(); ++o) row.push_back(out(o, k));
        if (stefan) row.push_back(out(pts(1, k) <= 0.0 ? stefan::kMoldOutput : stefan::kAluminumOutput, k));
        table.rows.push_back(std::move(row));
      }
    }
    write_text(in(s, "eval.csv"), to_csv(table));
    Manifest m = manifest_for(s, "eval");
    m.artifacts = {"eval.csv", "manifest.json"};
    if (c.kind() == ProblemKind::AmBench) {
      const double t = problem.box.t_max;
      const ambench::FieldSampler sampler = [&](double x, double y, double z) {
        Eigen::Vector4d q(t, x, y, z);
        return loss::evaluate_outputs(net, problem, loss::BcMode::Hard, q)(4, 0);
      };
      const auto dims = ambench::melt_pool_dims(sampler, problem.box, problem.regions[0].material.liquidus);
      write_text(in(s, "dimensions.json"), dimension_report_json(c.case_id(), dims));
      m.artifacts.push_back("dimensions.json");
    }
    write_text(in(s, "manifest.json"), manifest_json(m));
    log << "wrote " << table.rows.size() << " rows to " << in(s, "eval.csv") << '\n';
    return int(kExitOk);
  });
}

int cmd_bench(const std::string& which, const CommandOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    if (which != "fem-refine" && which != "pinn-refine" && which != "hard-vs-soft" && which != "mms")
      throw ContractViolation("unknown benchmark '" + which + "' (expected fem-refine, pinn-refine, hard-vs-soft or mms)");
    const Setup s = prepare(opts, false);
    if (which == "pinn-refine" || which == "hard-vs-soft")
      if (s.config.kind() != ProblemKind::Stefan) throw ConfigError("problem", which + " runs on the stefan problem");
    Manifest m = manifest_for(s, "bench " + which);
    int code = kExitOk;
    if (which == "fem-refine") code = bench_fem(s, opts, log, m);
    else if (which == "pinn-refine") code = bench_pinn(s, opts, log, m);
    else if (which == "hard-vs-soft") code = bench_bc(s, opts, log, m);
    else code = bench_mms(s, log, m);
    m.artifacts.push_back("manifest.json");
    m.status = code == kExitOk ? "ok" : "failed";
    write_text(in(s, "manifest.json"), manifest_json(m));
    return code;
  });
}

}  // namespace meltpinn::io
