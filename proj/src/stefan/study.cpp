#include "meltpinn/stefan/study.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "meltpinn/loss/model.hpp"
#include "meltpinn/parallel.hpp"
#include "meltpinn/stefan/analytic.hpp"

namespace meltpinn::stefan {

namespace {

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// values(i, j): temperature at x_i, t_j of the window grid.
Assessment assess_grid(const Eigen::MatrixXd& values, int nx, int nt) {
  const Slab& s = kWindowSlab;
  const double hx = (s.x_max - s.x_min) / (nx - 1), ht = (s.t_max - s.t_min) / (nt - 1);
  const Sampler lookup = [&](double x, double t) {
    return values(std::lround((x - s.x_min) / hx), std::lround((t - s.t_min) / ht));
  };
  Assessment a;
  a.l2_error = l2_error(lookup, analytic_temperature, s, nx, nt);
  const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(nx, s.x_min, s.x_max);
  for (int j = 0; j < nt; ++j) {
    const double t = s.t_min + j * ht;
    double xi = std::numeric_limits<double>::quiet_NaN();
    try {
      xi = extract_interface(xs, values.col(j), kMeltTemperature);
    } catch (const NumericalError&) {
    }
    a.t.push_back(t);
    a.interface_x.push_back(xi);
    const double err = std::isnan(xi) ? std::numeric_limits<double>::infinity()
                                      : std::abs(xi - analytic_interface(t)) / analytic_interface(t);
    a.max_interface_error = std::max(a.max_interface_error, err);
  }
  return a;
}

Eigen::MatrixXd window_points(int nx, int nt) {
  const Slab& s = kWindowSlab;
  Eigen::MatrixXd pts(2, nx * nt);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i) {
      pts(0, j * nx + i) = s.t_min + (s.t_max - s.t_min) * j / (nt - 1);
      pts(1, j * nx + i) = s.x_min + (s.x_max - s.x_min) * i / (nx - 1);
    }
  return pts;
}

}  // namespace

Assessment assess_field(const TemperatureField1D& field, int nx, int nt) {
  require(nx >= 2 && nt >= 2, "assessment grid needs at least 2 points per axis");
  Eigen::MatrixXd values(nx, nt);
  const Eigen::MatrixXd pts = window_points(nx, nt);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i) values(i, j) = field.sample(pts(1, j * nx + i), pts(0, j * nx + i));
  return assess_grid(values, nx, nt);
}

Eigen::VectorXd pinn_temperature(const nn::NetworkParams<double>& net, const loss::PinnProblem& problem,
                                 const Eigen::MatrixXd& points) {
  const Eigen::MatrixXd out = loss::evaluate_outputs(net, problem, loss::BcMode::Hard, points);
  Eigen::VectorXd temp(points.cols());
  for (Eigen::Index c = 0; c < points.cols(); ++c)
    temp(c) = out(points(1, c) <= 0.0 ? kMoldOutput : kAluminumOutput, c);
  return temp;
}

Assessment assess_pinn(const nn::NetworkParams<double>& net, const loss::PinnProblem& problem, int nx, int nt) {
  require(nx >= 2 && nt >= 2, "assessment grid needs at least 2 points per axis");
  const Eigen::VectorXd temp = pinn_temperature(net, problem, window_points(nx, nt));
  return assess_grid(Eigen::Map<const Eigen::MatrixXd>(temp.data(), nx, nt), nx, nt);
}

std::vector<FemRun> fem_refinement(const std::vector<int>& elements, const FemOptions& base, int threads) {
  std::vector<FemRun> runs(elements.size());
  const FemProblem problem = stefan_fem_problem();
  parallel_for(static_cast<int>(elements.size()), threads, [&](int i) {
    FemOptions o = base;
    o.elements = elements[i];
    const auto start = std::chrono::steady_clock::now();
    const auto field = fem_solve_1d(problem, o);
    runs[i].elements = elements[i];
    runs[i].seconds = elapsed(start);
    runs[i].assessment = assess_field(field);
  });
  return runs;
}

PinnRun run_stefan_pinn(const PinnRunSpec& spec, const opt::EpochCallback& on_epoch) {
  const auto problem = make_stefan_problem(spec.options);
  std::vector<int> sizes{problem.box.input_dim()};
  sizes.insert(sizes.end(), spec.hidden.begin(), spec.hidden.end());
  sizes.push_back(problem.outputs);
  opt::TrainConfig cfg = spec.train;
  if (spec.focus_fraction > 0.0) cfg.focus = stefan_focus(spec.focus_fraction, spec.focus_half_width);
  const auto start = std::chrono::steady_clock::now();
  PinnRun run;
  run.result = opt::train(problem, nn::init_params(sizes, spec.network_seed), cfg, on_epoch);
  run.seconds = elapsed(start);
  run.assessment = assess_pinn(run.result.params, problem);
  return run;
}

std::vector<PinnRun> pinn_refinement(const PinnRunSpec& base, const std::vector<int>& pool_sizes, int threads) {
  std::vector<PinnRun> runs(pool_sizes.size());
  parallel_for(static_cast<int>(pool_sizes.size()), threads, [&](int i) {
    PinnRunSpec spec = base;
    spec.train.interior_pool = pool_sizes[i];
    spec.train.checkpoint_dir.clear();
    runs[i] = run_stefan_pinn(spec);
  });
  return runs;
}

BcComparison compare_bc_modes(const PinnRunSpec& base, int threads) {
  PinnRunSpec hard = base;
  hard.train.bc_mode = loss::BcMode::Hard;
  hard.train.track_bc_mismatch = true;
  hard.train.checkpoint_dir.clear();
  if (hard.train.counts.dirichlet == 0) hard.train.counts.dirichlet = 64;
  PinnRunSpec soft = hard;
  soft.train.bc_mode = loss::BcMode::Soft;
  if (soft.train.weights.soft_bc <= 0.0) soft.train.weights.soft_bc = 1.0 / 3.0;
  hard.train.weights.soft_bc = 0.0;
  BcComparison out;
  parallel_for(2, threads, [&](int i) {
    if (i == 0) out.hard = run_stefan_pinn(hard);
    else out.soft = run_stefan_pinn(soft);
  });
  return out;
}

}  // namespace meltpinn::stefan
