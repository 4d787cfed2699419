#include <doctest.h>

#include <filesystem>

#include "meltpinn/optimizer/adam.hpp"
#include "meltpinn/optimizer/train.hpp"

using namespace meltpinn;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("zero gradient leaves parameters and moments at zero") {
  auto net = nn::init_params({2, 4, 1}, 3);
  const auto before = net;
  auto state = opt::AdamState::zeros_like(net, {});
  opt::adam_step(net, nn::NetworkParams<double>::zeros_like(net), state);
  CHECK(state.step == 1);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    CHECK(net.weights[l] == before.weights[l]);
    CHECK(net.biases[l] == before.biases[l]);
    CHECK(state.m.weights[l].isZero(0.0));
    CHECK(state.v.weights[l].isZero(0.0));
  }
}

TEST_CASE("first bias-corrected step") {
  for (double g : {2.5, -0.003, 1e-7}) {
    VectorXd p = VectorXd::Constant(1, 1.0);
    opt::VectorAdamState s;
    opt::adam_step(p, VectorXd::Constant(1, g), s);
    const double expect = 1.0 - 1e-3 * g / (std::abs(g) + 1e-8);
    CHECK(p(0) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(s.v(0) >= 0.0);
  }
}

TEST_CASE("Adam is deterministic and rejects non-finite gradients") {
  auto net = nn::init_params({3, 5, 2}, 1);
  auto grad = nn::init_params({3, 5, 2}, 2);
  auto a = net, b = net;
  auto sa = opt::AdamState::zeros_like(net, {}), sb = sa;
  for (int i = 0; i < 5; ++i) {
    opt::adam_step(a, grad, sa);
    opt::adam_step(b, grad, sb);
  }
  for (std::size_t l = 0; l < net.num_layers(); ++l) CHECK(a.weights[l] == b.weights[l]);

  grad.biases[1](0) = std::nan("");
  const auto frozen = a;
  try {
    opt::adam_step(a, grad, sa);
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("slot 3") != std::string::npos);
  }
  CHECK(a.weights[0] == frozen.weights[0]);
  CHECK(sa.step == 5);
}

TEST_CASE("Adam reaches the minimum of a least-squares parabola fit") {
  // Fit y = a x^2 + b x + c to noisy samples; the minimizer is the normal-equation solution.
  const int n = 40;
  MatrixXd design(n, 3);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double x = -1.0 + 2.0 * i / (n - 1);
    design.row(i) << x * x, x, 1.0;
    y(i) = 0.7 * x * x - 0.4 * x + 0.2 + 0.05 * std::sin(17.0 * x);
  }
  const VectorXd best = design.colPivHouseholderQr().solve(y);
  VectorXd p = VectorXd::Zero(3);
  opt::VectorAdamState s;
  s.config.lr = 1e-2;
  const opt::LrSchedule schedule;
  const int steps = 5000;
  for (int k = 0; k < steps; ++k) {
    const VectorXd grad = 2.0 / n * design.transpose() * (design * p - y);
    opt::adam_step(p, grad, s, schedule.rate(s.config.lr, k, steps));
  }
  CHECK((p - best).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("step-decay schedule") {
  opt::LrSchedule s;
  CHECK(s.rate(1e-3, 0, 100) == 1e-3);
  CHECK(s.rate(1e-3, 24, 100) == 1e-3);
  CHECK(s.rate(1e-3, 25, 100) == 5e-4);
  CHECK(s.rate(1e-3, 99, 100) == 1.25e-4);
  s.kind = opt::LrScheduleKind::Constant;
  CHECK(s.rate(1e-3, 99, 100) == 1e-3);
}

namespace {

physics::MaterialPhaseProps plain_material() {
  physics::MaterialPhaseProps m;
  m.name = "plain";
  m.density_liquid = m.density_solid = 1.0;
  m.heat_capacity_liquid = m.heat_capacity_solid = physics::PropertyCurve::constant(1.0);
  m.conductivity_liquid = m.conductivity_solid = physics::PropertyCurve::constant(0.1);
  m.solidus = 10.0;
  m.liquidus = 11.0;
  m.gravity.setZero();
  return m;
}

// T = 3 on the whole boundary of [0, 1] with a wide ramp; the exact solution is T = 3.
loss::PinnProblem constant_problem() {
  loss::PinnProblem p;
  p.name = "constant";
  p.box.t_min = 0.0;
  p.box.t_max = 1.0;
  p.box.lower = VectorXd::Zero(1);
  p.box.upper = VectorXd::Ones(1);
  p.outputs = 1;
  p.output_names = {"T"};
  p.regions = {{plain_material(), VectorXd::Zero(1), VectorXd::Ones(1), {}}};
  p.dirichlet_faces = {true, true};
  p.dirichlet.ramp_width = 0.5;
  p.dirichlet.distance = nn::box_face_distance(p.box.lower, p.box.upper, p.dirichlet_faces);
  p.dirichlet.boundary_value = {nn::constant_jet(3.0)};
  p.scaling = {VectorXd::Constant(1, 3.0), VectorXd::Ones(1)};
  return p;
}

opt::TrainConfig small_config(int epochs) {
  opt::TrainConfig c;
  c.epochs = epochs;
  c.counts = {64, 0, 0, 16, 0};
  c.seed = 5;
  c.track_bc_mismatch = true;
  return c;
}

}  // namespace

TEST_CASE("training on a constant-solution problem does not increase the loss") {
  const auto p = constant_problem();
  const auto r = opt::train(p, nn::init_params({2, 16, 16, 1}, 1), small_config(100));
  REQUIRE(r.history.size() == 100);
  const double first = r.history.front().loss.total, last = r.history.back().loss.total;
  CHECK(last <= first * 1.05);
  for (std::size_t i = 0; i < r.history.size(); ++i) CHECK(r.history[i].epoch == static_cast<int>(i));
}

TEST_CASE("training is bitwise reproducible and writes checkpoints") {
  const auto p = constant_problem();
  const auto dir = std::filesystem::temp_directory_path() / "meltpinn_train_ckpt";
  std::filesystem::remove_all(dir);
  auto c = small_config(12);
  c.checkpoint_interval = 5;
  c.checkpoint_dir = dir.string();
  const auto a = opt::train(p, nn::init_params({2, 8, 1}, 4), c);
  c.checkpoint_dir.clear();
  const auto b = opt::train(p, nn::init_params({2, 8, 1}, 4), c);
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].loss.total == b.history[i].loss.total);
    CHECK(a.history[i].lr == b.history[i].lr);
  }
  CHECK(a.params.weights[0] == b.params.weights[0]);
  CHECK(std::filesystem::exists(opt::checkpoint_path(dir.string(), 5)));
  CHECK(std::filesystem::exists(opt::checkpoint_path(dir.string(), 10)));
  CHECK_FALSE(std::filesystem::exists(opt::checkpoint_path(dir.string(), 12)));
  const auto ckpt = nn::load_checkpoint(opt::checkpoint_path(dir.string(), 10));
  CHECK(ckpt.layer_sizes == a.params.layer_sizes);
  std::filesystem::remove_all(dir);
}

TEST_CASE("divergence aborts and keeps the last good parameters") {
  auto p = constant_problem();
  int calls = 0;
  p.heat_source = [&calls](const VectorXd&) { return ++calls > 64 * 3 ? std::nan("") : 0.0; };
  const auto dir = std::filesystem::temp_directory_path() / "meltpinn_diverge";
  std::filesystem::remove_all(dir);
  auto c = small_config(10);
  c.checkpoint_dir = dir.string();
  try {
    opt::train(p, nn::init_params({2, 8, 1}, 4), c);
    FAIL("expected divergence");
  } catch (const opt::DivergenceError& e) {
    CHECK(e.epoch() == 3);
  }
  CHECK(std::filesystem::exists(dir / "last_good.ckpt"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("hard and soft boundary modes under matched seeds") {
  const auto p = constant_problem();
  auto c = small_config(30);
  c.bc_mode = loss::BcMode::Hard;
  const auto hard = opt::train(p, nn::init_params({2, 16, 1}, 2), c);
  c.bc_mode = loss::BcMode::Soft;
  c.weights.soft_bc = 1.0 / 3.0;
  const auto soft = opt::train(p, nn::init_params({2, 16, 1}, 2), c);
  REQUIRE(hard.history.size() == soft.history.size());
  for (std::size_t i = 0; i < hard.history.size(); ++i) {
    CHECK(hard.history[i].bc_mismatch == 0.0);
    CHECK(soft.history[i].bc_mismatch > 0.0);
    CHECK(hard.history[i].epoch == soft.history[i].epoch);
  }
}

TEST_CASE("training configuration validation") {
  opt::TrainConfig c;
  c.epochs = 0;
  CHECK_THROWS_AS(c.validate(), ContractViolation);
  c.epochs = 10;
  c.counts.interior = 0;
  CHECK_THROWS_AS(c.validate(), ContractViolation);
  c.counts.interior = 10;
  c.weights.pde_interior = 0.9;
  CHECK_THROWS_AS(c.validate(), ContractViolation);
}

TEST_CASE("fixed interior pool") {
  const auto p = constant_problem();
  auto c = small_config(6);
  c.interior_pool = 100;
  const auto a = opt::train(p, nn::init_params({2, 8, 1}, 4), c);
  const auto b = opt::train(p, nn::init_params({2, 8, 1}, 4), c);
  for (std::size_t i = 0; i < a.history.size(); ++i) CHECK(a.history[i].loss.total == b.history[i].loss.total);
  c.interior_pool = 10;  // smaller than the batch: the whole pool every epoch
  CHECK(opt::train(p, nn::init_params({2, 8, 1}, 4), c).history.size() == 6);
  c.interior_pool = -1;
  CHECK_THROWS_AS(c.validate(), ContractViolation);
}
