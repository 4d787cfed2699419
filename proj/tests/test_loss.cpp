#include <doctest.h>

#include <random>

#include "meltpinn/loss/loss.hpp"
#include "meltpinn/loss/sampling.hpp"

using namespace meltpinn;
using namespace meltpinn::loss;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

physics::MaterialPhaseProps slab_material(double rho, double cp, double kappa) {
  physics::MaterialPhaseProps m;
  m.name = "slab";
  m.density_liquid = m.density_solid = rho;
  m.heat_capacity_liquid = m.heat_capacity_solid = physics::PropertyCurve::constant(cp);
  m.conductivity_liquid = m.conductivity_solid = physics::PropertyCurve::constant(kappa);
  m.solidus = 500.0;
  m.liquidus = 510.0;
  m.latent_heat = 1e4;
  m.gravity.setZero();
  return m;
}

// 1D conduction on [0, 1] x t in [0, 1], Dirichlet T = bc on both ends,
// optional heat-flux face at x = 1 instead.
PinnProblem slab_problem(double bc = 0.0) {
  PinnProblem p;
  p.name = "slab";
  p.box.t_min = 0.0;
  p.box.t_max = 1.0;
  p.box.lower = VectorXd::Zero(1);
  p.box.upper = VectorXd::Ones(1);
  p.outputs = 1;
  p.output_names = {"T"};
  p.regions = {{slab_material(2.0, 3.0, 5.0), VectorXd::Zero(1), VectorXd::Ones(1), {}}};
  p.dirichlet_faces = {true, true};
  p.dirichlet.ramp_width = 0.1;
  p.dirichlet.distance = nn::box_face_distance(p.box.lower, p.box.upper, p.dirichlet_faces);
  p.dirichlet.boundary_value = {nn::constant_jet(bc)};
  p.scaling = {VectorXd::Zero(1), VectorXd::Ones(1)};
  return p;
}

// Affine "network" T = a + b t + c x.
nn::NetworkParams<double> affine_net(double a, double b, double c) {
  nn::NetworkParams<double> net;
  net.layer_sizes = {2, 1};
  net.weights = {MatrixXd(1, 2)};
  net.weights[0] << b, c;
  net.biases = {VectorXd::Constant(1, a)};
  net.hidden_activation = nn::Activation::Identity;
  return net;
}

// Unit box is [-1, 1] after input normalization; undo it for affine nets.
nn::NetworkParams<double> physical_affine_net(const PinnProblem& p, double a, double b, double c) {
  const InputMap map = InputMap::for_box(p.box);
  // raw(z) with z = (x - center) * s  ->  T(x) = a + b t + c x
  const double st = map.inv_half_width(0), sx = map.inv_half_width(1);
  return affine_net(a + b * map.center(0) + c * map.center(1), b / st, c / sx);
}

MatrixXd random_points(const PinnProblem& p, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_box(p.box.input_lower(), p.box.input_upper(), n, rng, SamplingStrategy::UniformRandom);
}

double interior_loss(const nn::NetworkParams<double>& net, const PinnProblem& p, BcMode mode, const MatrixXd& pts) {
  ad::Tape<double> tape;
  const auto params = nn::register_params(tape, net);
  TapeContext ctx{tape, params, net.hidden_activation, p, mode};
  return loss_pde_interior(ctx, pts).scalar();
}

double neumann_loss(const nn::NetworkParams<double>& net, const PinnProblem& p, const CollocationBatch& b) {
  ad::Tape<double> tape;
  const auto params = nn::register_params(tape, net);
  TapeContext ctx{tape, params, net.hidden_activation, p, BcMode::Soft};
  return loss_pde_neumann(ctx, b).scalar();
}

}  // namespace

TEST_CASE("total loss weighting") {
  LossWeights w;
  CHECK(total_loss(w, 3.0, 3.0, 3.0) == doctest::Approx(3.0).epsilon(1e-15));
  w.pde_interior = w.pde_neumann = 0.0;
  CHECK(total_loss(w, 2.0, 5.0, 7.0) == 2.0);
  w.pde_interior = 1.0;
  CHECK(total_loss(w, 2.0, 5.0, 7.0) == 5.0);
  w.pde_interior = 0.8;
  w.pde_neumann = 0.3;
  CHECK_THROWS_AS(total_loss(w, 1.0, 1.0, 1.0), ContractViolation);
  w = LossWeights{-0.1, 0.2};
  CHECK_THROWS_AS(w.validate(), ContractViolation);
}

TEST_CASE("total loss is non-negative and zero only for zero components") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double l1 = 0.98 * u(rng), l2 = (1.0 - l1) * u(rng) * 0.99;
    LossWeights w{l1 + 1e-3, l2 + 1e-3};
    const double a = u(rng), b = u(rng), c = u(rng);
    CHECK(total_loss(w, a, b, c) >= 0.0);
    CHECK(total_loss(w, 0.0, 0.0, 0.0) == 0.0);
    CHECK(total_loss(w, 0.0, 0.0, c) > 0.0);
  }
}

TEST_CASE("plain data loss") {
  MatrixXd y = MatrixXd::Random(1, 5);
  CHECK(loss_data({{y, y, 1.0}}) == 0.0);
  CHECK(loss_data({{MatrixXd::Constant(1, 1, 302.0), MatrixXd::Constant(1, 1, 300.0), 1.0}}) == 4.0);
  CHECK(loss_data({{MatrixXd(1, 0), MatrixXd(1, 0), 1.0}}) == 0.0);
  CHECK(mean_square_residuals({MatrixXd::Constant(1, 4, 3.0)}, 1.0) == 9.0);
}

TEST_CASE("tape data loss matches an independent two-pass computation") {
  PinnProblem p = slab_problem(1.0);
  const auto net = nn::init_params({2, 8, 1}, 3);
  FieldLabels l;
  l.field = "T";
  l.points = random_points(p, 25, 4);
  l.targets = MatrixXd::Random(1, 25);
  l.region.assign(25, 0);
  l.scale = 2.5;
  for (BcMode mode : {BcMode::Soft, BcMode::Hard}) {
    ad::Tape<double> tape;
    const auto params = nn::register_params(tape, net);
    TapeContext ctx{tape, params, net.hidden_activation, p, mode};
    const double got = loss_data(ctx, {l}).scalar();
    const MatrixXd pred = evaluate_outputs(net, p, mode, l.points);
    double mean = 0.0;
    for (Eigen::Index c = 0; c < 25; ++c) mean += (pred(0, c) - l.targets(0, c)) / l.scale;
    mean /= 25;
    double sq = 0.0, dev_sum = 0.0;
    for (Eigen::Index c = 0; c < 25; ++c) {
      const double d = (pred(0, c) - l.targets(0, c)) / l.scale;
      sq += (d - mean) * (d - mean);
      dev_sum += d;
    }
    // E[d^2] = Var + mean^2
    const double expect = sq / 25 + mean * mean;
    CHECK(std::abs(got - expect) <= 1e-12 * std::max(1.0, expect));
    CHECK(dev_sum == doctest::Approx(25 * mean));
  }
}

TEST_CASE("interior loss") {
  PinnProblem p = slab_problem();
  const MatrixXd pts = random_points(p, 40, 2);
  SUBCASE("an exact steady solution gives zero loss") {
    CHECK(interior_loss(physical_affine_net(p, 300.0, 0.0, 20.0), p, BcMode::Soft, pts) < 1e-10);
  }
  SUBCASE("known residual at a single point") {
    // T = 100 + 4 t (single phase, below solidus) -> r = rho cp 4 = 24.
    const MatrixXd one = pts.leftCols(1);
    CHECK(interior_loss(physical_affine_net(p, 100.0, 4.0, 0.0), p, BcMode::Soft, one) ==
          doctest::Approx(576.0).epsilon(1e-12));
    p.scales.energy = 2.0;
    CHECK(interior_loss(physical_affine_net(p, 100.0, 4.0, 0.0), p, BcMode::Soft, one) ==
          doctest::Approx(144.0).epsilon(1e-12));
  }
  SUBCASE("doubling the residual quadruples the loss") {
    const double a = interior_loss(physical_affine_net(p, 100.0, 4.0, 3.0), p, BcMode::Soft, pts);
    const double b = interior_loss(physical_affine_net(p, 200.0, 8.0, 6.0), p, BcMode::Soft, pts);
    CHECK(b == doctest::Approx(4.0 * a).epsilon(1e-12));
  }
  SUBCASE("empty batch is rejected") {
    CHECK_THROWS_AS(interior_loss(physical_affine_net(p, 0, 0, 0), p, BcMode::Soft, MatrixXd(2, 0)),
                    ContractViolation);
  }
  SUBCASE("split batches average back to the full loss") {
    const auto net = nn::init_params({2, 10, 1}, 8);
    const double full = interior_loss(net, p, BcMode::Hard, pts);
    const double a = interior_loss(net, p, BcMode::Hard, pts.leftCols(13));
    const double b = interior_loss(net, p, BcMode::Hard, pts.rightCols(27));
    CHECK(std::abs((13 * a + 27 * b) / 40 - full) <= 1e-12 * full);
  }
}

TEST_CASE("Neumann loss") {
  PinnProblem p = slab_problem();
  p.dirichlet_faces = {true, false};
  p.dirichlet.distance = nn::box_face_distance(p.box.lower, p.box.upper, p.dirichlet_faces);
  double q = 0.0;
  p.neumann = {{BoxFace{0, true}, TractionModel::None, [&q](const VectorXd&) { return q; }}};
  const CollocationBatch b = sample_collocation(p, {10, 0, 1, 0, 0}, 3, SamplingStrategy::UniformRandom);
  CHECK(b.n_flux() == 1);
  CHECK(b.flux_normals(0, 0) == 1.0);
  // Adiabatic face, flat temperature.
  CHECK(neumann_loss(physical_affine_net(p, 300.0, 1.0, 0.0), p, b) == 0.0);
  // kappa dT/dx = 5 * 6 = 30, q = 20 -> mismatch 10.
  q = 20.0;
  CHECK(neumann_loss(physical_affine_net(p, 300.0, 0.0, 6.0), p, b) == doctest::Approx(100.0).epsilon(1e-12));
  q = 30.0;
  CHECK(neumann_loss(physical_affine_net(p, 300.0, 0.0, 6.0), p, b) < 1e-20);
  CollocationBatch empty = b;
  empty.flux_points.resize(2, 0);
  empty.flux_normals.resize(1, 0);
  empty.flux_face.clear();
  CHECK(neumann_loss(physical_affine_net(p, 300.0, 0.0, 6.0), p, empty) == 0.0);
}

TEST_CASE("soft boundary loss") {
  PinnProblem p = slab_problem(5.0);
  const CollocationBatch b = sample_collocation(p, {10, 0, 0, 16, 0}, 3, SamplingStrategy::UniformRandom);
  CHECK(b.dirichlet_points.cols() == 16);
  CHECK(soft_bc_loss(physical_affine_net(p, 5.0, 0.0, 0.0), p, BcMode::Soft, b.dirichlet_points) == 0.0);
  CHECK(soft_bc_loss(physical_affine_net(p, 5.0 + 1.5, 0.0, 0.0), p, BcMode::Soft, b.dirichlet_points) ==
        doctest::Approx(2.25).epsilon(1e-12));
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto net = nn::init_params({2, 16, 1}, s);
    net.weights.back() *= 100.0;
    CHECK(soft_bc_loss(net, p, BcMode::Hard, b.dirichlet_points) == 0.0);
    CHECK(soft_bc_loss(net, p, BcMode::Soft, b.dirichlet_points) > 0.0);
  }
}

namespace {

// Two-region problem exercising every loss term: labels, interior,
// heat flux, contact and soft Dirichlet points.
PinnProblem two_region_problem() {
  PinnProblem p;
  p.name = "two-region";
  p.box.t_min = 1.0;
  p.box.t_max = 2.0;
  p.box.lower = VectorXd::Constant(1, -1.0);
  p.box.upper = VectorXd::Constant(1, 1.0);
  p.outputs = 2;
  p.output_names = {"Ta", "Tb"};
  auto ma = slab_material(2.0, 3.0, 5.0), mb = slab_material(1.0, 2.0, 7.0);
  mb.solidus = 0.9;
  mb.liquidus = 1.1;
  p.regions = {{ma, VectorXd::Constant(1, -1.0), VectorXd::Zero(1), {-1, -1, 0}},
               {mb, VectorXd::Zero(1), VectorXd::Constant(1, 1.0), {-1, -1, 1}}};
  p.contacts = {{0, 0.0, 0, 1}};
  p.dirichlet_faces = {true, false};
  p.dirichlet.ramp_width = 0.2;
  p.dirichlet.distance = nn::box_face_distance(p.box.lower, p.box.upper, p.dirichlet_faces);
  p.dirichlet.boundary_value = {nn::constant_jet(0.5), nn::constant_jet(0.5)};
  p.neumann = {{BoxFace{0, true}, TractionModel::None, [](const VectorXd& x) { return 0.3 * x(0); }}};
  p.scaling = {VectorXd::Constant(2, 0.5), VectorXd::Constant(2, 1.5)};
  p.scales.energy = 3.0;
  p.scales.flux = 2.0;
  p.scales.contact_flux = 4.0;
  FieldLabels l;
  l.field = "T";
  l.points.resize(2, 6);
  l.points << 1, 1, 1, 1, 1, 1, -0.9, -0.5, -0.1, 0.1, 0.5, 0.9;
  l.targets = MatrixXd::Constant(1, 6, 1.0);
  l.region = {0, 0, 0, 1, 1, 1};
  l.scale = 1.3;
  p.labels = {l};
  return p;
}

}  // namespace

TEST_CASE("loss gradient matches central differences through every term") {
  const PinnProblem p = two_region_problem();
  p.validate();
  auto net = nn::init_params({2, 10, 10, 2}, 12);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 0.2);
  for (auto& b : net.biases)
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = n(rng);
  const CollocationBatch batch = sample_collocation(p, {30, 0, 7, 9, 8}, 5, SamplingStrategy::LatinHypercube);
  for (BcMode mode : {BcMode::Hard, BcMode::Soft}) {
    LossWeights w{0.3, 0.4, mode == BcMode::Soft ? 0.5 : 0.0};
    nn::NetworkParams<double> g;
    const LossValues v = evaluate_loss(net, p, batch, w, mode, &g);
    CHECK(v.data > 0.0);
    CHECK(v.pde_interior > 0.0);
    CHECK(v.pde_neumann > 0.0);
    CHECK((mode == BcMode::Soft) == (v.soft_bc > 0.0));
    CHECK(v.total == doctest::Approx(total_loss(w, v.data, v.pde_interior, v.pde_neumann, v.soft_bc)));
    std::uniform_int_distribution<int> slot_pick(0, 5);
    for (int trial = 0; trial < 25; ++trial) {
      const int slot = slot_pick(rng);
      const Eigen::Index rows = slot % 2 ? net.biases[slot / 2].size() : net.weights[slot / 2].rows();
      const Eigen::Index cols = slot % 2 ? 1 : net.weights[slot / 2].cols();
      std::uniform_int_distribution<Eigen::Index> rp(0, rows - 1), cp(0, cols - 1);
      const Eigen::Index r = rp(rng), c = cp(rng);
      const double h = 1e-6;
      auto plus = net, minus = net;
      plus.entry(slot, r, c) += h;
      minus.entry(slot, r, c) -= h;
      const double fd = (evaluate_loss(plus, p, batch, w, mode).total - evaluate_loss(minus, p, batch, w, mode).total) /
                        (2 * h);
      const double ad = slot % 2 ? g.biases[slot / 2](r) : g.weights[slot / 2](r, c);
      CHECK(std::abs(ad - fd) <= 2e-5 * std::max(std::abs(fd), 1e-3));
    }
  }
}

TEST_CASE("collocation sampling") {
  const PinnProblem p = two_region_problem();
  const CollocationCounts counts{64, 0, 5, 6, 7};
  const auto a = sample_collocation(p, counts, 9, SamplingStrategy::LatinHypercube);
  const auto b = sample_collocation(p, counts, 9, SamplingStrategy::LatinHypercube);
  const auto c = sample_collocation(p, counts, 10, SamplingStrategy::LatinHypercube);
  CHECK(a.interior == b.interior);
  CHECK(a.flux_points == b.flux_points);
  CHECK(a.dirichlet_points == b.dirichlet_points);
  CHECK(a.interior != c.interior);
  a.validate(p.box);
  CHECK((a.flux_points.row(1).array() == 1.0).all());
  CHECK((a.dirichlet_points.row(1).array() == -1.0).all());
  CHECK((a.contact_points.row(1).array() == 0.0).all());

  // One point in each 1/N slice of every axis.
  const MatrixXd& x = a.interior;
  const VectorXd lo = p.box.input_lower(), hi = p.box.input_upper();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::vector<int> hits(64, 0);
    for (Eigen::Index k = 0; k < 64; ++k) {
      const int slice = static_cast<int>(std::floor((x(r, k) - lo(r)) / (hi(r) - lo(r)) * 64));
      ++hits[std::clamp(slice, 0, 63)];
    }
    for (int h : hits) CHECK(h == 1);
  }
  const auto u = sample_collocation(p, {500, 0, 0, 0, 0}, 1, SamplingStrategy::UniformRandom);
  u.validate(p.box);

  PinnProblem flat = p;
  flat.box.upper(0) = flat.box.lower(0);
  CHECK_THROWS_AS(sample_collocation(flat, counts, 1, SamplingStrategy::UniformRandom), ContractViolation);
  CHECK(parse_sampling_strategy("lhs") == SamplingStrategy::LatinHypercube);
  CHECK_THROWS_AS(parse_sampling_strategy("sobol"), ContractViolation);
}
