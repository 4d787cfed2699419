#include <algorithm>
#include <array>
#include <random>

#include "meltpinn/ambench/ambench.hpp"
#include "meltpinn/ambench/mms_generated.hpp"
#include "meltpinn/network/network.hpp"

namespace meltpinn::ambench {

namespace gen = mms_generated;

physics::MaterialPhaseProps mms_material() {
  physics::MaterialPhaseProps m;
  m.name = "mms";
  m.density_liquid = gen::kDensityLiquid;
  m.density_solid = gen::kDensitySolid;
  m.allow_variable_density = true;
  m.viscosity_liquid = gen::kViscosityLiquid;
  m.viscosity_solid = gen::kViscositySolid;
  auto curve = [](const double (&c)[3]) { return physics::PropertyCurve{c[0], c[1], c[2]}; };
  m.heat_capacity_solid = curve(gen::kHeatCapacitySolid);
  m.heat_capacity_liquid = curve(gen::kHeatCapacityLiquid);
  m.conductivity_solid = curve(gen::kConductivitySolid);
  m.conductivity_liquid = curve(gen::kConductivityLiquid);
  m.solidus = gen::kSolidus;
  m.liquidus = gen::kLiquidus;
  m.latent_heat = gen::kLatentHeat;
  return m;
}

namespace {

constexpr int kFields = 5, kPerField = 9;

template <typename T>
ad::DualValue<T> jet(const std::array<T, kFields * kPerField>& e, int field) {
  ad::DualValue<T> d;
  d.value = e[field * kPerField];
  for (int i = 0; i < 4; ++i) {
    d.grad.push_back(e[field * kPerField + 1 + i]);
    d.hess_diag.push_back(e[field * kPerField + 5 + i]);
  }
  return d;
}

template <typename T>
physics::FieldState<T> state(const std::array<T, kFields * kPerField>& e) {
  physics::FieldState<T> s;
  s.space_dim = 3;
  for (int i = 0; i < 3; ++i) s.velocity.push_back(jet(e, i));
  s.pressure = jet(e, 3);
  s.temperature = jet(e, 4);
  return s;
}

Eigen::Matrix<double, kFields * kPerField, 1> field_entries(const Eigen::VectorXd& q) {
  Eigen::Matrix<double, kFields * kPerField, 1> e;
  gen::fields(q(0), q(1), q(2), q(3), e.data());
  return e;
}

}  // namespace

loss::PinnProblem make_mms_problem(int initial_points, std::uint64_t seed) {
  require(initial_points >= 0, "initial point count must be non-negative");
  loss::PinnProblem p;
  p.name = "mms";
  p.box.t_min = 0.0;
  p.box.t_max = 1.0;
  p.box.lower = Eigen::Vector3d::Zero();
  p.box.upper = Eigen::Vector3d::Ones();
  p.outputs = 5;
  p.output_names = {"u", "v", "w", "p", "T"};
  loss::FieldLayout layout;
  layout.velocity = 0;
  layout.pressure = 3;
  layout.temperature = 4;
  p.regions = {{mms_material(), p.box.lower, p.box.upper, layout}};
  p.dirichlet_faces.assign(6, true);
  p.dirichlet.ramp_width = 0.1;
  p.dirichlet.distance = nn::box_face_distance(p.box.lower, p.box.upper, p.dirichlet_faces);
  for (int k = 0; k < kFields; ++k) {
    if (k == 3) {
      p.dirichlet.boundary_value.emplace_back();
      continue;
    }
    p.dirichlet.boundary_value.push_back([k](const Eigen::VectorXd& q) {
      const auto e = field_entries(q);
      ad::DualValue<double> d;
      d.value = e(k * kPerField);
      for (int i = 0; i < 4; ++i) {
        d.grad.push_back(e(k * kPerField + 1 + i));
        d.hess_diag.push_back(e(k * kPerField + 5 + i));
      }
      return d;
    });
  }
  p.scaling.offset = Eigen::VectorXd::Zero(5);
  p.scaling.offset(4) = 1.0;
  p.scaling.scale = Eigen::VectorXd::Ones(5);
  p.body_force = [](const Eigen::VectorXd& q) {
    Eigen::Vector4d f;
    gen::forcing(q(0), q(1), q(2), q(3), f.data());
    return Eigen::VectorXd(f.head<3>());
  };
  p.heat_source = [](const Eigen::VectorXd& q) {
    Eigen::Vector4d f;
    gen::forcing(q(0), q(1), q(2), q(3), f.data());
    return f(3);
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  loss::FieldLabels vel{"u", Eigen::MatrixXd(4, initial_points), Eigen::MatrixXd(3, initial_points), {}, 1.0};
  loss::FieldLabels temp{"T", Eigen::MatrixXd(4, initial_points), Eigen::MatrixXd(1, initial_points), {}, 1.0};
  for (int c = 0; c < initial_points; ++c) {
    Eigen::Vector4d q(0.0, unit(rng), unit(rng), unit(rng));
    const auto e = field_entries(q);
    vel.points.col(c) = temp.points.col(c) = q;
    vel.targets.col(c) << e(0), e(kPerField), e(2 * kPerField);
    temp.targets(0, c) = e(4 * kPerField);
  }
  vel.region.assign(initial_points, 0);
  temp.region.assign(initial_points, 0);
  if (initial_points > 0) p.labels = {vel, temp};
  return p;
}

MmsReport mms_verify_3d(int n, std::uint64_t seed, double forcing_offset) {
  require(n > 0, "MMS check needs at least one point");
  const auto mat = mms_material();
  mat.validate(gen::kSolidus, gen::kLiquidus);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd pts(4, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < 4; ++r) pts(r, c) = unit(rng);

  Eigen::MatrixXd entries(kFields * kPerField, n), forcing(4, n);
  for (int c = 0; c < n; ++c) {
    gen::fields(pts(0, c), pts(1, c), pts(2, c), pts(3, c), entries.col(c).data());
    gen::forcing(pts(0, c), pts(1, c), pts(2, c), pts(3, c), forcing.col(c).data());
  }
  forcing.array() += forcing_offset;

  MmsReport rep;
  rep.points = n;
  Eigen::MatrixXd scalar(5, n);  // r_M (3), r_C, r_T per point
  for (int c = 0; c < n; ++c) {
    std::array<double, kFields * kPerField> e;
    std::copy_n(entries.col(c).data(), e.size(), e.begin());
    const auto s = state(e);
    const std::vector<double> g{forcing(0, c), forcing(1, c), forcing(2, c)};
    const auto rm = physics::residual_momentum(s, mat, g);
    scalar.col(c) << rm[0], rm[1], rm[2], physics::residual_continuity(s),
        physics::residual_energy(s, mat, forcing(3, c));
  }

  ad::Tape<double> tape;
  std::array<ad::Var<double>, kFields * kPerField> rows;
  for (int k = 0; k < kFields * kPerField; ++k) rows[k] = tape.constant(entries.row(k));
  const auto s = state(rows);
  std::vector<ad::Var<double>> g;
  for (int i = 0; i < 3; ++i) g.push_back(tape.constant(forcing.row(i)));
  const auto rm = physics::residual_momentum(s, mat, g);
  Eigen::MatrixXd batched(5, n);
  batched << rm[0].value(), rm[1].value(), rm[2].value(), physics::residual_continuity(s).value(),
      physics::residual_energy(s, mat, tape.constant(forcing.row(3))).value();

  rep.momentum = std::max(scalar.topRows(3).cwiseAbs().maxCoeff(), batched.topRows(3).cwiseAbs().maxCoeff());
  rep.continuity = std::max(scalar.row(3).cwiseAbs().maxCoeff(), batched.row(3).cwiseAbs().maxCoeff());
  rep.energy = std::max(scalar.row(4).cwiseAbs().maxCoeff(), batched.row(4).cwiseAbs().maxCoeff());
  rep.max_scaled = std::max({rep.momentum, rep.continuity, rep.energy});
  rep.path_mismatch = (scalar - batched).cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace meltpinn::ambench
