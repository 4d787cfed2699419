#include "meltpinn/ambench/ambench.hpp"

#include "meltpinn/network/hard_bc.hpp"

namespace meltpinn::ambench {

loss::SpaceTimeBox default_box() {
  loss::SpaceTimeBox box;
  box.t_min = 0.0;
  box.t_max = 2.0e-3;
  box.lower = Eigen::Vector3d(-0.2e-3, -0.2e-3, -0.3e-3);
  box.upper = Eigen::Vector3d(0.8e-3, 0.2e-3, 0.0);
  return box;
}

AmBenchCase build_case(const std::string& id) {
  AmBenchCase c;
  c.id = id;
  if (id == "A") {
    c.laser.power = 150.0;
    c.laser.scan_speed = 0.4;
  } else if (id == "B") {
    c.laser.power = 195.0;
    c.laser.scan_speed = 0.8;
  } else if (id == "C") {
    c.laser.power = 195.0;
    c.laser.scan_speed = 1.2;
  } else {
    throw ContractViolation("unknown benchmark case '" + id + "' (expected A, B or C)");
  }
  c.laser.absorptivity = kAbsorptivity;
  c.laser.beam_radius = kBeamRadius;
  c.material = physics::in625();
  c.box = default_box();
  return c;
}

loss::PinnProblem make_problem(const AmBenchCase& c, double ramp_width) {
  c.laser.validate();
  c.box.validate();
  require(c.box.space_dim() == 3, "melt-pool cases are three-dimensional");
  loss::PinnProblem p;
  p.name = "ambench-" + c.id;
  p.box = c.box;
  p.outputs = 5;
  p.output_names = {"u", "v", "w", "p", "T"};
  loss::FieldLayout layout;
  layout.velocity = 0;
  layout.pressure = 3;
  layout.temperature = 4;
  p.regions = {{c.material, c.box.lower, c.box.upper, layout}};

  p.dirichlet_faces = {true, true, true, true, true, false};
  p.dirichlet.ramp_width = ramp_width;
  p.dirichlet.distance = nn::box_face_distance(c.box.lower, c.box.upper, p.dirichlet_faces);
  const auto zero = nn::constant_jet(0.0);
  p.dirichlet.boundary_value = {zero, zero, zero, {}, nn::constant_jet(c.reference_temperature)};

  loss::NeumannFace top;
  top.face = {2, true};
  top.traction = loss::TractionModel::Marangoni;
  top.heat_flux = [laser = c.laser](const Eigen::VectorXd& q) {
    return physics::laser_flux(q(1), q(2), q(0), laser);
  };
  p.neumann = {top};

  // Melt-pool velocities are O(1 m/s) and temperatures span a few thousand K.
  p.scaling.offset = Eigen::VectorXd::Zero(5);
  p.scaling.offset(4) = c.reference_temperature;
  p.scaling.scale = Eigen::VectorXd::Ones(5);
  p.scaling.scale(3) = 1e4;
  p.scaling.scale(4) = 2000.0;

  const double rho = c.material.density_liquid, r = c.laser.beam_radius, dtemp = 2000.0;
  const double cp = c.material.heat_capacity_liquid(c.material.liquidus);
  p.scales.momentum = rho / r;
  p.scales.continuity = 1.0 / r;
  p.scales.energy = rho * cp * dtemp * c.laser.scan_speed / r;
  p.scales.traction = std::abs(c.material.marangoni_coefficient) * dtemp / r;
  p.scales.flux = 2.0 * c.laser.power * c.laser.absorptivity / (std::numbers::pi * r * r);
  return p;
}

}  // namespace meltpinn::ambench
