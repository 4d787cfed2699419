#include "meltpinn/stefan/pinn.hpp"

#include <algorithm>

#include "meltpinn/stefan/analytic.hpp"

namespace meltpinn::stefan {

void StefanPinnOptions::validate() const {
  require(ramp_fraction > 0.0 && ramp_fraction < 0.5, "stefan.ramp_fraction must lie in (0, 0.5)");
  require(initial_points >= 4, "stefan.initial_points must be at least 4");
  require(mushy_width > 0.0, "stefan.mushy_width must be positive");
}

loss::PinnProblem make_stefan_problem(const StefanPinnOptions& options) {
  options.validate();
  using Eigen::VectorXd;
  const double dT = kAluminumTemperature - kMoldTemperature;
  const auto mold = physics::graphite();
  const auto al = physics::aluminum(options.mushy_width);

  loss::PinnProblem p;
  p.name = "stefan";
  p.box.t_min = kWindowStart;
  p.box.t_max = kWindowEnd;
  p.box.lower = VectorXd::Constant(1, kDomainLeft);
  p.box.upper = VectorXd::Constant(1, kDomainRight);
  p.outputs = 2;
  p.output_names = {"T_mold", "T_al"};
  p.regions = {{mold, VectorXd::Constant(1, kDomainLeft), VectorXd::Zero(1), {-1, -1, kMoldOutput}},
               {al, VectorXd::Zero(1), VectorXd::Constant(1, kDomainRight), {-1, -1, kAluminumOutput}}};
  p.contacts = {{0, 0.0, 0, 1}};
  p.dirichlet_faces = {true, true};
  p.dirichlet.ramp_width = options.ramp_fraction * (kDomainRight - kDomainLeft);
  p.dirichlet.distance = nn::box_face_distance(p.box.lower, p.box.upper, p.dirichlet_faces);
  // Each channel takes the value of the nearest face; only the channel that
  // owns the face is ever read there.
  const nn::PointJet face_value = [](const VectorXd& x) {
    return ad::DualValue<double>::constant(x(1) < 0.0 ? kMoldTemperature : kAluminumTemperature,
                                           static_cast<std::size_t>(x.size()));
  };
  p.dirichlet.boundary_value = {face_value, face_value};
  p.scaling = {VectorXd::Constant(2, kMoldTemperature), VectorXd::Constant(2, dT)};

  // Conduction only: rho c_p dT per second for the energy residual; the
  // contact flux uses a 2 cm thermal length.
  p.scales.energy = al.density_liquid * al.heat_capacity_solid(kMeltTemperature) * dT;
  p.scales.contact_temperature = dT;
  p.scales.contact_flux = mold.conductivity_solid(kMeltTemperature) * dT / 0.02;

  loss::FieldLabels ic;
  ic.field = "T";
  ic.scale = dT;
  const int n = options.initial_points;
  ic.points.resize(2, n);
  ic.targets.resize(1, n);
  // Half the samples cover the domain, half the 16 cm around the contact.
  const int n_wide = n / 2, n_near = n - n_wide;
  for (int i = 0; i < n; ++i) {
    const double x = i < n_wide ? kDomainLeft + (kDomainRight - kDomainLeft) * i / (n_wide - 1)
                                : -0.08 + 0.16 * (i - n_wide) / std::max(1, n_near - 1);
    ic.points(0, i) = kWindowStart;
    ic.points(1, i) = x;
    ic.targets(0, i) = analytic_temperature(x, kWindowStart);
    ic.region.push_back(x <= 0.0 ? 0 : 1);
  }
  p.labels = {ic};
  p.validate();
  return p;
}

loss::FocusRegion stefan_focus(double fraction, double half_width) {
  loss::FocusRegion f;
  f.lower = Eigen::Vector2d(kWindowStart, -half_width);
  f.upper = Eigen::Vector2d(kWindowEnd, half_width);
  f.fraction = fraction;
  return f;
}

}  // namespace meltpinn::stefan
