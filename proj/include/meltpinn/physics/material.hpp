#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "meltpinn/errors.hpp"

namespace meltpinn::physics {

// Quadratic property curve c0 + c1 T + c2 T^2 (constants use c1 = c2 = 0).
struct PropertyCurve {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  static PropertyCurve constant(double v) { return {v, 0.0, 0.0}; }
  bool is_constant() const { return c1 == 0.0 && c2 == 0.0; }
  double operator()(double temp) const { return c0 + c1 * temp + c2 * temp * temp; }
  double slope(double temp) const { return c1 + 2.0 * c2 * temp; }
};

struct MaterialPhaseProps {
  std::string name;
  double density_liquid = 0.0;   // kg/m^3
  double density_solid = 0.0;
  double viscosity_liquid = 0.0; // Pa s
  double viscosity_solid = 0.0;
  PropertyCurve heat_capacity_liquid;  // J/(kg K)
  PropertyCurve heat_capacity_solid;
  PropertyCurve conductivity_liquid;   // W/(m K)
  PropertyCurve conductivity_solid;
  double solidus = 0.0;          // K
  double liquidus = 0.0;         // K
  double latent_heat = 0.0;      // J/kg
  double marangoni_coefficient = 0.0;  // dsigma/dT, N/(m K)
  Eigen::Vector3d gravity{0.0, 0.0, -9.81};
  double reference_temperature = 295.0;
  // The latent advection term is written for constant rho L; phases with
  // different densities must opt in explicitly.
  bool allow_variable_density = false;

  // Checks positivity at the given temperature (curves may go negative far
  // outside their fitted range, so the caller supplies the range to test).
  void validate(double t_low = 300.0, double t_high = 3000.0) const {
    require(solidus < liquidus, name + ": solidus must be below liquidus");
    require(density_liquid > 0.0 && density_solid > 0.0, name + ": densities must be positive");
    require(viscosity_liquid >= 0.0 && viscosity_solid >= 0.0, name + ": viscosities must be non-negative");
    require(latent_heat >= 0.0, name + ": latent heat must be non-negative");
    require(allow_variable_density || density_liquid == density_solid,
            name + ": liquid and solid densities differ; set allow_variable_density");
    for (double temp : {t_low, t_high}) {
      require(heat_capacity_liquid(temp) > 0.0 && heat_capacity_solid(temp) > 0.0,
              name + ": specific heat must be positive");
      require(conductivity_liquid(temp) > 0.0 && conductivity_solid(temp) > 0.0,
              name + ": conductivity must be positive");
    }
  }
};

// IN625 per the AM-bench property table. The solid viscosity is not
// tabulated; the solid is modelled as a fluid 1000x more viscous than the melt.
inline MaterialPhaseProps in625() {
  MaterialPhaseProps m;
  m.name = "IN625";
  m.density_liquid = m.density_solid = 8440.0;
  m.viscosity_liquid = 7.0e-3;
  m.viscosity_solid = 7.0;
  m.heat_capacity_solid = {338.39, 0.2441, 0.0};
  m.heat_capacity_liquid = PropertyCurve::constant(709.25);
  m.conductivity_solid = {18.588, -0.0366, 3.0e-5};
  m.conductivity_liquid = PropertyCurve::constant(30.078);
  m.solidus = 1563.0;
  m.liquidus = 1623.0;
  m.latent_heat = 290.0e3;
  m.marangoni_coefficient = -2.0e-5;
  m.reference_temperature = 295.0;
  return m;
}

struct In625Curves {
  double heat_capacity_solid;
  double conductivity_solid;
  double heat_capacity_liquid;
  double conductivity_liquid;
};

inline In625Curves in625_props(double temp) {
  require(temp > 0.0, "temperature must be positive (K)");
  const MaterialPhaseProps m = in625();
  return {m.heat_capacity_solid(temp), m.conductivity_solid(temp), m.heat_capacity_liquid(temp),
          m.conductivity_liquid(temp)};
}

// Solidification benchmark materials. Pure aluminium gets a 1 K mushy ramp
// centred on its melting point so the enthalpy formulation is well defined.
inline constexpr double kAluminumMeltingPoint = 933.15;

inline MaterialPhaseProps aluminum(double mushy_width = 1.0) {
  MaterialPhaseProps m;
  m.name = "aluminum";
  m.density_liquid = m.density_solid = 2555.0;
  m.heat_capacity_liquid = m.heat_capacity_solid = PropertyCurve::constant(1190.0);
  m.conductivity_solid = PropertyCurve::constant(211.0);
  m.conductivity_liquid = PropertyCurve::constant(91.0);
  m.latent_heat = 398000.0;
  m.solidus = kAluminumMeltingPoint - 0.5 * mushy_width;
  m.liquidus = kAluminumMeltingPoint + 0.5 * mushy_width;
  m.gravity.setZero();
  return m;
}

// Graphite never changes phase in the benchmark; both phase records are
// identical and the latent heat is zero, so the phase window is irrelevant.
inline MaterialPhaseProps graphite() {
  MaterialPhaseProps m;
  m.name = "graphite";
  m.density_liquid = m.density_solid = 2200.0;
  m.heat_capacity_liquid = m.heat_capacity_solid = PropertyCurve::constant(1700.0);
  m.conductivity_liquid = m.conductivity_solid = PropertyCurve::constant(100.0);
  m.latent_heat = 0.0;
  m.solidus = 3800.0;
  m.liquidus = 3801.0;
  m.gravity.setZero();
  return m;
}

}  // namespace meltpinn::physics
