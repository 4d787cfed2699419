#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "meltpinn/physics/material.hpp"

namespace meltpinn::stefan {

// Nodal temperature snapshots on a fixed 1D grid.
struct TemperatureField1D {
  Eigen::VectorXd x;                      // m, strictly increasing
  std::vector<double> t;                  // s, strictly increasing
  std::vector<Eigen::VectorXd> temperature;  // one nodal vector per time stamp

  void validate() const;
  // Piecewise-linear interpolation in x and t; arguments are clamped to the grid.
  double sample(double xq, double tq) const;
};

// Two materials split at `interface_x` (a mesh node), Dirichlet or
// adiabatic ends, conduction with an enthalpy liquid-fraction ramp.
struct FemProblem {
  double x_left = -0.4;
  double x_right = 0.4;
  double interface_x = 0.0;
  physics::MaterialPhaseProps left;
  physics::MaterialPhaseProps right;
  double t_left = 298.15;   // Dirichlet values
  double t_right = 973.15;
  bool adiabatic = false;   // zero flux at both ends instead
  std::function<double(double)> initial;  // T(x, t_start)
  double t_start = 5.0;
  double t_end = 10.0;
};

struct FemOptions {
  int elements = 200;
  double dt = 1e-3;
  int store_every = 10;  // snapshot interval in steps (the final step is always stored)
  double newton_tol = 1e-8;
  int max_newton = 50;
};

// Mold/aluminium benchmark: analytic state at t_start as the initial condition
// (t_start = 0 gives the step initial condition).
FemProblem stefan_fem_problem(double t_start = 5.0, double t_end = 10.0, double mushy_width = 1.0);

// Linear Galerkin elements, backward Euler, full Newton per step. Element
// integrals are exact: each element is split where the interpolated
// temperature crosses a phase-ramp kink. Throws NumericalError (with step,
// time and residual history) when Newton fails to converge.
TemperatureField1D fem_solve_1d(const FemProblem& problem, const FemOptions& options);

// Volumetric enthalpy rho (c_p T + L f_L) of a material, and its integral
// over the mesh for a nodal vector.
double volumetric_enthalpy(const physics::MaterialPhaseProps& m, double temp);
double total_enthalpy(const FemProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& temp);

// First crossing of t_melt scanning from the low-x end, linearly interpolated.
double extract_interface(const Eigen::VectorXd& x, const Eigen::VectorXd& temp, double t_melt);

struct Slab {
  double t_min, t_max, x_min, x_max;
};

using Sampler = std::function<double(double x, double t)>;

// RMS of (pred - oracle) over an nx-by-nt tensor grid (endpoints included),
// divided by the RMS of the oracle.
double l2_error(const Sampler& predicted, const Sampler& oracle, const Slab& slab, int nx, int nt);

}  // namespace meltpinn::stefan
