#pragma once

#include <cstdint>
#include <optional>

#include "meltpinn/loss/problem.hpp"
#include "meltpinn/loss/sampling.hpp"

namespace meltpinn::stefan {

// PINN setup for the mold/aluminium benchmark. The network has one
// temperature output per material (mold, aluminium) so the conductivity
// jump at x = 0 does not have to be represented by a single smooth field;
// the two are tied by perfect-contact conditions on x = 0.
struct StefanPinnOptions {
  double ramp_fraction = 0.02;  // hard-BC ramp width as a fraction of the domain length
  int initial_points = 400;     // labeled analytic samples at t = 5 s
  double mushy_width = 1.0;     // K, aluminium liquid-fraction ramp

  void validate() const;
};

loss::PinnProblem make_stefan_problem(const StefanPinnOptions& options = {});

// Static sampling focus around the moving interface and the contact plane.
loss::FocusRegion stefan_focus(double fraction, double half_width = 0.05);

inline constexpr int kMoldOutput = 0;
inline constexpr int kAluminumOutput = 1;

}  // namespace meltpinn::stefan
