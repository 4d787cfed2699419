#pragma once

// Laser-track melt-pool benchmark cases on IN625: problem wiring, labeled
// data ingestion, melt-pool dimension extraction and a manufactured-solution
// check of the 3D residuals.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "meltpinn/loss/problem.hpp"
#include "meltpinn/physics/residuals.hpp"

namespace meltpinn::ambench {

inline constexpr double kAbsorptivity = 0.43;
inline constexpr double kBeamRadius = 50e-6;  // m
inline constexpr double kReferenceTemperature = 295.0;  // K

struct AmBenchCase {
  std::string id;
  physics::LaserSpec laser;
  physics::MaterialPhaseProps material;
  loss::SpaceTimeBox box;  // top face is z = box.upper(2)
  double reference_temperature = kReferenceTemperature;
};

// Default 1.0 x 0.4 x 0.3 mm box over t in [0, 2] ms; the beam starts at the origin.
loss::SpaceTimeBox default_box();

// "A", "B" or "C"; anything else throws ContractViolation.
AmBenchCase build_case(const std::string& id);

// Outputs (u, v, w, p, T). No-slip and T_ref on every face but the top, which
// carries the laser flux and the Marangoni traction.
loss::PinnProblem make_problem(const AmBenchCase& c, double ramp_width = 20e-6);

// ---- melt-pool dimensions ------------------------------------------------------

struct MeltPoolDims {
  double length = 0.0;  // m, along the scan axis x on the top surface
  double width = 0.0;   // m, along y
  double depth = 0.0;   // m, below the top surface
  bool molten = false;  // false: no point reached the liquidus
};

using FieldSampler = std::function<double(double x, double y, double z)>;

struct DimsOptions {
  double resolution = 0.5e-6;  // bisection stops when the bracket is below this
  int scan_points = 201;       // coarse scan along each axis
};

// Extents of the T >= threshold region. The pool is located from the hottest
// point of a coarse scan along the track line y = track_y on the top surface.
MeltPoolDims melt_pool_dims(const FieldSampler& temperature, const loss::SpaceTimeBox& box, double threshold,
                            double track_y = 0.0, const DimsOptions& options = {});

// ---- labeled data ------------------------------------------------------------------

struct LabeledWindow {
  std::vector<loss::FieldLabels> labels;  // "u" (3 comps), "p", "T"; absent fields are omitted
  Eigen::Index rows = 0;
  Eigen::Index count(const std::string& field) const;
};

// CSV with header t,x,y,z,u,v,w,p,T (SI units). Empty u/v/w/p/T cells mark a
// missing field; velocity needs all three components or none. Throws
// ParseError with the line number on malformed input and ContractViolation
// when no row falls in [t_min, t_max].
LabeledWindow parse_labeled_csv(const std::string& text, double t_min, double t_max);
LabeledWindow load_labeled_window(const std::string& path, double t_min, double t_max);

// ---- manufactured solution -------------------------------------------------------

// Dimensionless material used by the generated manufactured solution.
physics::MaterialPhaseProps mms_material();

// PINN problem on [0, 1]^4 whose exact solution is the manufactured field:
// manufactured Dirichlet data on every face, forcing folded into the body
// force and heat source, and velocity/temperature labels at t = 0.
loss::PinnProblem make_mms_problem(int initial_points = 200, std::uint64_t seed = 0);

struct MmsReport {
  int points = 0;
  double momentum = 0.0;    // max |r_M| component
  double continuity = 0.0;  // max |r_C|
  double energy = 0.0;      // max |r_T|
  double max_scaled = 0.0;  // max over all residuals and both evaluation paths
  double path_mismatch = 0.0;  // max difference between scalar and batched evaluation
};

// Evaluates the residuals at n random points of [0, 1]^4 with the generated
// fields and forcing. forcing_offset is added to every forcing entry.
MmsReport mms_verify_3d(int n, std::uint64_t seed, double forcing_offset = 0.0);

}  // namespace meltpinn::ambench
