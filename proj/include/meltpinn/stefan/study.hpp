#pragma once

// Refinement and boundary-treatment studies on the solidification benchmark.

#include <vector>

#include "meltpinn/optimizer/train.hpp"
#include "meltpinn/stefan/fem.hpp"
#include "meltpinn/stefan/pinn.hpp"

namespace meltpinn::stefan {

inline constexpr Slab kWindowSlab{5.0, 10.0, -0.4, 0.4};

// Interface trajectory and error of one solution against the closed form.
struct Assessment {
  double l2_error = 0.0;             // relative, over kWindowSlab
  double max_interface_error = 0.0;  // max relative deviation from x*(t); inf if a profile has no crossing
  std::vector<double> t;
  std::vector<double> interface_x;  // NaN where no crossing was found
};

// Evaluates on an nx-by-nt grid of the window (endpoints included).
Assessment assess_field(const TemperatureField1D& field, int nx = 801, int nt = 51);

// Network temperature: mold channel for x <= 0, aluminium channel otherwise.
Eigen::VectorXd pinn_temperature(const nn::NetworkParams<double>& net, const loss::PinnProblem& problem,
                                 const Eigen::MatrixXd& points);
Assessment assess_pinn(const nn::NetworkParams<double>& net, const loss::PinnProblem& problem, int nx = 801,
                       int nt = 51);

struct FemRun {
  int elements = 0;
  double seconds = 0.0;
  Assessment assessment;
};

std::vector<FemRun> fem_refinement(const std::vector<int>& elements, const FemOptions& base, int threads);

struct PinnRunSpec {
  std::vector<int> hidden{200, 200, 200, 200, 200};
  std::uint64_t network_seed = 1;
  opt::TrainConfig train;
  StefanPinnOptions options;
  double focus_fraction = 0.5;
  double focus_half_width = 0.05;
};

struct PinnRun {
  opt::TrainResult result;
  Assessment assessment;
  double seconds = 0.0;
};

PinnRun run_stefan_pinn(const PinnRunSpec& spec, const opt::EpochCallback& on_epoch = {});

// One run per pool size: the interior points come from a fixed pool of that many.
std::vector<PinnRun> pinn_refinement(const PinnRunSpec& base, const std::vector<int>& pool_sizes, int threads);

struct BcComparison {
  PinnRun hard;
  PinnRun soft;
};

// Same seed, network and points; the soft run adds the Dirichlet penalty
// with weight base.train.weights.soft_bc (1/3 when unset).
BcComparison compare_bc_modes(const PinnRunSpec& base, int threads);

}  // namespace meltpinn::stefan
