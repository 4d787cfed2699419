#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "meltpinn/loss/problem.hpp"

namespace meltpinn::loss {

enum class SamplingStrategy { UniformRandom, LatinHypercube };

SamplingStrategy parse_sampling_strategy(const std::string& name);
std::string to_string(SamplingStrategy s);

struct CollocationCounts {
  int interior = 0;   // N_r1
  int traction = 0;   // N_r2, spread over faces with a traction model
  int flux = 0;       // N_r3, spread over faces with a heat flux
  int dirichlet = 0;  // soft-BC points on Dirichlet faces
  int contact = 0;    // points on material contact planes
};

// Optional sub-box of the input space that receives a fixed share of the
// interior points (a static sampling density, not an adaptive one).
struct FocusRegion {
  Eigen::VectorXd lower;  // input space [t, x, ...]
  Eigen::VectorXd upper;
  double fraction = 0.0;
};

struct CollocationBatch {
  Eigen::MatrixXd interior;          // input_dim x N_r1
  Eigen::MatrixXd traction_points;   // input_dim x N_r2
  Eigen::MatrixXd traction_normals;  // space_dim x N_r2 (outward)
  std::vector<int> traction_face;    // index into PinnProblem::neumann
  Eigen::MatrixXd flux_points;       // input_dim x N_r3
  Eigen::MatrixXd flux_normals;
  std::vector<int> flux_face;
  Eigen::MatrixXd dirichlet_points;
  Eigen::MatrixXd contact_points;
  std::vector<int> contact_index;
  std::vector<FieldLabels> labels;

  Eigen::Index n_interior() const { return interior.cols(); }
  Eigen::Index n_traction() const { return traction_points.cols(); }
  Eigen::Index n_flux() const { return flux_points.cols(); }

  // Label counts for velocity, pressure and temperature (N_u, N_p, N_T).
  Eigen::Index label_count(const std::string& field) const {
    Eigen::Index n = 0;
    for (const auto& l : labels)
      if (l.field == field) n += l.count();
    return n;
  }

  void validate(const SpaceTimeBox& box) const;
};

// Deterministic 64-bit mixing used to derive independent RNG streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// n points in the box [lower, upper] (any dimension), one per column.
Eigen::MatrixXd sample_box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int n,
                           std::mt19937_64& rng, SamplingStrategy strategy);

Eigen::MatrixXd sample_interior(const PinnProblem& problem, int n, std::uint64_t seed,
                                SamplingStrategy strategy, const std::optional<FocusRegion>& focus = {});

CollocationBatch sample_collocation(const PinnProblem& problem, const CollocationCounts& counts,
                                    std::uint64_t seed, SamplingStrategy strategy,
                                    const std::optional<FocusRegion>& focus = {});

}  // namespace meltpinn::loss
