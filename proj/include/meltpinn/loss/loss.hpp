#pragma once

// Loss terms. Each term has a tape form (used for training) and, where it
// is a pure function of numbers, a plain form used for checks.

#include <Eigen/Dense>

#include <vector>

#include "meltpinn/autodiff/tape.hpp"
#include "meltpinn/loss/model.hpp"
#include "meltpinn/loss/problem.hpp"
#include "meltpinn/loss/sampling.hpp"
#include "meltpinn/network/network.hpp"

namespace meltpinn::loss {

struct LossWeights {
  double pde_interior = 1.0 / 3.0;  // lambda_pde^1
  double pde_neumann = 1.0 / 3.0;   // lambda_pde^2
  double soft_bc = 0.0;             // lambda_bc, soft mode only

  double data() const { return 1.0 - pde_interior - pde_neumann; }

  void validate() const {
    require(pde_interior >= 0.0 && pde_interior <= 1.0, "weights.pde_interior must lie in [0, 1]");
    require(pde_neumann >= 0.0 && pde_neumann <= 1.0, "weights.pde_neumann must lie in [0, 1]");
    require(pde_interior + pde_neumann <= 1.0 + 1e-12,
            "weights: pde_interior + pde_neumann must not exceed 1");
    require(soft_bc >= 0.0, "weights.soft_bc must be non-negative");
  }
};

// (1 - l1 - l2) L_data + l1 L_pde1 + l2 L_pde2 + l_bc L_bc
template <typename T>
T total_loss(const LossWeights& w, const T& data, const T& pde_interior, const T& pde_neumann, const T& soft_bc) {
  w.validate();
  return data * w.data() + pde_interior * w.pde_interior + pde_neumann * w.pde_neumann + soft_bc * w.soft_bc;
}

inline double total_loss(const LossWeights& w, double data, double pde_interior, double pde_neumann) {
  return total_loss<double>(w, data, pde_interior, pde_neumann, 0.0);
}

// One field's worth of predictions against labels (components x N).
struct FieldDeviation {
  Eigen::MatrixXd predicted;
  Eigen::MatrixXd target;
  double scale = 1.0;
};

// Sum over fields of the mean (over that field's samples) squared deviation.
double loss_data(const std::vector<FieldDeviation>& fields);

// Sum over residual components of the mean squared residual, each residual
// first divided by its scale. Rows are 1 x N.
double mean_square_residuals(const std::vector<Eigen::MatrixXd>& components, double scale);
ad::Var<double> mean_square_residuals(const std::vector<ad::Var<double>>& components, double scale);

// ---- tape forms -------------------------------------------------------------

struct TapeContext {
  ad::Tape<double>& tape;
  const nn::TapeParams<double>& params;
  nn::Activation activation;
  const PinnProblem& problem;
  BcMode mode;
};

ad::Var<double> loss_data(const TapeContext& ctx, const std::vector<FieldLabels>& labels);
// Throws if the interior set is empty.
ad::Var<double> loss_pde_interior(const TapeContext& ctx, const Eigen::MatrixXd& interior);
// Traction + heat-flux mismatch plus contact conditions; 0 when all sets are empty.
ad::Var<double> loss_pde_neumann(const TapeContext& ctx, const CollocationBatch& batch);
// Mean squared Dirichlet mismatch of the (possibly wrapped) outputs.
ad::Var<double> soft_bc_loss(const TapeContext& ctx, const Eigen::MatrixXd& boundary_points);

// Plain-value soft-BC mismatch of outputs against the prescribed values.
double soft_bc_loss(const nn::NetworkParams<double>& net, const PinnProblem& problem, BcMode mode,
                    const Eigen::MatrixXd& boundary_points);

struct LossValues {
  double data = 0.0;
  double pde_interior = 0.0;
  double pde_neumann = 0.0;
  double soft_bc = 0.0;
  double total = 0.0;
};

// Records the full loss on a fresh tape; fills `gradient` when non-null.
LossValues evaluate_loss(const nn::NetworkParams<double>& net, const PinnProblem& problem,
                         const CollocationBatch& batch, const LossWeights& weights, BcMode mode,
                         nn::NetworkParams<double>* gradient = nullptr);

}  // namespace meltpinn::loss
