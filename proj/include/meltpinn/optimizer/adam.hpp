#pragma once

#include <Eigen/Dense>

#include "meltpinn/errors.hpp"
#include "meltpinn/network/network.hpp"

namespace meltpinn::opt {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const {
    require(lr > 0.0, "adam.lr must be positive");
    require(beta1 >= 0.0 && beta1 < 1.0, "adam.beta1 must lie in [0, 1)");
    require(beta2 >= 0.0 && beta2 < 1.0, "adam.beta2 must lie in [0, 1)");
    require(eps > 0.0, "adam.eps must be positive");
  }
};

// Moments are stored in parameter shape, so the same struct covers a
// network and (via a one-layer wrapper) a bare vector.
struct AdamState {
  nn::NetworkParams<double> m;
  nn::NetworkParams<double> v;
  long step = 0;
  AdamConfig config;

  static AdamState zeros_like(const nn::NetworkParams<double>& params, const AdamConfig& config) {
    config.validate();
    return {nn::NetworkParams<double>::zeros_like(params), nn::NetworkParams<double>::zeros_like(params), 0, config};
  }
};

// One bias-corrected Adam update in place. `lr` overrides config.lr when
// positive (learning-rate schedules). Throws NumericalError naming the slot
// if a gradient entry is not finite; params and state are then untouched.
void adam_step(nn::NetworkParams<double>& params, const nn::NetworkParams<double>& grads, AdamState& state,
               double lr = -1.0);

// Plain-vector variant with its own moments.
struct VectorAdamState {
  Eigen::VectorXd m, v;
  long step = 0;
  AdamConfig config;
};
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, VectorAdamState& state, double lr = -1.0);

}  // namespace meltpinn::opt
