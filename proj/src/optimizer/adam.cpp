#include "meltpinn/optimizer/adam.hpp"

#include <cmath>
#include <string>

namespace meltpinn::opt {

namespace {

template <typename P, typename G, typename M>
void update(P& p, const G& g, M& m, M& v, const AdamConfig& c, double lr, long step) {
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(step));
  m = c.beta1 * m + (1.0 - c.beta1) * g;
  v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseAbs2();
  p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.eps);
}

}  // namespace

void adam_step(nn::NetworkParams<double>& params, const nn::NetworkParams<double>& grads, AdamState& state,
               double lr) {
  state.config.validate();
  const std::size_t layers = params.num_layers();
  require(grads.num_layers() == layers && state.m.num_layers() == layers && state.v.num_layers() == layers,
          "adam_step: parameter, gradient and moment layer counts differ");
  for (std::size_t l = 0; l < layers; ++l) {
    require(grads.weights[l].rows() == params.weights[l].rows() &&
                grads.weights[l].cols() == params.weights[l].cols() &&
                grads.biases[l].size() == params.biases[l].size() &&
                state.m.weights[l].size() == params.weights[l].size() &&
                state.v.biases[l].size() == params.biases[l].size(),
            "adam_step: shape mismatch in layer " + std::to_string(l));
    if (!grads.weights[l].allFinite())
      throw NumericalError("non-finite gradient in parameter slot " + std::to_string(2 * l) + " (weights " +
                           std::to_string(l) + ")");
    if (!grads.biases[l].allFinite())
      throw NumericalError("non-finite gradient in parameter slot " + std::to_string(2 * l + 1) + " (biases " +
                           std::to_string(l) + ")");
  }
  const double rate = lr > 0.0 ? lr : state.config.lr;
  ++state.step;
  for (std::size_t l = 0; l < layers; ++l) {
    update(params.weights[l], grads.weights[l], state.m.weights[l], state.v.weights[l], state.config, rate,
           state.step);
    update(params.biases[l], grads.biases[l], state.m.biases[l], state.v.biases[l], state.config, rate, state.step);
  }
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, VectorAdamState& state, double lr) {
  state.config.validate();
  require(grads.size() == params.size(), "adam_step: gradient length differs from parameters");
  if (state.m.size() == 0) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
  }
  require(state.m.size() == params.size() && state.v.size() == params.size(), "adam_step: moment shape mismatch");
  for (Eigen::Index i = 0; i < grads.size(); ++i)
    if (!std::isfinite(grads(i))) throw NumericalError("non-finite gradient in parameter slot " + std::to_string(i));
  ++state.step;
  update(params, grads, state.m, state.v, state.config, lr > 0.0 ? lr : state.config.lr, state.step);
}

}  // namespace meltpinn::opt
