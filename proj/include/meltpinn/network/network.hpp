#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "meltpinn/autodiff/dual.hpp"
#include "meltpinn/autodiff/tape.hpp"
#include "meltpinn/errors.hpp"
#include "meltpinn/network/activation.hpp"

namespace meltpinn::nn {

// Fully connected network: swish on every hidden layer, affine output.
// weights[l] maps layer l (size layer_sizes[l]) to layer l+1.
template <typename Scalar = double>
struct NetworkParams {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Activation hidden_activation = Activation::Swish;

  std::size_t num_layers() const { return weights.size(); }
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
  }

  void validate() const {
    require(layer_sizes.size() >= 2, "network needs at least an input and an output layer");
    for (int s : layer_sizes) require(s >= 1, "layer sizes must be positive");
    require(weights.size() == layer_sizes.size() - 1 && biases.size() == weights.size(),
            "weight/bias count does not match layer_sizes");
    for (std::size_t l = 0; l < weights.size(); ++l) {
      require(weights[l].rows() == layer_sizes[l + 1] && weights[l].cols() == layer_sizes[l],
              "weight matrix " + std::to_string(l) + " has the wrong shape");
      require(biases[l].size() == layer_sizes[l + 1],
              "bias vector " + std::to_string(l) + " has the wrong length");
      require(weights[l].allFinite() && biases[l].allFinite(),
              "layer " + std::to_string(l) + " holds non-finite entries");
    }
  }

  static NetworkParams zeros_like(const NetworkParams& other) {
    NetworkParams z;
    z.layer_sizes = other.layer_sizes;
    z.hidden_activation = other.hidden_activation;
    for (std::size_t l = 0; l < other.weights.size(); ++l) {
      z.weights.push_back(Matrix::Zero(other.weights[l].rows(), other.weights[l].cols()));
      z.biases.push_back(Vector::Zero(other.biases[l].size()));
    }
    return z;
  }

  // Parameter slots are numbered 2l for weights[l] and 2l+1 for biases[l].
  Scalar& entry(int slot, Eigen::Index r, Eigen::Index c) {
    return slot % 2 == 0 ? weights[slot / 2](r, c) : biases[slot / 2](r);
  }
};

// Glorot-uniform weights, zero biases.
template <typename Scalar = double>
NetworkParams<Scalar> init_params(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  require(layer_sizes.size() >= 2, "init_params needs at least two layers");
  for (int s : layer_sizes) require(s >= 1, "layer sizes must be positive");
  NetworkParams<Scalar> p;
  p.layer_sizes = layer_sizes;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l], fan_out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    typename NetworkParams<Scalar>::Matrix w(fan_out, fan_in);
    // Row-major fill so the draw order is independent of storage order.
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = static_cast<Scalar>(dist(rng));
    p.weights.push_back(std::move(w));
    p.biases.push_back(NetworkParams<Scalar>::Vector::Zero(fan_out));
  }
  return p;
}

// ---- layer primitives, overloaded for plain matrices and tape variables ---

template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> linear(
    const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& w,
    const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& x) {
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> y(w.rows(), x.cols());
  y.noalias() = w * x;
  return y;
}

template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> affine(
    const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& w,
    const Eigen::Matrix<S, Eigen::Dynamic, 1>& b,
    const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& x) {
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> y = linear(w, x);
  y.colwise() += b;
  return y;
}

template <typename S>
ad::Var<S> linear(ad::Var<S> w, ad::Var<S> x) {
  return ad::matmul(w, x);
}

template <typename S>
ad::Var<S> affine(ad::Var<S> w, ad::Var<S> b, ad::Var<S> x) {
  return ad::add_bias(ad::matmul(w, x), b);
}

// Pushes a batch of jets through the layer stack. Weights/biases are either
// Eigen objects (plain evaluation) or tape variables (recorded evaluation).
template <typename T, typename W, typename B>
ad::DualValue<T> propagate(const std::vector<W>& weights, const std::vector<B>& biases,
                           Activation hidden, ad::DualValue<T> z) {
  const std::size_t layers = weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    ad::DualValue<T> next;
    next.value = affine(weights[l], biases[l], z.value);
    next.grad.resize(z.grad.size());
    next.hess_diag.resize(z.grad.size());
    for (std::size_t i = 0; i < z.grad.size(); ++i) {
      next.grad[i] = linear(weights[l], z.grad[i]);
      if (z.has_hess(i)) next.hess_diag[i] = linear(weights[l], z.hess_diag[i]);
    }
    const bool output_layer = (l + 1 == layers);
    if (!output_layer && hidden == Activation::Swish) next = ad::swish(next);
    z = std::move(next);
  }
  return z;
}

// Plain forward pass of one point.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> forward(const NetworkParams<Scalar>& net,
                                                 const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  require(x.size() == net.input_dim(), "input has dimension " + std::to_string(x.size()) +
                                           ", network expects " +
                                           std::to_string(net.input_dim()));
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z = x;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> a = net.weights[l] * z + net.biases[l];
    if (l + 1 < net.num_layers() && net.hidden_activation == Activation::Swish)
      a = a.unaryExpr([](Scalar v) { return swish(v); });
    z = std::move(a);
  }
  return z;
}

inline Eigen::VectorXd forward(const NetworkParams<double>& net, const Eigen::VectorXd& x) {
  return forward<double>(net, x);
}

// Batched forward pass: one point per column.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> forward_batch(
    const NetworkParams<Scalar>& net, const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x) {
  require(x.rows() == net.input_dim(), "batch rows do not match network input dimension");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> z = x;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a = affine(net.weights[l], net.biases[l], z);
    if (l + 1 < net.num_layers() && net.hidden_activation == Activation::Swish)
      a = a.unaryExpr([](Scalar v) { return swish(v); });
    z = std::move(a);
  }
  return z;
}

// Seeds a batch of input columns as independent coordinates. seed_scale[i]
// is dz_i/dx_i of the (diagonal) map applied before the network; pass ones
// for raw inputs. Pure second derivatives are carried only where
// want_hess[i] is set (an empty mask means all).
template <typename Scalar>
ad::DualValue<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> seed_inputs(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& z,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& seed_scale, std::vector<bool> want_hess = {}) {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index dim = z.rows(), n = z.cols();
  require(seed_scale.size() == dim, "seed scale length must equal input dimension");
  if (want_hess.empty()) want_hess.assign(dim, true);
  require(static_cast<Eigen::Index>(want_hess.size()) == dim, "hessian mask length mismatch");
  ad::DualValue<M> d;
  d.value = z;
  d.grad.resize(dim);
  d.hess_diag.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    d.grad[i] = M::Zero(dim, n);
    d.grad[i].row(i).setConstant(seed_scale(i));
    if (want_hess[i]) d.hess_diag[i] = M::Zero(dim, n);
  }
  return d;
}

// Value, input gradient and pure second derivatives of every output at one
// point. Derivatives are exact for the composed network.
template <typename Scalar>
std::vector<ad::DualValue<Scalar>> forward_with_input_derivs(
    const NetworkParams<Scalar>& net, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  require(x.size() == net.input_dim(), "input has dimension " + std::to_string(x.size()) +
                                           ", network expects " +
                                           std::to_string(net.input_dim()));
  const M column = x;
  auto jets = propagate(net.weights, net.biases, net.hidden_activation,
                        seed_inputs<Scalar>(column, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(x.size())));
  std::vector<ad::DualValue<Scalar>> out(net.output_dim());
  for (int k = 0; k < net.output_dim(); ++k) {
    out[k].value = jets.value(k, 0);
    for (std::size_t i = 0; i < jets.grad.size(); ++i) {
      out[k].grad.push_back(jets.grad[i](k, 0));
      out[k].hess_diag.push_back(jets.hess_diag[i](k, 0));
    }
  }
  return out;
}

inline std::vector<ad::DualValue<double>> forward_with_input_derivs(const NetworkParams<double>& net,
                                                                   const Eigen::VectorXd& x) {
  return forward_with_input_derivs<double>(net, x);
}

// ---- tape registration -----------------------------------------------------

template <typename Scalar>
struct TapeParams {
  std::vector<ad::Var<Scalar>> weights;
  std::vector<ad::Var<Scalar>> biases;
};

template <typename Scalar>
TapeParams<Scalar> register_params(ad::Tape<Scalar>& tape, const NetworkParams<Scalar>& net) {
  TapeParams<Scalar> tp;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    tp.weights.push_back(tape.parameter(static_cast<int>(2 * l), net.weights[l]));
    tp.biases.push_back(tape.parameter(static_cast<int>(2 * l + 1), net.biases[l]));
  }
  return tp;
}

// Parameter-shaped gradient of the last backward() root.
template <typename Scalar>
NetworkParams<Scalar> grad_wrt_params(const ad::Tape<Scalar>& tape, const NetworkParams<Scalar>& net) {
  NetworkParams<Scalar> g = NetworkParams<Scalar>::zeros_like(net);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    g.weights[l] = tape.gradient(static_cast<int>(2 * l));
    g.biases[l] = tape.gradient(static_cast<int>(2 * l + 1));
  }
  return g;
}

// Lifts a constant jet batch onto the tape.
template <typename Scalar>
ad::DualValue<ad::Var<Scalar>> to_tape(
    ad::Tape<Scalar>& tape, const ad::DualValue<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& d) {
  ad::DualValue<ad::Var<Scalar>> r;
  r.value = tape.constant(d.value);
  for (const auto& g : d.grad) r.grad.push_back(tape.constant(g));
  r.hess_diag.resize(d.grad.size());
  for (std::size_t i = 0; i < d.hess_diag.size(); ++i)
    if (d.has_hess(i)) r.hess_diag[i] = tape.constant(d.hess_diag[i]);
  return r;
}

// Extracts output row k of a batched jet.
template <typename Scalar>
ad::DualValue<ad::Var<Scalar>> output_row(const ad::DualValue<ad::Var<Scalar>>& d, Eigen::Index k) {
  ad::DualValue<ad::Var<Scalar>> r;
  r.value = ad::row(d.value, k);
  for (const auto& g : d.grad) r.grad.push_back(ad::row(g, k));
  r.hess_diag.resize(d.grad.size());
  for (std::size_t i = 0; i < d.hess_diag.size(); ++i)
    if (d.has_hess(i)) r.hess_diag[i] = ad::row(d.hess_diag[i], k);
  return r;
}

template <typename Scalar>
ad::DualValue<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> output_row(
    const ad::DualValue<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& d, Eigen::Index k) {
  ad::DualValue<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> r;
  r.value = d.value.row(k);
  for (const auto& g : d.grad) r.grad.push_back(g.row(k));
  r.hess_diag.resize(d.grad.size());
  for (std::size_t i = 0; i < d.hess_diag.size(); ++i)
    if (d.has_hess(i)) r.hess_diag[i] = d.hess_diag[i].row(k);
  return r;
}

// ---- checkpoint I/O ---------------------------------------------------------

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const NetworkParams<double>& net, const std::string& path);
NetworkParams<double> load_checkpoint(const std::string& path);
std::string to_checkpoint_string(const NetworkParams<double>& net);
NetworkParams<double> from_checkpoint_string(const std::string& text);

}  // namespace meltpinn::nn
