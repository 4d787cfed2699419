#pragma once

// Network + problem glue: input normalization, output scaling and the
// optional hard-BC wrapper, evaluated either on plain matrices or on a tape.

#include <Eigen/Dense>

#include <vector>

#include "meltpinn/autodiff/dual.hpp"
#include "meltpinn/loss/problem.hpp"
#include "meltpinn/network/hard_bc.hpp"
#include "meltpinn/network/network.hpp"

namespace meltpinn::loss {

enum class BcMode { Hard, Soft };

// Inputs are mapped affinely onto [-1, 1] per axis.
struct InputMap {
  Eigen::VectorXd center;
  Eigen::VectorXd inv_half_width;

  static InputMap for_box(const SpaceTimeBox& box) {
    const Eigen::VectorXd lo = box.input_lower(), hi = box.input_upper();
    return {0.5 * (lo + hi), (2.0 * (hi - lo).cwiseInverse())};
  }
  Eigen::MatrixXd apply(const Eigen::MatrixXd& points) const {
    return ((points.colwise() - center).array().colwise() * inv_half_width.array()).matrix();
  }
};

// Pure second derivatives are needed in space only.
inline std::vector<bool> spatial_hessian_mask(const SpaceTimeBox& box) {
  std::vector<bool> mask(box.input_dim(), true);
  mask[0] = false;
  return mask;
}

namespace detail {

inline ad::DualValue<Eigen::MatrixXd> lift(const ad::DualValue<Eigen::MatrixXd>& d, std::nullptr_t) { return d; }
inline ad::DualValue<ad::Var<double>> lift(const ad::DualValue<Eigen::MatrixXd>& d, ad::Tape<double>* tape) {
  return nn::to_tape(*tape, d);
}

template <typename T, typename W, typename B, typename TapePtr>
std::vector<ad::DualValue<T>> output_jets_impl(const std::vector<W>& weights, const std::vector<B>& biases,
                                               nn::Activation act, const PinnProblem& problem, BcMode mode,
                                               const Eigen::MatrixXd& points, const std::vector<bool>& want_hess,
                                               TapePtr tape) {
  require(points.rows() == problem.box.input_dim(), "points do not match the problem input dimension");
  const InputMap map = InputMap::for_box(problem.box);
  const auto seeded = nn::seed_inputs<double>(map.apply(points), map.inv_half_width, want_hess);
  const ad::DualValue<T> raw = nn::propagate(weights, biases, act, lift(seeded, tape));

  std::optional<nn::BoundaryBlend> blend;
  if (mode == BcMode::Hard)
    blend = nn::boundary_blend(problem.dirichlet, points, static_cast<std::size_t>(problem.outputs), want_hess);

  std::vector<ad::DualValue<T>> out;
  for (int k = 0; k < problem.outputs; ++k) {
    ad::DualValue<T> o = nn::output_row(raw, k) * problem.scaling.scale(k) + problem.scaling.offset(k);
    if (blend && blend->value[k])
      o = nn::blend_output(o, lift(blend->heaviside, tape), lift(blend->complement, tape),
                           lift(*blend->value[k], tape));
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace detail

// Physical output jets, no recording.
inline std::vector<ad::DualValue<Eigen::MatrixXd>> output_jets(const nn::NetworkParams<double>& net,
                                                               const PinnProblem& problem, BcMode mode,
                                                               const Eigen::MatrixXd& points,
                                                               const std::vector<bool>& want_hess) {
  return detail::output_jets_impl<Eigen::MatrixXd>(net.weights, net.biases, net.hidden_activation, problem, mode,
                                                   points, want_hess, nullptr);
}

// Physical output jets recorded on a tape against registered parameters.
inline std::vector<ad::DualValue<ad::Var<double>>> output_jets(ad::Tape<double>& tape,
                                                               const nn::TapeParams<double>& params,
                                                               nn::Activation act, const PinnProblem& problem,
                                                               BcMode mode, const Eigen::MatrixXd& points,
                                                               const std::vector<bool>& want_hess) {
  return detail::output_jets_impl<ad::Var<double>>(params.weights, params.biases, act, problem, mode, points,
                                                   want_hess, &tape);
}

// Physical outputs (values only), one column per point.
inline Eigen::MatrixXd evaluate_outputs(const nn::NetworkParams<double>& net, const PinnProblem& problem,
                                        BcMode mode, const Eigen::MatrixXd& points) {
  require(points.rows() == problem.box.input_dim(), "points do not match the problem input dimension");
  const InputMap map = InputMap::for_box(problem.box);
  Eigen::MatrixXd raw = nn::forward_batch(net, map.apply(points));
  Eigen::MatrixXd out = (raw.array().colwise() * problem.scaling.scale.array()).matrix();
  out.colwise() += problem.scaling.offset;
  if (mode == BcMode::Soft) return out;
  for (Eigen::Index c = 0; c < points.cols(); ++c) out.col(c) = nn::apply_hard_bc(out.col(c), problem.dirichlet, points.col(c));
  return out;
}

}  // namespace meltpinn::loss
