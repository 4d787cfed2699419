#pragma once

// Output wrapper that enforces Dirichlet data exactly:
//   v_NN = v_bc * (1 - H(d(x))) + v_raw * H(d(x)),
// with H a cosine ramp from 0 on the boundary to 1 at distance eps.

#include <Eigen/Dense>

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "meltpinn/autodiff/dual.hpp"
#include "meltpinn/errors.hpp"

namespace meltpinn::nn {

// Jet-valued function of one full input point [t, x, (y, z)].
using PointJet = std::function<ad::DualValue<double>(const Eigen::VectorXd&)>;

struct HardBCWrapper {
  double ramp_width = 0.0;
  // Distance to the Dirichlet boundary; spatial only, so its t-derivative is 0.
  PointJet distance;
  // One entry per network output; an empty function leaves that output free.
  std::vector<PointJet> boundary_value;

  void validate(std::size_t outputs) const {
    require(ramp_width > 0.0 && std::isfinite(ramp_width), "hard-BC ramp width must be positive");
    require(static_cast<bool>(distance), "hard-BC wrapper needs a distance function");
    require(boundary_value.size() == outputs,
            "hard-BC wrapper must list every output (constrained or not)");
  }
};

// Smoothed Heaviside on the distance: (1 - cos(pi d / eps)) / 2 below eps, 1 above.
inline double heaviside(double d, double eps) {
  if (d >= eps) return 1.0;
  return 0.5 * (1.0 - std::cos(d * std::numbers::pi / eps));
}

inline ad::DualValue<double> heaviside(const ad::DualValue<double>& d, double eps) {
  const std::size_t dim = d.input_dim();
  if (d.value >= eps) return ad::DualValue<double>::constant(1.0, dim);
  const double w = std::numbers::pi / eps;
  const double h0 = 0.5 * (1.0 - std::cos(w * d.value));
  const double h1 = 0.5 * w * std::sin(w * d.value);
  const double h2 = 0.5 * w * w * std::cos(w * d.value);
  return ad::chain(d, h0, h1, h2);
}

// Values only, one point.
inline Eigen::VectorXd apply_hard_bc(const Eigen::VectorXd& raw, const HardBCWrapper& wrapper,
                                     const Eigen::VectorXd& x) {
  wrapper.validate(static_cast<std::size_t>(raw.size()));
  const double h = heaviside(wrapper.distance(x).value, wrapper.ramp_width);
  Eigen::VectorXd out = raw;
  for (Eigen::Index k = 0; k < raw.size(); ++k) {
    if (!wrapper.boundary_value[k]) continue;
    const double vbc = wrapper.boundary_value[k](x).value;
    out(k) = vbc * (1.0 - h) + raw(k) * h;
  }
  return out;
}

// Per-point jets of H and of each boundary value over a batch of columns,
// laid out as 1 x N rows so they combine with network output rows.
struct BoundaryBlend {
  ad::DualValue<Eigen::MatrixXd> heaviside;
  ad::DualValue<Eigen::MatrixXd> complement;  // 1 - H
  std::vector<std::optional<ad::DualValue<Eigen::MatrixXd>>> value;
};

inline ad::DualValue<Eigen::MatrixXd> pack_rows(const std::vector<ad::DualValue<double>>& jets,
                                                std::size_t dim, const std::vector<bool>& want_hess) {
  const Eigen::Index n = static_cast<Eigen::Index>(jets.size());
  ad::DualValue<Eigen::MatrixXd> r;
  r.value.resize(1, n);
  r.grad.assign(dim, Eigen::MatrixXd(1, n));
  r.hess_diag.assign(dim, Eigen::MatrixXd());
  for (std::size_t i = 0; i < dim; ++i)
    if (want_hess.empty() || want_hess[i]) r.hess_diag[i].resize(1, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& j = jets[c];
    require(j.input_dim() == dim, "point jet has the wrong input dimension");
    r.value(0, c) = j.value;
    for (std::size_t i = 0; i < dim; ++i) {
      r.grad[i](0, c) = j.grad[i];
      if (r.hess_diag[i].size() > 0) r.hess_diag[i](0, c) = j.hess_diag[i];
    }
  }
  return r;
}

inline BoundaryBlend boundary_blend(const HardBCWrapper& wrapper, const Eigen::MatrixXd& points,
                                    std::size_t outputs, const std::vector<bool>& want_hess = {}) {
  wrapper.validate(outputs);
  const std::size_t dim = static_cast<std::size_t>(points.rows());
  std::vector<ad::DualValue<double>> h(points.cols()), hc(points.cols());
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    const Eigen::VectorXd x = points.col(c);
    h[c] = heaviside(wrapper.distance(x), wrapper.ramp_width);
    hc[c] = ad::DualValue<double>::constant(1.0, dim) - h[c];
  }
  BoundaryBlend blend;
  blend.heaviside = pack_rows(h, dim, want_hess);
  blend.complement = pack_rows(hc, dim, want_hess);
  blend.value.resize(outputs);
  for (std::size_t k = 0; k < outputs; ++k) {
    if (!wrapper.boundary_value[k]) continue;
    std::vector<ad::DualValue<double>> v(points.cols());
    for (Eigen::Index c = 0; c < points.cols(); ++c) v[c] = wrapper.boundary_value[k](points.col(c));
    blend.value[k] = pack_rows(v, dim, want_hess);
  }
  return blend;
}

// v_bc (1 - H) + raw H on jets of any entry type.
template <typename T>
ad::DualValue<T> blend_output(const ad::DualValue<T>& raw, const ad::DualValue<T>& h,
                              const ad::DualValue<T>& complement, const ad::DualValue<T>& vbc) {
  return vbc * complement + raw * h;
}

// Distance to the union of selected faces of an axis-aligned box. Inputs
// are [t, x, (y, z)]; lower/upper hold spatial bounds; face flags are
// ordered (lower_0, upper_0, lower_1, upper_1, ...).
inline PointJet box_face_distance(Eigen::VectorXd lower, Eigen::VectorXd upper, std::vector<bool> faces) {
  require(lower.size() == upper.size(), "box bounds differ in dimension");
  require(faces.size() == static_cast<std::size_t>(2 * lower.size()), "one flag per box face");
  bool any = false;
  for (bool f : faces) any = any || f;
  require(any, "box distance needs at least one Dirichlet face");
  return [lower = std::move(lower), upper = std::move(upper), faces = std::move(faces)](
             const Eigen::VectorXd& x) {
    const std::size_t dim = static_cast<std::size_t>(x.size());
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_axis = 0;
    double best_sign = 0.0;
    for (Eigen::Index j = 0; j < lower.size(); ++j) {
      const double s = x(1 + j);
      if (faces[2 * j] && s - lower(j) < best) {
        best = s - lower(j);
        best_axis = static_cast<std::size_t>(1 + j);
        best_sign = 1.0;
      }
      if (faces[2 * j + 1] && upper(j) - s < best) {
        best = upper(j) - s;
        best_axis = static_cast<std::size_t>(1 + j);
        best_sign = -1.0;
      }
    }
    auto d = ad::DualValue<double>::constant(std::max(best, 0.0), dim);
    d.grad[best_axis] = best_sign;
    return d;
  };
}

inline PointJet constant_jet(double value) {
  return [value](const Eigen::VectorXd& x) {
    return ad::DualValue<double>::constant(value, static_cast<std::size_t>(x.size()));
  };
}

}  // namespace meltpinn::nn
