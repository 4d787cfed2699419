#pragma once

// Forward-mode jets carrying a value, its input gradient and the pure
// second derivatives d^2/dx_i^2. The entry type T may be a plain scalar, a
// dense Eigen matrix (batch of points, one column per point) or a tape
// variable, so the same propagation code runs with or without recording.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "meltpinn/autodiff/tape.hpp"
#include "meltpinn/errors.hpp"
#include "meltpinn/network/activation.hpp"

namespace meltpinn::ad {

// ---- entry-type adapters -------------------------------------------------

inline bool present(double) { return true; }
inline bool present(float) { return true; }
template <typename S>
bool present(const Var<S>& v) { return v.valid(); }
template <typename Derived>
bool present(const Eigen::MatrixBase<Derived>& m) { return m.size() > 0; }

inline double cmul(double a, double b) { return a * b; }
inline float cmul(float a, float b) { return a * b; }
template <typename S>
Var<S> cmul(const Var<S>& a, const Var<S>& b) { return a * b; }
template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> cmul(
    const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& a,
    const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& b) {
  return a.cwiseProduct(b);
}

template <typename T>
struct scalar_of {
  using type = T;
};
template <typename S>
struct scalar_of<Var<S>> {
  using type = S;
};
template <typename S>
struct scalar_of<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>> {
  using type = S;
};
template <typename T>
using scalar_of_t = typename scalar_of<T>::type;

// ---- DualValue -------------------------------------------------------------

template <typename T>
struct DualValue {
  using Scalar = scalar_of_t<T>;

  T value{};
  std::vector<T> grad;       // d/dx_i, one entry per input coordinate
  std::vector<T> hess_diag;  // d^2/dx_i^2; an absent entry means "not requested"

  std::size_t input_dim() const { return grad.size(); }
  bool has_grad() const {
    if (grad.empty()) return false;
    for (const T& g : grad)
      if (!present(g)) return false;
    return true;
  }
  bool has_hess(std::size_t i) const { return i < hess_diag.size() && present(hess_diag[i]); }

  // Constant jet: zero derivatives. Only meaningful for arithmetic T.
  static DualValue constant(T v, std::size_t dim) {
    static_assert(std::is_arithmetic_v<T>);
    return DualValue{v, std::vector<T>(dim, T(0)), std::vector<T>(dim, T(0))};
  }
  // Independent coordinate i.
  static DualValue coordinate(T v, std::size_t dim, std::size_t i) {
    DualValue d = constant(v, dim);
    d.grad[i] = T(1);
    return d;
  }
};

namespace detail {
template <typename T>
void check_dims(const DualValue<T>& a, const DualValue<T>& b) {
  require(a.grad.size() == b.grad.size(), "dual operands have different input dimensions");
}
}  // namespace detail

template <typename T>
DualValue<T> operator+(const DualValue<T>& a, const DualValue<T>& b) {
  detail::check_dims(a, b);
  DualValue<T> r;
  r.value = a.value + b.value;
  r.grad.resize(a.grad.size());
  r.hess_diag.resize(a.grad.size());
  for (std::size_t i = 0; i < a.grad.size(); ++i) {
    r.grad[i] = a.grad[i] + b.grad[i];
    if (a.has_hess(i) && b.has_hess(i)) r.hess_diag[i] = a.hess_diag[i] + b.hess_diag[i];
  }
  return r;
}

template <typename T>
DualValue<T> operator-(const DualValue<T>& a) {
  DualValue<T> r;
  r.value = -a.value;
  r.grad.resize(a.grad.size());
  r.hess_diag.resize(a.grad.size());
  for (std::size_t i = 0; i < a.grad.size(); ++i) {
    r.grad[i] = -a.grad[i];
    if (a.has_hess(i)) r.hess_diag[i] = -a.hess_diag[i];
  }
  return r;
}

template <typename T>
DualValue<T> operator-(const DualValue<T>& a, const DualValue<T>& b) {
  return a + (-b);
}

// Product rule, including (ab)'' = a''b + 2a'b' + ab''.
template <typename T>
DualValue<T> operator*(const DualValue<T>& a, const DualValue<T>& b) {
  detail::check_dims(a, b);
  using S = scalar_of_t<T>;
  DualValue<T> r;
  r.value = cmul(a.value, b.value);
  r.grad.resize(a.grad.size());
  r.hess_diag.resize(a.grad.size());
  for (std::size_t i = 0; i < a.grad.size(); ++i) {
    r.grad[i] = cmul(a.grad[i], b.value) + cmul(a.value, b.grad[i]);
    if (a.has_hess(i) && b.has_hess(i))
      r.hess_diag[i] = cmul(a.hess_diag[i], b.value) + cmul(a.grad[i], b.grad[i]) * S(2) +
                       cmul(a.value, b.hess_diag[i]);
  }
  return r;
}

template <typename T>
DualValue<T> operator*(const DualValue<T>& a, scalar_of_t<T> s) {
  DualValue<T> r;
  r.value = a.value * s;
  r.grad.resize(a.grad.size());
  r.hess_diag.resize(a.grad.size());
  for (std::size_t i = 0; i < a.grad.size(); ++i) {
    r.grad[i] = a.grad[i] * s;
    if (a.has_hess(i)) r.hess_diag[i] = a.hess_diag[i] * s;
  }
  return r;
}

template <typename T>
DualValue<T> operator*(scalar_of_t<T> s, const DualValue<T>& a) {
  return a * s;
}

template <typename T>
DualValue<T> operator+(const DualValue<T>& a, scalar_of_t<T> s) {
  DualValue<T> r = a;
  if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, Var<scalar_of_t<T>>>)
    r.value = a.value + s;
  else
    r.value = (a.value.array() + s).matrix();
  return r;
}

template <typename T>
DualValue<T> operator+(scalar_of_t<T> s, const DualValue<T>& a) {
  return a + s;
}

template <typename T>
DualValue<T> operator-(const DualValue<T>& a, scalar_of_t<T> s) {
  return a + (-s);
}

// Chain rule for an elementwise function given f(v), f'(v), f''(v).
template <typename T>
DualValue<T> chain(const DualValue<T>& x, T f0, const T& f1, const T& f2) {
  DualValue<T> r;
  r.value = std::move(f0);
  r.grad.resize(x.grad.size());
  r.hess_diag.resize(x.grad.size());
  for (std::size_t i = 0; i < x.grad.size(); ++i) {
    r.grad[i] = cmul(f1, x.grad[i]);
    if (x.has_hess(i)) {
      const T g2 = cmul(x.grad[i], x.grad[i]);
      r.hess_diag[i] = cmul(f2, g2) + cmul(f1, x.hess_diag[i]);
    }
  }
  return r;
}

inline DualValue<double> swish(const DualValue<double>& x) {
  return chain(x, nn::swish(x.value), nn::swish_d1(x.value), nn::swish_d2(x.value));
}

template <typename S>
DualValue<Var<S>> swish(const DualValue<Var<S>>& x) {
  return chain(x, swish(x.value), swish_d1(x.value), swish_d2(x.value));
}

template <typename S>
DualValue<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>> swish(
    const DualValue<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>>& x) {
  using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  M f0 = x.value.unaryExpr([](S v) { return nn::swish(v); });
  M f1 = x.value.unaryExpr([](S v) { return nn::swish_d1(v); });
  M f2 = x.value.unaryExpr([](S v) { return nn::swish_d2(v); });
  return chain(x, std::move(f0), f1, f2);
}

}  // namespace meltpinn::ad
