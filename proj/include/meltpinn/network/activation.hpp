#pragma once

#include <cmath>

namespace meltpinn::nn {

// Logistic function, evaluated on the branch that never exponentiates a
// positive argument.
template <typename Scalar>
inline Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

// swish(x) = x * sigmoid(x).
template <typename Scalar>
inline Scalar swish(Scalar x) {
  return x * sigmoid(x);
}

template <typename Scalar>
inline Scalar swish_d1(Scalar x) {
  const Scalar s = sigmoid(x);
  return s + x * s * (Scalar(1) - s);
}

template <typename Scalar>
inline Scalar swish_d2(Scalar x) {
  const Scalar s = sigmoid(x);
  const Scalar q = s * (Scalar(1) - s);
  return q * (Scalar(2) + x * (Scalar(1) - Scalar(2) * s));
}

// Needed only by the reverse sweep through swish_d2 nodes.
template <typename Scalar>
inline Scalar swish_d3(Scalar x) {
  const Scalar s = sigmoid(x);
  const Scalar q = s * (Scalar(1) - s);
  const Scalar c = Scalar(1) - Scalar(2) * s;
  return q * (c * (Scalar(3) + x * c) - Scalar(2) * x * q);
}

enum class Activation { Swish, Identity };

}  // namespace meltpinn::nn
