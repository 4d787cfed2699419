#pragma once

// Pointwise thermal-fluid formulas. Everything is templated on the entry
// type T: plain doubles for pointwise checks, tape rows (1 x N) when the
// residuals feed a training loss.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <type_traits>
#include <vector>

#include "meltpinn/autodiff/dual.hpp"
#include "meltpinn/autodiff/tape.hpp"
#include "meltpinn/errors.hpp"
#include "meltpinn/physics/material.hpp"

namespace meltpinn::physics {

namespace detail {

template <typename T>
T constant_like(const T& ref, double v) {
  if constexpr (std::is_arithmetic_v<T>) {
    (void)ref;
    return static_cast<T>(v);
  } else {
    using M = typename ad::Tape<ad::scalar_of_t<T>>::Matrix;
    return ref.tape()->constant(M::Constant(ref.rows(), ref.cols(), v));
  }
}

template <typename T>
T curve(const PropertyCurve& c, const T& temp) {
  if constexpr (std::is_arithmetic_v<T>) {
    return c(temp);
  } else {
    if (c.is_constant()) return constant_like(temp, c.c0);
    T out = temp * c.c1 + c.c0;
    if (c.c2 != 0.0) out = out + ad::square(temp) * c.c2;
    return out;
  }
}

template <typename T>
T curve_slope(const PropertyCurve& c, const T& temp) {
  if constexpr (std::is_arithmetic_v<T>) {
    return c.slope(temp);
  } else {
    if (c.c2 == 0.0) return constant_like(temp, c.c1);
    return temp * (2.0 * c.c2) + c.c1;
  }
}

}  // namespace detail

// ---- phase fraction ------------------------------------------------------

// 0 below the solidus, 1 above the liquidus, linear in between.
template <typename T>
T liquid_fraction(const T& temp, double solidus, double liquidus) {
  require(solidus < liquidus, "liquid_fraction needs solidus < liquidus");
  if constexpr (std::is_arithmetic_v<T>) {
    if (temp <= solidus) return T(0);
    if (temp >= liquidus) return T(1);
    return (temp - solidus) / (liquidus - solidus);
  } else {
    return ad::ramp(temp, solidus, liquidus);
  }
}

// d f_L / dT. At the two kinks the ramp-side value is returned. Piecewise
// constant, so on the tape it is recorded as a constant.
template <typename T>
T liquid_fraction_slope(const T& temp, double solidus, double liquidus) {
  require(solidus < liquidus, "liquid_fraction_slope needs solidus < liquidus");
  const double s = 1.0 / (liquidus - solidus);
  if constexpr (std::is_arithmetic_v<T>) {
    return (temp >= solidus && temp <= liquidus) ? T(s) : T(0);
  } else {
    using M = typename ad::Tape<ad::scalar_of_t<T>>::Matrix;
    const M& v = temp.value();
    M out = v.unaryExpr([=](double x) { return (x >= solidus && x <= liquidus) ? s : 0.0; });
    return temp.tape()->constant(std::move(out));
  }
}

// psi = f_L psi_L + (1 - f_L) psi_S.
inline double interp_property(double fraction, double liquid, double solid) {
  require(fraction >= 0.0 && fraction <= 1.0, "liquid fraction must lie in [0, 1]");
  return fraction * liquid + (1.0 - fraction) * solid;
}

template <typename T>
T interp_property(const T& fraction, const T& liquid, const T& solid) {
  return fraction * liquid + (1.0 - fraction) * solid;
}

// Phase-blended properties and their temperature derivatives at one state.
template <typename T>
struct LocalProps {
  T fraction, fraction_slope;
  T density, density_slope;
  T viscosity;
  T heat_capacity, heat_capacity_slope;
  T conductivity;
};

template <typename T>
LocalProps<T> local_props(const MaterialPhaseProps& m, const T& temp) {
  using detail::constant_like;
  using detail::curve;
  using detail::curve_slope;
  LocalProps<T> p;
  p.fraction = liquid_fraction(temp, m.solidus, m.liquidus);
  p.fraction_slope = liquid_fraction_slope(temp, m.solidus, m.liquidus);
  const T one_minus = 1.0 - p.fraction;
  p.density = m.density_liquid == m.density_solid
                  ? constant_like(temp, m.density_liquid)
                  : p.fraction * m.density_liquid + one_minus * m.density_solid;
  p.density_slope = p.fraction_slope * (m.density_liquid - m.density_solid);
  p.viscosity = m.viscosity_liquid == m.viscosity_solid
                    ? constant_like(temp, m.viscosity_liquid)
                    : p.fraction * m.viscosity_liquid + one_minus * m.viscosity_solid;
  const T cl = curve(m.heat_capacity_liquid, temp), cs = curve(m.heat_capacity_solid, temp);
  p.heat_capacity = interp_property(p.fraction, cl, cs);
  p.heat_capacity_slope = p.fraction_slope * (cl - cs) +
                          interp_property(p.fraction, curve_slope(m.heat_capacity_liquid, temp),
                                          curve_slope(m.heat_capacity_solid, temp));
  p.conductivity =
      interp_property(p.fraction, curve(m.conductivity_liquid, temp), curve(m.conductivity_solid, temp));
  return p;
}

// ---- field state -----------------------------------------------------------

// Outputs of the network (after output scaling and the hard-BC wrapper) as
// jets over the inputs [t, x, (y, z)].
template <typename T>
struct FieldState {
  int space_dim = 3;
  std::vector<ad::DualValue<T>> velocity;  // empty: quiescent medium, u = 0
  std::optional<ad::DualValue<T>> pressure;
  ad::DualValue<T> temperature;

  static constexpr std::size_t kTime = 0;
  static constexpr std::size_t space(int j) { return static_cast<std::size_t>(1 + j); }
  std::size_t input_dim() const { return static_cast<std::size_t>(space_dim + 1); }
};

namespace detail {

template <typename T>
void require_first(const ad::DualValue<T>& f, std::size_t dim, const char* what) {
  if (!f.has_grad() || f.input_dim() != dim)
    throw ContractViolation(std::string("missing first derivatives of ") + what);
}

template <typename T>
void require_laplacian(const ad::DualValue<T>& f, int space_dim, const char* what) {
  for (int j = 0; j < space_dim; ++j)
    if (!f.has_hess(FieldState<T>::space(j)))
      throw ContractViolation(std::string("missing second space derivatives of ") + what);
}

template <typename T>
T laplacian(const ad::DualValue<T>& f, int space_dim) {
  T out = f.hess_diag[FieldState<T>::space(0)];
  for (int j = 1; j < space_dim; ++j) out = out + f.hess_diag[FieldState<T>::space(j)];
  return out;
}

// u . grad(f)
template <typename T>
T advect(const FieldState<T>& s, const ad::DualValue<T>& f) {
  T out = s.velocity[0].value * f.grad[FieldState<T>::space(0)];
  for (int j = 1; j < s.space_dim; ++j) out = out + s.velocity[j].value * f.grad[FieldState<T>::space(j)];
  return out;
}

}  // namespace detail

template <typename T>
std::vector<T> constant_vector(const T& like, const Eigen::VectorXd& v) {
  std::vector<T> out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(detail::constant_like(like, v(i)));
  return out;
}

// r_M = rho (u_t + u.grad u - g) + grad p - 2 mu lap u, with rho, mu
// blended at the local temperature.
template <typename T>
std::vector<T> residual_momentum(const FieldState<T>& s, const MaterialPhaseProps& m,
                                 const std::vector<T>& body_force) {
  const std::size_t dim = s.input_dim();
  require(static_cast<int>(s.velocity.size()) == s.space_dim, "momentum residual needs every velocity component");
  require(s.pressure.has_value(), "momentum residual needs the pressure field");
  require(static_cast<int>(body_force.size()) == s.space_dim, "body force must match the space dimension");
  for (const auto& u : s.velocity) {
    detail::require_first(u, dim, "velocity");
    detail::require_laplacian(u, s.space_dim, "velocity");
  }
  detail::require_first(*s.pressure, dim, "pressure");
  const LocalProps<T> p = local_props(m, s.temperature.value);
  std::vector<T> r;
  for (int i = 0; i < s.space_dim; ++i) {
    const auto& ui = s.velocity[i];
    const T inertia = ui.grad[FieldState<T>::kTime] + detail::advect(s, ui) - body_force[i];
    r.push_back(p.density * inertia + s.pressure->grad[FieldState<T>::space(i)] -
                2.0 * (p.viscosity * detail::laplacian(ui, s.space_dim)));
  }
  return r;
}

template <typename T>
std::vector<T> residual_momentum(const FieldState<T>& s, const MaterialPhaseProps& m) {
  return residual_momentum(s, m, constant_vector(s.temperature.value, m.gravity.head(s.space_dim)));
}

// r_C = div u.
template <typename T>
T residual_continuity(const FieldState<T>& s) {
  require(static_cast<int>(s.velocity.size()) == s.space_dim, "continuity residual needs every velocity component");
  for (const auto& u : s.velocity) detail::require_first(u, s.input_dim(), "velocity");
  T out = s.velocity[0].grad[FieldState<T>::space(0)];
  for (int j = 1; j < s.space_dim; ++j) out = out + s.velocity[j].grad[FieldState<T>::space(j)];
  return out;
}

// r_T = (rho c_p T)_t + u.grad(rho c_p T) + (rho L f_L)_t + u.(rho L grad f_L)
//       - kappa lap T - Q_T
// Time and space derivatives of the property-dependent products are taken
// by the chain rule through the phase blend.
template <typename T>
T residual_energy(const FieldState<T>& s, const MaterialPhaseProps& m, const T& source) {
  const auto& temp = s.temperature;
  detail::require_first(temp, s.input_dim(), "temperature");
  detail::require_laplacian(temp, s.space_dim, "temperature");
  if (!s.velocity.empty()) {
    require(static_cast<int>(s.velocity.size()) == s.space_dim, "energy residual needs every velocity component");
  }
  const LocalProps<T> p = local_props(m, temp.value);
  // d(rho c_p T)/dT
  const T rho_cp = p.density * p.heat_capacity;
  const T sensible = p.density_slope * p.heat_capacity * temp.value +
                     p.density * p.heat_capacity_slope * temp.value + rho_cp;
  const T dt = temp.grad[FieldState<T>::kTime];
  const double rho_l_liquid = m.latent_heat;
  // d(rho L f_L)/dT
  const T latent = (p.density_slope * p.fraction + p.density * p.fraction_slope) * rho_l_liquid;
  T r = sensible * dt + latent * dt;
  if (!s.velocity.empty()) {
    const T u_grad_t = detail::advect(s, temp);
    r = r + sensible * u_grad_t + (p.density * p.fraction_slope * rho_l_liquid) * u_grad_t;
  }
  return r - p.conductivity * detail::laplacian(temp, s.space_dim) - source;
}

template <typename T>
T residual_energy(const FieldState<T>& s, const MaterialPhaseProps& m) {
  return residual_energy(s, m, detail::constant_like(s.temperature.value, 0.0));
}

// Traction mismatch 2 mu sym(grad u) n - p n - tau, per component.
template <typename T>
std::vector<T> traction_mismatch(const FieldState<T>& s, const MaterialPhaseProps& m,
                                 const std::vector<T>& normal, const std::vector<T>& traction) {
  require(static_cast<int>(s.velocity.size()) == s.space_dim && s.pressure.has_value(),
          "traction mismatch needs velocity and pressure");
  require(static_cast<int>(normal.size()) == s.space_dim && static_cast<int>(traction.size()) == s.space_dim,
          "normal/traction dimension mismatch");
  for (const auto& u : s.velocity) detail::require_first(u, s.input_dim(), "velocity");
  const LocalProps<T> p = local_props(m, s.temperature.value);
  std::vector<T> r;
  for (int i = 0; i < s.space_dim; ++i) {
    std::optional<T> shear;
    for (int j = 0; j < s.space_dim; ++j) {
      const T sym = s.velocity[i].grad[FieldState<T>::space(j)] + s.velocity[j].grad[FieldState<T>::space(i)];
      const T term = sym * normal[j];
      shear = shear ? *shear + term : term;
    }
    r.push_back(p.viscosity * *shear - s.pressure->value * normal[i] - traction[i]);
  }
  return r;
}

// Heat-flux mismatch kappa grad T . n - q.
template <typename T>
T flux_mismatch(const FieldState<T>& s, const MaterialPhaseProps& m, const std::vector<T>& normal,
                const T& flux) {
  detail::require_first(s.temperature, s.input_dim(), "temperature");
  require(static_cast<int>(normal.size()) == s.space_dim, "normal dimension mismatch");
  const LocalProps<T> p = local_props(m, s.temperature.value);
  T dn = s.temperature.grad[FieldState<T>::space(0)] * normal[0];
  for (int j = 1; j < s.space_dim; ++j) dn = dn + s.temperature.grad[FieldState<T>::space(j)] * normal[j];
  return p.conductivity * dn - flux;
}

// ---- laser and surface tension -----------------------------------------------

struct LaserSpec {
  double power = 0.0;         // Q, W
  double absorptivity = 0.0;  // eta
  double beam_radius = 0.0;   // r_b, m
  double scan_speed = 0.0;    // V_s, m/s

  void validate() const {
    require(power > 0.0, "laser power must be positive");
    require(absorptivity > 0.0 && absorptivity <= 1.0, "absorptivity must lie in (0, 1]");
    require(beam_radius > 0.0, "beam radius must be positive");
    require(scan_speed >= 0.0, "scan speed must be non-negative");
  }
};

// Gaussian moving heat flux (W/m^2), beam centre at (V_s t, 0).
inline double laser_flux(double x, double y, double t, const LaserSpec& laser) {
  require(laser.beam_radius > 0.0, "beam radius must be positive");
  const double rb2 = laser.beam_radius * laser.beam_radius;
  const double dx = x - laser.scan_speed * t;
  const double peak = 2.0 * laser.power * laser.absorptivity / (std::numbers::pi * rb2);
  return peak * std::exp(-2.0 * (dx * dx + y * y) / rb2);
}

// Tangential Marangoni traction (dsigma/dT) [grad T - (grad T . n) n].
template <typename T>
std::vector<T> marangoni_traction(const std::vector<T>& grad_temp, const std::vector<T>& normal,
                                  double dsigma_dT) {
  require(grad_temp.size() == normal.size() && !normal.empty(), "gradient/normal dimension mismatch");
  auto dot = [](const std::vector<T>& a, const std::vector<T>& b) {
    T s = a[0] * b[0];
    for (std::size_t i = 1; i < a.size(); ++i) s = s + a[i] * b[i];
    return s;
  };
  if constexpr (std::is_arithmetic_v<T>) {
    const double nn = dot(normal, normal);
    require(std::abs(nn - 1.0) < 1e-12, "Marangoni traction needs a unit normal");
  }
  std::vector<T> tangential(normal.size());
  const T gn = dot(grad_temp, normal);
  for (std::size_t i = 0; i < normal.size(); ++i) tangential[i] = grad_temp[i] - gn * normal[i];
  if constexpr (std::is_arithmetic_v<T>) {
    // One re-projection removes the rounding left in the normal component.
    const double rn = dot(tangential, normal);
    for (std::size_t i = 0; i < normal.size(); ++i) tangential[i] -= rn * normal[i];
  }
  for (auto& c : tangential) c = c * dsigma_dT;
  return tangential;
}

inline Eigen::Vector3d marangoni_traction(const Eigen::Vector3d& grad_temp, const Eigen::Vector3d& normal,
                                          double dsigma_dT) {
  const std::vector<double> g{grad_temp.x(), grad_temp.y(), grad_temp.z()};
  const std::vector<double> n{normal.x(), normal.y(), normal.z()};
  const auto t = marangoni_traction(g, n, dsigma_dT);
  return {t[0], t[1], t[2]};
}

// ---- cooling rate ------------------------------------------------------------

// R_c = (T_s - 1273.15) / t_c with t_c = |D_s - D_1273| / V_s; the distances
// are positions of the two isotherms along the scan track.
inline double cooling_rate(double distance_solidus, double distance_1273, double scan_speed,
                           double solidus) {
  require(scan_speed > 0.0, "cooling rate needs a positive scan speed");
  const double gap = std::abs(distance_solidus - distance_1273);
  require(gap > 0.0, "cooling rate needs distinct isotherm positions");
  const double cooling_time = gap / scan_speed;
  return (solidus - 1273.15) / cooling_time;
}

}  // namespace meltpinn::physics
