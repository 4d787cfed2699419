#include "meltpinn/stefan/fem.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "meltpinn/physics/residuals.hpp"
#include "meltpinn/stefan/analytic.hpp"

namespace meltpinn::stefan {

void TemperatureField1D::validate() const {
  require(x.size() >= 2, "temperature field needs at least two nodes");
  for (Eigen::Index i = 1; i < x.size(); ++i) require(x(i) > x(i - 1), "grid must be strictly increasing");
  require(!t.empty() && t.size() == temperature.size(), "one snapshot per time stamp");
  for (std::size_t k = 1; k < t.size(); ++k) require(t[k] > t[k - 1], "time stamps must be strictly increasing");
  for (const auto& v : temperature) {
    require(v.size() == x.size(), "snapshot length differs from the grid");
    require(v.allFinite(), "temperature field holds non-finite values");
  }
}

namespace {

double interp_nodes(const Eigen::VectorXd& x, const Eigen::VectorXd& v, double xq) {
  xq = std::clamp(xq, x(0), x(x.size() - 1));
  const auto* begin = x.data();
  const auto* it = std::upper_bound(begin, begin + x.size(), xq);
  Eigen::Index i = std::clamp<Eigen::Index>((it - begin) - 1, 0, x.size() - 2);
  const double s = (xq - x(i)) / (x(i + 1) - x(i));
  return (1.0 - s) * v(i) + s * v(i + 1);
}

}  // namespace

double TemperatureField1D::sample(double xq, double tq) const {
  if (t.size() == 1 || tq <= t.front()) return interp_nodes(x, temperature.front(), xq);
  if (tq >= t.back()) return interp_nodes(x, temperature.back(), xq);
  const std::size_t k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), tq) - t.begin()) - 1;
  const double s = (tq - t[k]) / (t[k + 1] - t[k]);
  return (1.0 - s) * interp_nodes(x, temperature[k], xq) + s * interp_nodes(x, temperature[k + 1], xq);
}

FemProblem stefan_fem_problem(double t_start, double t_end, double mushy_width) {
  FemProblem p;
  p.left = physics::graphite();
  p.right = physics::aluminum(mushy_width);
  p.t_left = kMoldTemperature;
  p.t_right = kAluminumTemperature;
  p.t_start = t_start;
  p.t_end = t_end;
  if (t_start > 0.0)
    p.initial = [t_start](double x) { return analytic_temperature(x, t_start); };
  else
    p.initial = [](double x) { return x <= 0.0 ? kMoldTemperature : kAluminumTemperature; };
  return p;
}

double volumetric_enthalpy(const physics::MaterialPhaseProps& m, double temp) {
  const auto p = physics::local_props(m, temp);
  return p.density * (p.heat_capacity * temp + m.latent_heat * p.fraction);
}

namespace {

struct PointProps {
  double enthalpy, enthalpy_slope, conductivity, conductivity_slope;
};

PointProps point_props(const physics::MaterialPhaseProps& m, double temp) {
  const auto p = physics::local_props(m, temp);
  PointProps r;
  r.enthalpy = p.density * (p.heat_capacity * temp + m.latent_heat * p.fraction);
  r.enthalpy_slope = p.density * (p.heat_capacity + p.heat_capacity_slope * temp + m.latent_heat * p.fraction_slope);
  r.conductivity = p.conductivity;
  const double kl = m.conductivity_liquid(temp), ks = m.conductivity_solid(temp);
  r.conductivity_slope = p.fraction_slope * (kl - ks) +
                         physics::interp_property(p.fraction, m.conductivity_liquid.slope(temp),
                                                  m.conductivity_solid.slope(temp));
  return r;
}

// Local coordinates in (0, 1) where the linear interpolant of (a, b) hits a kink.
void add_kinks(double a, double b, const physics::MaterialPhaseProps& m, std::vector<double>& s) {
  for (double k : {m.solidus, m.liquidus}) {
    if ((a - k) * (b - k) < 0.0) s.push_back((k - a) / (b - a));
  }
}

// Sub-interval breakpoints of an element, including 0 and 1.
std::vector<double> breakpoints(double a, double b, double a_old, double b_old, const physics::MaterialPhaseProps& m) {
  std::vector<double> s{0.0, 1.0};
  add_kinks(a, b, m, s);
  add_kinks(a_old, b_old, m, s);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

const double kGauss = 0.5 / std::sqrt(3.0);

struct Mesh {
  Eigen::VectorXd x;
  std::vector<const physics::MaterialPhaseProps*> material;  // per element
};

Mesh make_mesh(const FemProblem& p, int elements) {
  Mesh mesh;
  mesh.x = Eigen::VectorXd::LinSpaced(elements + 1, p.x_left, p.x_right);
  for (int e = 0; e < elements; ++e)
    mesh.material.push_back(0.5 * (mesh.x(e) + mesh.x(e + 1)) < p.interface_x ? &p.left : &p.right);
  return mesh;
}

// Residual and (optionally) Jacobian of one backward-Euler step.
void assemble(const Mesh& mesh, const Eigen::VectorXd& temp, const Eigen::VectorXd& old, double dt,
              Eigen::VectorXd& residual, std::vector<Eigen::Triplet<double>>* jac) {
  const Eigen::Index n = mesh.x.size();
  residual.setZero(n);
  if (jac) jac->clear();
  for (Eigen::Index e = 0; e + 1 < n; ++e) {
    const auto& m = *mesh.material[e];
    const double h = mesh.x(e + 1) - mesh.x(e);
    const double a = temp(e), b = temp(e + 1), ao = old(e), bo = old(e + 1);
    const double grad = (b - a) / h;
    const double dphi[2] = {-1.0 / h, 1.0 / h};
    double r[2] = {0, 0}, j[2][2] = {{0, 0}, {0, 0}};
    const auto s = breakpoints(a, b, ao, bo, m);
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      const double mid = 0.5 * (s[k] + s[k + 1]), half = s[k + 1] - s[k];
      for (double g : {-kGauss, kGauss}) {
        const double q = mid + g * half;
        const double w = 0.5 * half * h;
        const double phi[2] = {1.0 - q, q};
        const PointProps now = point_props(m, a * phi[0] + b * phi[1]);
        const double e_old = volumetric_enthalpy(m, ao * phi[0] + bo * phi[1]);
        for (int i = 0; i < 2; ++i) {
          r[i] += w * ((now.enthalpy - e_old) / dt * phi[i] + now.conductivity * grad * dphi[i]);
          if (!jac) continue;
          for (int c = 0; c < 2; ++c)
            j[i][c] += w * (now.enthalpy_slope * phi[c] * phi[i] / dt + now.conductivity * dphi[c] * dphi[i] +
                            now.conductivity_slope * phi[c] * grad * dphi[i]);
        }
      }
    }
    for (int i = 0; i < 2; ++i) {
      residual(e + i) += r[i];
      if (jac)
        for (int c = 0; c < 2; ++c) jac->emplace_back(e + i, e + c, j[i][c]);
    }
  }
}

}  // namespace

double total_enthalpy(const FemProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& temp) {
  require(x.size() == temp.size() && x.size() >= 2, "grid/temperature length mismatch");
  double total = 0.0;
  for (Eigen::Index e = 0; e + 1 < x.size(); ++e) {
    const auto& m = 0.5 * (x(e) + x(e + 1)) < problem.interface_x ? problem.left : problem.right;
    const double h = x(e + 1) - x(e);
    const auto s = breakpoints(temp(e), temp(e + 1), temp(e), temp(e + 1), m);
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      const double mid = 0.5 * (s[k] + s[k + 1]), half = s[k + 1] - s[k];
      for (double g : {-kGauss, kGauss}) {
        const double q = mid + g * half;
        total += 0.5 * half * h * volumetric_enthalpy(m, (1.0 - q) * temp(e) + q * temp(e + 1));
      }
    }
  }
  return total;
}

TemperatureField1D fem_solve_1d(const FemProblem& problem, const FemOptions& options) {
  require(options.elements >= 2, "FEM needs at least two elements");
  require(options.dt > 0.0, "time step must be positive");
  require(options.store_every >= 1, "snapshot interval must be at least 1");
  require(problem.t_end > problem.t_start, "end time must follow the start time");
  require(problem.x_right > problem.x_left, "domain has zero length");
  require(static_cast<bool>(problem.initial), "FEM problem needs an initial condition");
  problem.left.validate(200.0, 4000.0);
  problem.right.validate(200.0, 4000.0);

  const Mesh mesh = make_mesh(problem, options.elements);
  const Eigen::Index n = mesh.x.size();
  Eigen::VectorXd temp(n);
  for (Eigen::Index i = 0; i < n; ++i) temp(i) = problem.initial(mesh.x(i));
  if (!problem.adiabatic) {
    temp(0) = problem.t_left;
    temp(n - 1) = problem.t_right;
  }

  TemperatureField1D out;
  out.x = mesh.x;
  out.t.push_back(problem.t_start);
  out.temperature.push_back(temp);

  const double span = problem.t_end - problem.t_start;
  const long steps = static_cast<long>(std::ceil(span / options.dt - 1e-9));
  Eigen::SparseMatrix<double> jac(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd residual(n), trial_res(n);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool pattern_ready = false;

  auto pin_dirichlet = [&](Eigen::VectorXd& r) {
    if (problem.adiabatic) return;
    r(0) = 0.0;
    r(n - 1) = 0.0;
  };

  for (long step = 1; step <= steps; ++step) {
    const double dt = step < steps ? options.dt : span - options.dt * static_cast<double>(steps - 1);
    const double time = problem.t_start + (step < steps ? options.dt * static_cast<double>(step) : span);
    const Eigen::VectorXd old = temp;
    std::vector<double> history;
    bool converged = false;
    for (int it = 0; it < options.max_newton; ++it) {
      assemble(mesh, temp, old, dt, residual, &trip);
      pin_dirichlet(residual);
      if (!problem.adiabatic) {
        trip.erase(std::remove_if(trip.begin(), trip.end(),
                                  [&](const auto& t) { return t.row() == 0 || t.row() == n - 1; }),
                   trip.end());
        trip.emplace_back(0, 0, 1.0);
        trip.emplace_back(n - 1, n - 1, 1.0);
      }
      jac.setFromTriplets(trip.begin(), trip.end());
      if (!pattern_ready) {
        lu.analyzePattern(jac);
        pattern_ready = true;
      }
      lu.factorize(jac);
      if (lu.info() != Eigen::Success) throw NumericalError("FEM Jacobian factorization failed at t = " + std::to_string(time));
      const Eigen::VectorXd delta = lu.solve(-residual);
      // Backtrack on the residual norm across phase-ramp kinks.
      const double r0 = residual.norm();
      double alpha = 1.0;
      Eigen::VectorXd trial = temp + delta;
      for (int ls = 0; ls < 8; ++ls) {
        assemble(mesh, trial, old, dt, trial_res, nullptr);
        pin_dirichlet(trial_res);
        if (trial_res.norm() <= r0 || r0 == 0.0) break;
        alpha *= 0.5;
        trial = temp + alpha * delta;
      }
      temp = trial;
      const double rel = alpha * delta.lpNorm<Eigen::Infinity>() / std::max(1.0, temp.lpNorm<Eigen::Infinity>());
      history.push_back(rel);
      if (!temp.allFinite()) break;
      if (rel <= options.newton_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "FEM Newton iteration did not converge at step " << step << " (t = " << time << " s) after "
          << history.size() << " iterations; relative updates:";
      for (double h : history) msg << ' ' << h;
      throw NumericalError(msg.str());
    }
    if (step % options.store_every == 0 || step == steps) {
      out.t.push_back(time);
      out.temperature.push_back(temp);
    }
  }
  return out;
}

double extract_interface(const Eigen::VectorXd& x, const Eigen::VectorXd& temp, double t_melt) {
  require(x.size() == temp.size() && x.size() >= 2, "grid/temperature length mismatch");
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = temp(i) - t_melt, b = temp(i + 1) - t_melt;
    if (a == 0.0) return x(i);
    if (a * b < 0.0) return x(i) + (x(i + 1) - x(i)) * a / (a - b);
  }
  if (temp(x.size() - 1) == t_melt) return x(x.size() - 1);
  throw NumericalError("no melt-temperature crossing: the field is fully solid or fully liquid");
}

double l2_error(const Sampler& predicted, const Sampler& oracle, const Slab& slab, int nx, int nt) {
  require(nx >= 2 && nt >= 2, "l2_error needs at least 2 samples per axis");
  require(slab.x_max > slab.x_min && slab.t_max > slab.t_min, "slab has zero area");
  double diff = 0.0, ref = 0.0;
  for (int j = 0; j < nt; ++j) {
    const double t = slab.t_min + (slab.t_max - slab.t_min) * j / (nt - 1);
    for (int i = 0; i < nx; ++i) {
      const double x = slab.x_min + (slab.x_max - slab.x_min) * i / (nx - 1);
      const double o = oracle(x, t), d = predicted(x, t) - o;
      diff += d * d;
      ref += o * o;
    }
  }
  require(ref > 0.0, "oracle is identically zero on the slab");
  return std::sqrt(diff / ref);
}

}  // namespace meltpinn::stefan
