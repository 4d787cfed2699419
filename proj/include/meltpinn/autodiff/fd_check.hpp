#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>

#include "meltpinn/errors.hpp"

namespace meltpinn::ad {

struct FdCheckResult {
  double max_rel_error = 0.0;
  bool finite = true;  // false if f or the supplied gradient produced a non-finite value
};

// Compares a supplied gradient against central differences coordinate by
// coordinate: |g_i - fd_i| / max(|g_i|, floor).
inline FdCheckResult finite_diff_check(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                                       const Eigen::VectorXd& point, double step, double floor = 1e-12) {
  require(step > 0.0, "finite-difference step must be positive");
  FdCheckResult r;
  const Eigen::VectorXd g = grad(point);
  require(g.size() == point.size(), "gradient length differs from the point dimension");
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    Eigen::VectorXd xp = point, xm = point;
    xp(i) += step;
    xm(i) -= step;
    const double fp = f(xp), fm = f(xm);
    if (!std::isfinite(fp) || !std::isfinite(fm) || !std::isfinite(g(i))) {
      r.finite = false;
      r.max_rel_error = std::numeric_limits<double>::infinity();
      return r;
    }
    const double fd = (fp - fm) / (2.0 * step);
    r.max_rel_error = std::max(r.max_rel_error, std::abs(g(i) - fd) / std::max(std::abs(g(i)), floor));
  }
  return r;
}

}  // namespace meltpinn::ad
