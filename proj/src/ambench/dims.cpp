#include <cmath>

#include "meltpinn/ambench/ambench.hpp"

namespace meltpinn::ambench {

namespace {

// Walks from `inside` toward `limit` in steps of `step` and bisects the first
// exit from the molten set. Returns the boundary coordinate (or the limit).
double find_edge(const std::function<bool(double)>& molten, double inside, double limit, double step,
                 double tol) {
  const double dir = limit > inside ? 1.0 : -1.0;
  double a = inside;
  while (true) {
    double b = a + dir * step;
    if (dir * (b - limit) >= 0.0) b = limit;
    if (!molten(b)) {
      while (std::abs(b - a) > tol) {
        const double mid = 0.5 * (a + b);
        (molten(mid) ? a : b) = mid;
      }
      return 0.5 * (a + b);
    }
    if (b == limit) return limit;
    a = b;
  }
}

// Maximizes f over [lo, hi] with a coarse scan followed by golden-section refinement.
double maximize(const std::function<double(double)>& f, double lo, double hi, int scan, double tol) {
  if (hi - lo <= tol) return f(0.5 * (lo + hi));
  int best = 0;
  double best_val = -1.0;
  const double h = (hi - lo) / (scan - 1);
  for (int i = 0; i < scan; ++i) {
    const double v = f(lo + i * h);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + std::max(best - 1, 0) * h, b = lo + std::min(best + 1, scan - 1) * h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::max({best_val, fc, fd});
}

}  // namespace

MeltPoolDims melt_pool_dims(const FieldSampler& temperature, const loss::SpaceTimeBox& box, double threshold,
                            double track_y, const DimsOptions& options) {
  require(box.space_dim() == 3, "melt-pool dimensions need a 3D box");
  require(options.resolution > 0.0 && options.scan_points >= 3, "invalid melt-pool scan options");
  const double x0 = box.lower(0), x1 = box.upper(0), y0 = box.lower(1), y1 = box.upper(1);
  const double z0 = box.lower(2), ztop = box.upper(2);
  const double tol = 0.5 * options.resolution;
  const int n = options.scan_points;

  double seed_x = x0, peak = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double x = x0 + (x1 - x0) * i / (n - 1);
    const double v = temperature(x, track_y, ztop);
    if (v > peak) {
      peak = v;
      seed_x = x;
    }
  }
  MeltPoolDims dims;
  if (!(peak >= threshold)) return dims;
  dims.molten = true;

  const double hx = (x1 - x0) / (n - 1), hy = (y1 - y0) / (n - 1), hz = (ztop - z0) / (n - 1);
  auto along_x = [&](double x) { return temperature(x, track_y, ztop) >= threshold; };
  const double front = find_edge(along_x, seed_x, x1, hx, tol);
  const double back = find_edge(along_x, seed_x, x0, hx, tol);
  dims.length = front - back;

  auto width_at = [&](double x) {
    if (!along_x(x)) return 0.0;
    auto molten = [&](double y) { return temperature(x, y, ztop) >= threshold; };
    return find_edge(molten, track_y, y1, hy, tol) - find_edge(molten, track_y, y0, hy, tol);
  };
  auto depth_at = [&](double x) {
    if (!along_x(x)) return 0.0;
    auto molten = [&](double z) { return temperature(x, track_y, z) >= threshold; };
    return ztop - find_edge(molten, ztop, z0, hz, tol);
  };
  dims.width = maximize(width_at, back, front, n, tol);
  dims.depth = maximize(depth_at, back, front, n, tol);
  return dims;
}

}  // namespace meltpinn::ambench
