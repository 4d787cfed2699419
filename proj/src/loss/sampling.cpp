#include "meltpinn/loss/sampling.hpp"

#include <algorithm>
#include <numeric>

namespace meltpinn::loss {

SamplingStrategy parse_sampling_strategy(const std::string& name) {
  if (name == "uniform") return SamplingStrategy::UniformRandom;
  if (name == "lhs") return SamplingStrategy::LatinHypercube;
  throw ContractViolation("unknown sampling strategy '" + name + "' (expected uniform or lhs)");
}

std::string to_string(SamplingStrategy s) { return s == SamplingStrategy::UniformRandom ? "uniform" : "lhs"; }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Eigen::MatrixXd sample_box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int n, std::mt19937_64& rng,
                           SamplingStrategy strategy) {
  require(lower.size() == upper.size(), "sample_box bounds differ in dimension");
  require(n >= 0, "sample count must be non-negative");
  const Eigen::Index dim = lower.size();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd u(dim, n);
  if (strategy == SamplingStrategy::UniformRandom) {
    for (int c = 0; c < n; ++c)
      for (Eigen::Index r = 0; r < dim; ++r) u(r, c) = unit(rng);
  } else {
    std::vector<int> perm(n);
    for (Eigen::Index r = 0; r < dim; ++r) {
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (int c = 0; c < n; ++c) u(r, c) = (perm[c] + unit(rng)) / n;
    }
  }
  return ((u.array().colwise() * (upper - lower).array()).colwise() + lower.array()).matrix();
}

Eigen::MatrixXd sample_interior(const PinnProblem& problem, int n, std::uint64_t seed, SamplingStrategy strategy,
                                const std::optional<FocusRegion>& focus) {
  std::mt19937_64 rng(mix_seed(seed, 0));
  const Eigen::VectorXd lo = problem.box.input_lower(), hi = problem.box.input_upper();
  if (!focus || focus->fraction <= 0.0) return sample_box(lo, hi, n, rng, strategy);
  require(focus->fraction < 1.0, "focus fraction must lie in [0, 1)");
  require(focus->lower.size() == lo.size() && focus->upper.size() == lo.size(), "focus region dimension mismatch");
  const Eigen::VectorXd flo = focus->lower.cwiseMax(lo), fhi = focus->upper.cwiseMin(hi);
  require((fhi - flo).minCoeff() > 0.0, "focus region does not overlap the domain");
  const int nf = static_cast<int>(std::round(focus->fraction * n));
  Eigen::MatrixXd out(lo.size(), n);
  out << sample_box(lo, hi, n - nf, rng, strategy), sample_box(flo, fhi, nf, rng, strategy);
  return out;
}

namespace {

// Splits n as evenly as possible over k bins.
std::vector<int> split_even(int n, std::size_t k) {
  std::vector<int> out(k, k ? n / static_cast<int>(k) : 0);
  for (std::size_t i = 0; k && i < static_cast<std::size_t>(n) % k; ++i) ++out[i];
  return out;
}

Eigen::MatrixXd sample_on_face(const PinnProblem& problem, const BoxFace& face, int n, std::mt19937_64& rng,
                               SamplingStrategy strategy) {
  Eigen::MatrixXd pts = sample_box(problem.box.input_lower(), problem.box.input_upper(), n, rng, strategy);
  pts.row(1 + face.axis).setConstant(face.upper ? problem.box.upper(face.axis) : problem.box.lower(face.axis));
  return pts;
}

Eigen::MatrixXd face_normals(int space_dim, const BoxFace& face, int n) {
  Eigen::MatrixXd nrm = Eigen::MatrixXd::Zero(space_dim, n);
  nrm.row(face.axis).setConstant(face.upper ? 1.0 : -1.0);
  return nrm;
}

void append(Eigen::MatrixXd& dst, const Eigen::MatrixXd& src) {
  if (src.cols() == 0) return;
  if (dst.cols() == 0) {
    dst = src;
    return;
  }
  Eigen::MatrixXd out(dst.rows(), dst.cols() + src.cols());
  out << dst, src;
  dst = std::move(out);
}

}  // namespace

CollocationBatch sample_collocation(const PinnProblem& problem, const CollocationCounts& counts, std::uint64_t seed,
                                    SamplingStrategy strategy, const std::optional<FocusRegion>& focus) {
  problem.validate();
  require(counts.interior > 0, "interior collocation count must be positive");
  require(counts.traction >= 0 && counts.flux >= 0 && counts.dirichlet >= 0 && counts.contact >= 0,
          "collocation counts must be non-negative");
  const int in_dim = problem.box.input_dim(), sp_dim = problem.box.space_dim();
  CollocationBatch b;
  b.interior = sample_interior(problem, counts.interior, seed, strategy, focus);
  b.traction_points.resize(in_dim, 0);
  b.traction_normals.resize(sp_dim, 0);
  b.flux_points.resize(in_dim, 0);
  b.flux_normals.resize(sp_dim, 0);
  b.dirichlet_points.resize(in_dim, 0);
  b.contact_points.resize(in_dim, 0);

  std::mt19937_64 rng(mix_seed(seed, 1));
  std::vector<int> traction_faces, flux_faces;
  for (std::size_t i = 0; i < problem.neumann.size(); ++i) {
    if (problem.neumann[i].traction != TractionModel::None) traction_faces.push_back(static_cast<int>(i));
    if (problem.neumann[i].heat_flux) flux_faces.push_back(static_cast<int>(i));
  }
  require(counts.traction == 0 || !traction_faces.empty(), "traction points requested but no traction face");
  require(counts.flux == 0 || !flux_faces.empty(), "flux points requested but no heat-flux face");

  const auto tsplit = split_even(counts.traction, traction_faces.size());
  for (std::size_t i = 0; i < traction_faces.size(); ++i) {
    const BoxFace& f = problem.neumann[traction_faces[i]].face;
    append(b.traction_points, sample_on_face(problem, f, tsplit[i], rng, strategy));
    append(b.traction_normals, face_normals(sp_dim, f, tsplit[i]));
    b.traction_face.insert(b.traction_face.end(), tsplit[i], traction_faces[i]);
  }
  const auto fsplit = split_even(counts.flux, flux_faces.size());
  for (std::size_t i = 0; i < flux_faces.size(); ++i) {
    const BoxFace& f = problem.neumann[flux_faces[i]].face;
    append(b.flux_points, sample_on_face(problem, f, fsplit[i], rng, strategy));
    append(b.flux_normals, face_normals(sp_dim, f, fsplit[i]));
    b.flux_face.insert(b.flux_face.end(), fsplit[i], flux_faces[i]);
  }

  std::vector<BoxFace> dfaces;
  for (int j = 0; j < sp_dim; ++j)
    for (int side = 0; side < 2; ++side)
      if (problem.dirichlet_faces[2 * j + side]) dfaces.push_back({j, side == 1});
  require(counts.dirichlet == 0 || !dfaces.empty(), "Dirichlet points requested but no Dirichlet face");
  const auto dsplit = split_even(counts.dirichlet, dfaces.size());
  for (std::size_t i = 0; i < dfaces.size(); ++i)
    append(b.dirichlet_points, sample_on_face(problem, dfaces[i], dsplit[i], rng, strategy));

  require(counts.contact == 0 || !problem.contacts.empty(), "contact points requested but no contact plane");
  const auto csplit = split_even(counts.contact, problem.contacts.size());
  for (std::size_t i = 0; i < problem.contacts.size(); ++i) {
    Eigen::MatrixXd pts =
        sample_box(problem.box.input_lower(), problem.box.input_upper(), csplit[i], rng, strategy);
    pts.row(1 + problem.contacts[i].axis).setConstant(problem.contacts[i].position);
    append(b.contact_points, pts);
    b.contact_index.insert(b.contact_index.end(), csplit[i], static_cast<int>(i));
  }
  b.labels = problem.labels;
  return b;
}

void CollocationBatch::validate(const SpaceTimeBox& box) const {
  const double tol = 1e-12;
  auto inside = [&](const Eigen::MatrixXd& pts, const char* what) {
    require(pts.cols() == 0 || pts.rows() == box.input_dim(), std::string(what) + " points have the wrong dimension");
    for (Eigen::Index c = 0; c < pts.cols(); ++c)
      require(box.contains(pts.col(c), tol), std::string(what) + " point lies outside the domain");
  };
  inside(interior, "interior");
  inside(traction_points, "traction");
  inside(flux_points, "flux");
  inside(dirichlet_points, "Dirichlet");
  inside(contact_points, "contact");
  require(traction_normals.cols() == traction_points.cols() &&
              static_cast<Eigen::Index>(traction_face.size()) == traction_points.cols(),
          "traction normals/faces do not match the points");
  require(flux_normals.cols() == flux_points.cols() &&
              static_cast<Eigen::Index>(flux_face.size()) == flux_points.cols(),
          "flux normals/faces do not match the points");
  require(static_cast<Eigen::Index>(contact_index.size()) == contact_points.cols(), "contact index mismatch");
}

}  // namespace meltpinn::loss
