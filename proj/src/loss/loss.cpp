#include "meltpinn/loss/loss.hpp"

#include <cmath>
#include <numeric>

#include "meltpinn/physics/residuals.hpp"

namespace meltpinn::loss {

using Var = ad::Var<double>;
using Matrix = Eigen::MatrixXd;

double loss_data(const std::vector<FieldDeviation>& fields) {
  double total = 0.0;
  for (const auto& f : fields) {
    require(f.predicted.rows() == f.target.rows() && f.predicted.cols() == f.target.cols(),
            "predictions and labels are not aligned");
    require(f.scale > 0.0, "label scale must be positive");
    if (f.predicted.cols() == 0) continue;
    total += ((f.predicted - f.target) / f.scale).squaredNorm() / static_cast<double>(f.predicted.cols());
  }
  return total;
}

double mean_square_residuals(const std::vector<Matrix>& components, double scale) {
  double total = 0.0;
  for (const auto& c : components) {
    require(c.size() > 0, "empty residual row");
    total += (c / scale).squaredNorm() / static_cast<double>(c.size());
  }
  return total;
}

Var mean_square_residuals(const std::vector<Var>& components, double scale) {
  require(!components.empty(), "no residual components");
  Var total = ad::mean(ad::square(components.front() / scale));
  for (std::size_t i = 1; i < components.size(); ++i) total = total + ad::mean(ad::square(components[i] / scale));
  return total;
}

namespace {

Var zero(ad::Tape<double>& tape) { return tape.constant(0.0); }

// Sum of squares of every row in `components`, each divided by `scale`.
Var sum_squares(const std::vector<Var>& components, double scale) {
  Var total = ad::sum(ad::square(components.front() / scale));
  for (std::size_t i = 1; i < components.size(); ++i) total = total + ad::sum(ad::square(components[i] / scale));
  return total;
}

Matrix select_columns(const Matrix& m, const std::vector<Eigen::Index>& cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(cols[i]);
  return out;
}

// Column indices of `points` grouped by material region.
std::vector<std::vector<Eigen::Index>> partition_by_region(const PinnProblem& problem, const Matrix& points) {
  std::vector<std::vector<Eigen::Index>> groups(problem.regions.size());
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    const int r = problem.region_of(points.col(c));
    require(r >= 0, "collocation point lies outside every material region");
    groups[r].push_back(c);
  }
  return groups;
}

template <typename T>
physics::FieldState<T> field_state(const std::vector<ad::DualValue<T>>& outputs, const FieldLayout& layout,
                                   int space_dim) {
  physics::FieldState<T> s;
  s.space_dim = space_dim;
  if (layout.velocity >= 0)
    for (int j = 0; j < space_dim; ++j) s.velocity.push_back(outputs[layout.velocity + j]);
  if (layout.pressure >= 0) s.pressure = outputs[layout.pressure];
  s.temperature = outputs[layout.temperature];
  return s;
}

std::vector<Var> constant_rows(ad::Tape<double>& tape, const Matrix& m) {
  std::vector<Var> rows;
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(tape.constant(Matrix(m.row(r))));
  return rows;
}

// Value-only outputs on the tape (no input derivatives).
Var output_values(const TapeContext& ctx, const Matrix& points) {
  const PinnProblem& problem = ctx.problem;
  const InputMap map = InputMap::for_box(problem.box);
  Var z = ctx.tape.constant(map.apply(points));
  const std::size_t layers = ctx.params.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    z = nn::affine(ctx.params.weights[l], ctx.params.biases[l], z);
    if (l + 1 < layers && ctx.activation == nn::Activation::Swish) z = ad::swish(z);
  }
  Matrix scale = problem.scaling.scale.replicate(1, points.cols());
  Matrix offset = problem.scaling.offset.replicate(1, points.cols());
  Var y = z * ctx.tape.constant(scale) + ctx.tape.constant(offset);
  if (ctx.mode == BcMode::Soft) return y;
  // Hard wrapper: y * H + v_bc * (1 - H) per constrained output.
  Matrix h = Matrix::Ones(problem.outputs, points.cols());
  Matrix vbc = Matrix::Zero(problem.outputs, points.cols());
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    const Eigen::VectorXd x = points.col(c);
    const double hc = nn::heaviside(problem.dirichlet.distance(x).value, problem.dirichlet.ramp_width);
    for (int k = 0; k < problem.outputs; ++k) {
      if (!problem.dirichlet.boundary_value[k]) continue;
      h(k, c) = hc;
      vbc(k, c) = problem.dirichlet.boundary_value[k](x).value;
    }
  }
  const Matrix complement = (1.0 - h.array()).matrix();
  return ctx.tape.constant(Matrix(vbc.cwiseProduct(complement))) + y * ctx.tape.constant(h);
}

// Picks output row rows[c] from column c of a (outputs x N) node.
Var gather_rows(ad::Tape<double>& tape, Var values, const std::vector<int>& rows) {
  const Eigen::Index outputs = values.rows(), n = values.cols();
  Matrix mask = Matrix::Zero(outputs, n);
  for (Eigen::Index c = 0; c < n; ++c) mask(rows[c], c) = 1.0;
  return ad::matmul(tape.constant(Matrix::Ones(1, outputs)), values * tape.constant(mask));
}

}  // namespace

Var loss_data(const TapeContext& ctx, const std::vector<FieldLabels>& labels) {
  const PinnProblem& problem = ctx.problem;
  Var total = zero(ctx.tape);
  for (const auto& l : labels) {
    if (l.count() == 0) continue;
    const Var values = output_values(ctx, l.points);
    const Eigen::Index components = l.targets.rows();
    Var field_sum = zero(ctx.tape);
    for (Eigen::Index comp = 0; comp < components; ++comp) {
      std::vector<int> rows(l.count());
      for (Eigen::Index c = 0; c < l.count(); ++c) {
        const FieldLayout& layout = problem.regions.at(l.region[c]).layout;
        int row = -1;
        if (l.field == "T") row = layout.temperature;
        else if (l.field == "p") row = layout.pressure;
        else if (l.field == "u") row = layout.velocity < 0 ? -1 : layout.velocity + static_cast<int>(comp);
        require(row >= 0, "labels for field '" + l.field + "' have no matching output");
        rows[c] = row;
      }
      const Var pred = gather_rows(ctx.tape, values, rows);
      const Var dev = (pred - ctx.tape.constant(Matrix(l.targets.row(comp)))) / l.scale;
      field_sum = field_sum + ad::sum(ad::square(dev));
    }
    total = total + field_sum / static_cast<double>(l.count());
  }
  return total;
}

Var loss_pde_interior(const TapeContext& ctx, const Matrix& interior) {
  const PinnProblem& problem = ctx.problem;
  require(interior.cols() > 0, "interior collocation batch is empty");
  const int dim = problem.box.space_dim();
  const auto mask = spatial_hessian_mask(problem.box);
  const auto groups = partition_by_region(problem, interior);
  Var total = zero(ctx.tape);
  for (std::size_t r = 0; r < groups.size(); ++r) {
    if (groups[r].empty()) continue;
    const MaterialRegion& region = problem.regions[r];
    const Matrix pts = select_columns(interior, groups[r]);
    const auto jets = output_jets(ctx.tape, ctx.params, ctx.activation, problem, ctx.mode, pts, mask);
    const auto state = field_state(jets, region.layout, dim);
    const Var& like = state.temperature.value;

    Var source = ctx.tape.constant(Matrix::Zero(1, pts.cols()));
    if (problem.heat_source) {
      Matrix q(1, pts.cols());
      for (Eigen::Index c = 0; c < pts.cols(); ++c) q(0, c) = problem.heat_source(pts.col(c));
      source = ctx.tape.constant(q);
    }
    total = total + ad::sum(ad::square(physics::residual_energy(state, region.material, source) /
                                       problem.scales.energy));
    if (!state.velocity.empty()) {
      std::vector<Var> g;
      if (problem.body_force) {
        Matrix gm(dim, pts.cols());
        for (Eigen::Index c = 0; c < pts.cols(); ++c) gm.col(c) = problem.body_force(pts.col(c));
        g = constant_rows(ctx.tape, gm);
      } else {
        g = physics::constant_vector(like, region.material.gravity.head(dim));
      }
      total = total + sum_squares(physics::residual_momentum(state, region.material, g), problem.scales.momentum);
      total = total + ad::sum(ad::square(physics::residual_continuity(state) / problem.scales.continuity));
    }
  }
  return total / static_cast<double>(interior.cols());
}

Var loss_pde_neumann(const TapeContext& ctx, const CollocationBatch& batch) {
  const PinnProblem& problem = ctx.problem;
  const int dim = problem.box.space_dim();
  const std::vector<bool> no_hess(problem.box.input_dim(), false);
  Var total = zero(ctx.tape);

  if (batch.n_traction() > 0) {
    const auto groups = partition_by_region(problem, batch.traction_points);
    Var sum = zero(ctx.tape);
    for (std::size_t r = 0; r < groups.size(); ++r) {
      if (groups[r].empty()) continue;
      const MaterialRegion& region = problem.regions[r];
      const Matrix pts = select_columns(batch.traction_points, groups[r]);
      const Matrix normals = select_columns(batch.traction_normals, groups[r]);
      const auto jets = output_jets(ctx.tape, ctx.params, ctx.activation, problem, ctx.mode, pts, no_hess);
      const auto state = field_state(jets, region.layout, dim);
      const std::vector<Var> n = constant_rows(ctx.tape, normals);
      std::vector<Var> grad_t;
      for (int j = 0; j < dim; ++j) grad_t.push_back(state.temperature.grad[physics::FieldState<Var>::space(j)]);
      const std::vector<Var> tau =
          physics::marangoni_traction(grad_t, n, region.material.marangoni_coefficient);
      sum = sum + sum_squares(physics::traction_mismatch(state, region.material, n, tau), problem.scales.traction);
    }
    total = total + sum / static_cast<double>(batch.n_traction());
  }

  if (batch.n_flux() > 0) {
    const auto groups = partition_by_region(problem, batch.flux_points);
    Var sum = zero(ctx.tape);
    for (std::size_t r = 0; r < groups.size(); ++r) {
      if (groups[r].empty()) continue;
      const MaterialRegion& region = problem.regions[r];
      const Matrix pts = select_columns(batch.flux_points, groups[r]);
      const Matrix normals = select_columns(batch.flux_normals, groups[r]);
      Matrix q(1, pts.cols());
      for (std::size_t i = 0; i < groups[r].size(); ++i) {
        const auto& face = problem.neumann.at(batch.flux_face[groups[r][i]]);
        q(0, static_cast<Eigen::Index>(i)) = face.heat_flux ? face.heat_flux(pts.col(static_cast<Eigen::Index>(i))) : 0.0;
      }
      const auto jets = output_jets(ctx.tape, ctx.params, ctx.activation, problem, ctx.mode, pts, no_hess);
      const auto state = field_state(jets, region.layout, dim);
      const Var mismatch =
          physics::flux_mismatch(state, region.material, constant_rows(ctx.tape, normals), ctx.tape.constant(q));
      sum = sum + ad::sum(ad::square(mismatch / problem.scales.flux));
    }
    total = total + sum / static_cast<double>(batch.n_flux());
  }

  if (batch.contact_points.cols() > 0) {
    Var sum = zero(ctx.tape);
    for (std::size_t k = 0; k < problem.contacts.size(); ++k) {
      std::vector<Eigen::Index> cols;
      for (std::size_t i = 0; i < batch.contact_index.size(); ++i)
        if (batch.contact_index[i] == static_cast<int>(k)) cols.push_back(static_cast<Eigen::Index>(i));
      if (cols.empty()) continue;
      const ContactInterface& contact = problem.contacts[k];
      const Matrix pts = select_columns(batch.contact_points, cols);
      const auto jets = output_jets(ctx.tape, ctx.params, ctx.activation, problem, ctx.mode, pts, no_hess);
      const MaterialRegion& below = problem.regions.at(contact.region_below);
      const MaterialRegion& above = problem.regions.at(contact.region_above);
      const auto& tb = jets[below.layout.temperature];
      const auto& ta = jets[above.layout.temperature];
      const std::size_t axis = physics::FieldState<Var>::space(contact.axis);
      const Var kb = physics::local_props(below.material, tb.value).conductivity;
      const Var ka = physics::local_props(above.material, ta.value).conductivity;
      const Var jump_t = (tb.value - ta.value) / problem.scales.contact_temperature;
      const Var jump_q = (kb * tb.grad[axis] - ka * ta.grad[axis]) / problem.scales.contact_flux;
      sum = sum + ad::sum(ad::square(jump_t)) + ad::sum(ad::square(jump_q));
    }
    total = total + sum / static_cast<double>(batch.contact_points.cols());
  }
  return total;
}

namespace {

// Constrained (output, column) pairs: the output must belong to the region
// holding the point and carry Dirichlet data.
Matrix dirichlet_targets(const PinnProblem& problem, const Matrix& points, Matrix& active) {
  Matrix target = Matrix::Zero(problem.outputs, points.cols());
  active = Matrix::Zero(problem.outputs, points.cols());
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    const Eigen::VectorXd x = points.col(c);
    const int r = problem.region_of(x);
    require(r >= 0, "boundary point lies outside every material region");
    const FieldLayout& layout = problem.regions[r].layout;
    std::vector<int> owned{layout.temperature};
    if (layout.pressure >= 0) owned.push_back(layout.pressure);
    if (layout.velocity >= 0)
      for (int j = 0; j < problem.box.space_dim(); ++j) owned.push_back(layout.velocity + j);
    for (int k : owned) {
      if (!problem.dirichlet.boundary_value[k]) continue;
      target(k, c) = problem.dirichlet.boundary_value[k](x).value;
      active(k, c) = 1.0 / problem.scaling.scale(k);
    }
  }
  return target;
}

}  // namespace

Var soft_bc_loss(const TapeContext& ctx, const Matrix& boundary_points) {
  if (boundary_points.cols() == 0) return zero(ctx.tape);
  Matrix active;
  const Matrix target = dirichlet_targets(ctx.problem, boundary_points, active);
  const Var values = output_values(ctx, boundary_points);
  const Var dev = (values - ctx.tape.constant(target)) * ctx.tape.constant(active);
  return ad::sum(ad::square(dev)) / static_cast<double>(boundary_points.cols());
}

double soft_bc_loss(const nn::NetworkParams<double>& net, const PinnProblem& problem, BcMode mode,
                    const Matrix& boundary_points) {
  if (boundary_points.cols() == 0) return 0.0;
  Matrix active;
  const Matrix target = dirichlet_targets(problem, boundary_points, active);
  const Matrix values = evaluate_outputs(net, problem, mode, boundary_points);
  return (values - target).cwiseProduct(active).squaredNorm() / static_cast<double>(boundary_points.cols());
}

LossValues evaluate_loss(const nn::NetworkParams<double>& net, const PinnProblem& problem,
                         const CollocationBatch& batch, const LossWeights& weights, BcMode mode,
                         nn::NetworkParams<double>* gradient) {
  weights.validate();
  ad::Tape<double> tape;
  const auto params = nn::register_params(tape, net);
  const TapeContext ctx{tape, params, net.hidden_activation, problem, mode};
  const Var data = loss_data(ctx, batch.labels);
  const Var interior = loss_pde_interior(ctx, batch.interior);
  const Var neumann = loss_pde_neumann(ctx, batch);
  const Var soft = (mode == BcMode::Soft && weights.soft_bc > 0.0) ? soft_bc_loss(ctx, batch.dirichlet_points)
                                                                    : zero(tape);
  const Var total = total_loss(weights, data, interior, neumann, soft);
  LossValues v{data.scalar(), interior.scalar(), neumann.scalar(), soft.scalar(), total.scalar()};
  if (gradient) {
    tape.backward(total);
    *gradient = nn::grad_wrt_params(tape, net);
  }
  return v;
}

}  // namespace meltpinn::loss
