#pragma once

// Declarative description of a PINN problem: space-time box, material
// regions with their output layout, Dirichlet wrapper, Neumann faces,
// interface conditions, labeled data and residual scales.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "meltpinn/errors.hpp"
#include "meltpinn/network/hard_bc.hpp"
#include "meltpinn/physics/material.hpp"
#include "meltpinn/physics/residuals.hpp"

namespace meltpinn::loss {

// Axis-aligned space-time box; inputs are ordered [t, x, (y, z)].
struct SpaceTimeBox {
  double t_min = 0.0;
  double t_max = 1.0;
  Eigen::VectorXd lower;  // spatial
  Eigen::VectorXd upper;

  int space_dim() const { return static_cast<int>(lower.size()); }
  int input_dim() const { return space_dim() + 1; }

  Eigen::VectorXd input_lower() const {
    Eigen::VectorXd v(input_dim());
    v << t_min, lower;
    return v;
  }
  Eigen::VectorXd input_upper() const {
    Eigen::VectorXd v(input_dim());
    v << t_max, upper;
    return v;
  }

  void validate() const {
    require(lower.size() == upper.size() && lower.size() >= 1 && lower.size() <= 3,
            "space dimension must be 1, 2 or 3");
    require(t_max > t_min, "time window has zero length");
    for (Eigen::Index j = 0; j < lower.size(); ++j)
      require(upper(j) > lower(j), "domain box has zero volume along axis " + std::to_string(j));
  }

  bool contains(const Eigen::VectorXd& p, double tol = 0.0) const {
    if (p(0) < t_min - tol || p(0) > t_max + tol) return false;
    for (Eigen::Index j = 0; j < lower.size(); ++j)
      if (p(1 + j) < lower(j) - tol || p(1 + j) > upper(j) + tol) return false;
    return true;
  }
};

// Index of each physical field among the network outputs, per region.
struct FieldLayout {
  int velocity = -1;  // first of space_dim consecutive outputs, or -1
  int pressure = -1;
  int temperature = 0;
};

struct MaterialRegion {
  physics::MaterialPhaseProps material;
  Eigen::VectorXd lower;  // spatial sub-box
  Eigen::VectorXd upper;
  FieldLayout layout;

  bool contains(const Eigen::VectorXd& point) const {
    for (Eigen::Index j = 0; j < lower.size(); ++j)
      if (point(1 + j) < lower(j) || point(1 + j) > upper(j)) return false;
    return true;
  }
};

// A face of the box: axis j, lower (false) or upper (true) side.
struct BoxFace {
  int axis = 0;
  bool upper = false;
};

enum class TractionModel { None, Marangoni };

struct NeumannFace {
  BoxFace face;
  TractionModel traction = TractionModel::None;
  // Prescribed heat flux q at a point [t, x, ...]; empty means no flux term.
  std::function<double(const Eigen::VectorXd&)> heat_flux;
};

// Perfect thermal contact between two regions across a plane x_axis = position.
struct ContactInterface {
  int axis = 0;
  double position = 0.0;
  int region_below = 0;
  int region_above = 1;
};

// Labeled samples for one field (velocity, pressure or temperature).
struct FieldLabels {
  std::string field;           // "u", "p" or "T"
  Eigen::MatrixXd points;      // input_dim x N
  Eigen::MatrixXd targets;     // components x N
  std::vector<int> region;     // region index per sample
  double scale = 1.0;          // deviations are divided by this before squaring

  Eigen::Index count() const { return points.cols(); }
};

struct ResidualScales {
  double momentum = 1.0;
  double continuity = 1.0;
  double energy = 1.0;
  double traction = 1.0;
  double flux = 1.0;
  double contact_temperature = 1.0;
  double contact_flux = 1.0;
};

// physical = offset + scale * raw, per network output.
struct OutputScaling {
  Eigen::VectorXd offset;
  Eigen::VectorXd scale;
};

struct PinnProblem {
  std::string name;
  SpaceTimeBox box;
  int outputs = 1;
  std::vector<std::string> output_names;
  std::vector<MaterialRegion> regions;
  std::vector<ContactInterface> contacts;
  std::vector<NeumannFace> neumann;
  // Faces carrying Dirichlet data, flags ordered (lower_0, upper_0, ...).
  std::vector<bool> dirichlet_faces;
  nn::HardBCWrapper dirichlet;
  OutputScaling scaling;
  ResidualScales scales;
  std::vector<FieldLabels> labels;
  // Optional manufactured forcing; defaults are the material gravity and no source.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> body_force;
  std::function<double(const Eigen::VectorXd&)> heat_source;

  int region_of(const Eigen::VectorXd& point) const {
    for (std::size_t r = 0; r < regions.size(); ++r)
      if (regions[r].contains(point)) return static_cast<int>(r);
    return -1;
  }

  void validate() const {
    box.validate();
    require(outputs >= 1, "problem needs at least one output");
    require(!regions.empty(), "problem needs at least one material region");
    require(static_cast<int>(output_names.size()) == outputs, "one name per output");
    require(scaling.offset.size() == outputs && scaling.scale.size() == outputs,
            "output scaling must cover every output");
    require(dirichlet_faces.size() == static_cast<std::size_t>(2 * box.space_dim()),
            "one Dirichlet flag per box face");
    for (const auto& r : regions) {
      r.material.validate();
      require(r.layout.temperature >= 0 && r.layout.temperature < outputs, "temperature output out of range");
      require(r.layout.velocity < 0 || r.layout.velocity + box.space_dim() <= outputs,
              "velocity outputs out of range");
      require(r.layout.pressure < outputs, "pressure output out of range");
    }
    for (const auto& l : labels) {
      require(l.points.rows() == box.input_dim(), "label points have the wrong dimension");
      require(l.targets.cols() == l.points.cols(), "label targets/points count mismatch");
      require(static_cast<Eigen::Index>(l.region.size()) == l.points.cols(), "label region list mismatch");
      require(l.scale > 0.0, "label scale must be positive");
    }
  }
};

}  // namespace meltpinn::loss
