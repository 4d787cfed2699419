#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "meltpinn/ambench/ambench.hpp"
#include "meltpinn/loss/loss.hpp"
#include "meltpinn/loss/model.hpp"

using namespace meltpinn;
using namespace meltpinn::ambench;

TEST_CASE("benchmark cases") {
  const auto a = build_case("A"), b = build_case("B"), c = build_case("C");
  CHECK(a.laser.power == 150.0);
  CHECK(a.laser.scan_speed == 0.4);
  CHECK(b.laser.power == 195.0);
  CHECK(b.laser.scan_speed == 0.8);
  CHECK(c.laser.power == 195.0);
  CHECK(c.laser.scan_speed == 1.2);
  for (const auto& k : {a, b, c}) {
    CHECK(k.laser.absorptivity == 0.43);
    CHECK(k.laser.beam_radius == 50e-6);
    CHECK(k.material.name == "IN625");
    CHECK(k.box.t_max == doctest::Approx(2e-3));
  }
  CHECK_THROWS_AS(build_case("D"), ContractViolation);
  CHECK_THROWS_AS(build_case("a"), ContractViolation);
}

TEST_CASE("benchmark problem wiring") {
  const auto c = build_case("B");
  const auto p = make_problem(c);
  p.validate();
  CHECK(p.outputs == 5);
  REQUIRE(p.neumann.size() == 1);
  CHECK(p.neumann[0].face.axis == 2);
  CHECK(p.neumann[0].face.upper);
  CHECK(p.neumann[0].traction == loss::TractionModel::Marangoni);
  int dirichlet = 0;
  for (bool f : p.dirichlet_faces) dirichlet += f;
  CHECK(dirichlet == 5);
  CHECK_FALSE(p.dirichlet_faces[5]);

  Eigen::Vector4d centre(0.5e-3, 0.4e-3, 0.0, 0.0);
  CHECK(p.neumann[0].heat_flux(centre) == doctest::Approx(2.0 * 195.0 * 0.43 / (M_PI * 2.5e-9)).epsilon(1e-12));

  // Hard-wrapped outputs on the Dirichlet faces equal the prescribed values.
  const auto net = nn::init_params({4, 16, 16, 5}, 9);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd pts(4, 50);
  for (int i = 0; i < 50; ++i) {
    Eigen::Vector4d q;
    q << 2e-3 * unit(rng), 0.0, 0.0, 0.0;
    for (int j = 0; j < 3; ++j) q(1 + j) = c.box.lower(j) + unit(rng) * (c.box.upper(j) - c.box.lower(j));
    const int face = i % 5;
    q(1 + face / 2) = face % 2 ? c.box.upper(face / 2) : c.box.lower(face / 2);
    pts.col(i) = q;
  }
  const Eigen::MatrixXd out = loss::evaluate_outputs(net, p, loss::BcMode::Hard, pts);
  CHECK(out.topRows(3).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((out.row(4).array() - 295.0).abs().maxCoeff() < 1e-12);
}

namespace {

struct Ellipsoid {
  double cx, a, b, c;
  double operator()(double x, double y, double z) const {
    const double q = std::pow((x - cx) / a, 2) + std::pow(y / b, 2) + std::pow(z / c, 2);
    return 1623.0 + 500.0 * (1.0 - q);
  }
};

// Quasi-steady moving point source on a half space.
struct Rosenthal {
  physics::LaserSpec laser;
  double t;
  double operator()(double x, double y, double z) const {
    const auto m = physics::in625();
    const double kappa = m.conductivity_liquid(1623.0);
    const double alpha = kappa / (m.density_liquid * m.heat_capacity_liquid(1623.0));
    const double xi = x - laser.scan_speed * t;
    const double r = std::max(std::sqrt(xi * xi + y * y + z * z), 1e-7);
    const double q = laser.power * laser.absorptivity;
    return 295.0 + q / (2.0 * M_PI * kappa * r) * std::exp(-laser.scan_speed * (xi + r) / (2.0 * alpha));
  }
};

}  // namespace

TEST_CASE("melt-pool dimensions of an ellipsoidal field") {
  const auto box = default_box();
  const Ellipsoid e{0.3e-3, 150e-6, 60e-6, 40e-6};
  const auto d = melt_pool_dims(e, box, 1623.0);
  CHECK(d.molten);
  CHECK(std::abs(d.length - 300e-6) < 0.5e-6);
  CHECK(std::abs(d.width - 120e-6) < 0.5e-6);
  CHECK(std::abs(d.depth - 40e-6) < 0.5e-6);

  SUBCASE("translation along the scan axis") {
    const Ellipsoid moved{0.45e-3, 150e-6, 60e-6, 40e-6};
    const auto m = melt_pool_dims(moved, box, 1623.0);
    CHECK(std::abs(m.length - d.length) < 0.5e-6);
    CHECK(std::abs(m.width - d.width) < 0.5e-6);
    CHECK(std::abs(m.depth - d.depth) < 0.5e-6);
  }
  SUBCASE("stretching x by two doubles the length") {
    const auto stretched = melt_pool_dims([&](double x, double y, double z) { return e(0.3e-3 + (x - 0.3e-3) / 2.0, y, z); },
                                          box, 1623.0);
    CHECK(std::abs(stretched.length - 2.0 * d.length) < 0.5e-6);
    CHECK(std::abs(stretched.width - d.width) < 0.5e-6);
  }
}

TEST_CASE("no molten region") {
  const auto d = melt_pool_dims([](double, double, double) { return 1000.0; }, default_box(), 1623.0);
  CHECK_FALSE(d.molten);
  CHECK(d.length == 0.0);
  CHECK(d.width == 0.0);
  CHECK(d.depth == 0.0);
}

TEST_CASE("moving point source: faster scans run cooler and pools are elongated") {
  const auto b = build_case("B"), c = build_case("C");
  auto peak_below_track = [](const Rosenthal& r) {
    double peak = 0.0;
    for (int i = 0; i <= 2000; ++i) peak = std::max(peak, r(-0.2e-3 + 1e-6 * i, 0.0, -50e-6));
    return peak;
  };
  const Rosenthal rb{b.laser, 0.4e-3 / b.laser.scan_speed}, rc{c.laser, 0.4e-3 / c.laser.scan_speed};
  CHECK(peak_below_track(rc) < peak_below_track(rb));
  for (const char* id : {"A", "B", "C"}) {
    const auto k = build_case(id);
    const auto d = melt_pool_dims(Rosenthal{k.laser, 0.4e-3 / k.laser.scan_speed}, k.box, k.material.liquidus);
    CHECK(d.molten);
    CHECK(d.length >= d.width);
    CHECK(d.depth > 0.0);
  }
}

TEST_CASE("manufactured solution satisfies the 3D residuals") {
  const auto start = std::chrono::steady_clock::now();
  const auto rep = mms_verify_3d(10000, 1);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(rep.points == 10000);
  CHECK(rep.max_scaled < 1e-8);
  CHECK(rep.path_mismatch < 1e-12);
  CHECK(seconds < 60.0);
  CHECK(mms_verify_3d(10, 2).max_scaled < 1e-8);

  const auto bad = mms_verify_3d(1000, 1, 1.0);
  CHECK(bad.energy == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(bad.momentum >= 1.0);
  CHECK(bad.momentum <= mms_material().density_liquid + 1e-9);
  CHECK(bad.continuity < 1e-12);
}

TEST_CASE("hydrostatic rest state") {
  auto m = physics::in625();
  physics::FieldState<double> s;
  s.space_dim = 3;
  const double rho = m.density_liquid;
  for (int i = 0; i < 3; ++i) s.velocity.push_back(ad::DualValue<double>::constant(0.0, 4));
  s.pressure = ad::DualValue<double>::constant(1e5, 4);
  s.pressure->grad[3] = rho * m.gravity.z();
  s.temperature = ad::DualValue<double>::constant(1700.0, 4);
  const auto rm = physics::residual_momentum(s, m);
  for (double r : rm) CHECK(std::abs(r) < 1e-14 * rho * 9.81);
  CHECK(physics::residual_continuity(s) == 0.0);
  CHECK(physics::residual_energy(s, m) == 0.0);
}

TEST_CASE("labeled data window") {
  const std::string csv =
      "t,x,y,z,u,v,w,p,T\n"
      "1.0e-3,0,0,0,1,2,3,4,1700\n"
      "1.3e-3,1e-4,0,-1e-5,,,,,1650\n"
      "1.8e-3,0,0,0,0.5,0.5,0.5,,1500\n";
  const auto w = parse_labeled_csv(csv, 1.2e-3, 1.5e-3);
  CHECK(w.rows == 1);
  CHECK(w.count("T") == 1);
  CHECK(w.count("u") == 0);
  CHECK(w.count("p") == 0);
  CHECK(w.labels[0].points(1, 0) == 1e-4);
  CHECK(w.labels[0].targets(0, 0) == 1650.0);

  const auto all = parse_labeled_csv(csv, 0.0, 1.0);
  CHECK(all.rows == 3);
  CHECK(all.count("u") == 2);
  CHECK(all.count("p") == 1);
  CHECK(all.count("T") == 3);

  const auto path = std::filesystem::temp_directory_path() / "meltpinn_labels.csv";
  std::ofstream(path) << csv;
  CHECK(load_labeled_window(path.string(), 0.0, 1.0).rows == 3);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(parse_labeled_csv(csv, 1.9e-3, 2.0e-3), ContractViolation);
  try {
    parse_labeled_csv("t,x,y,z,u,v,w,p,T\n1,0,0,0,,,,,1\n2,0,0,0,,,,,hot\n", 0.0, 5.0);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_labeled_csv("t,x,y,z,T\n", 0.0, 1.0), ParseError);
  CHECK_THROWS_AS(parse_labeled_csv("t,x,y,z,u,v,w,p,T\n1,0,0,0,1,,,,\n", 0.0, 5.0), ParseError);
  CHECK_THROWS_AS(parse_labeled_csv("t,x,y,z,u,v,w,p,T\n1,0,0,0,,,,\n", 0.0, 5.0), ParseError);
}

TEST_CASE("manufactured PINN problem") {
  const auto p = make_mms_problem(50, 3);
  p.validate();
  CHECK(p.labels.size() == 2);
  const auto net = nn::init_params({4, 12, 5}, 1);
  Eigen::MatrixXd pts(4, 3);
  pts << 0.3, 0.6, 0.9, 0.0, 0.4, 1.0, 0.5, 0.0, 0.2, 0.7, 0.5, 1.0;
  const Eigen::MatrixXd out = loss::evaluate_outputs(net, p, loss::BcMode::Hard, pts);
  for (int c = 0; c < 3; ++c) {
    CHECK(out(4, c) == doctest::Approx(p.dirichlet.boundary_value[4](pts.col(c)).value).epsilon(1e-12));
    CHECK(out(0, c) == doctest::Approx(p.dirichlet.boundary_value[0](pts.col(c)).value).epsilon(1e-12));
  }
  loss::LossWeights w;
  const auto batch = loss::sample_collocation(p, {64, 0, 0, 0, 0}, 1, loss::SamplingStrategy::LatinHypercube);
  const auto v = loss::evaluate_loss(net, p, batch, w, loss::BcMode::Hard);
  CHECK(std::isfinite(v.total));
  CHECK(v.pde_interior > 0.0);
}

TEST_CASE("benchmark loss terms evaluate on the top face") {
  const auto p = make_problem(build_case("A"));
  const auto net = nn::init_params({4, 12, 5}, 1);
  const auto batch = loss::sample_collocation(p, {32, 16, 16, 0, 0}, 2, loss::SamplingStrategy::LatinHypercube);
  batch.validate(p.box);
  for (Eigen::Index c = 0; c < batch.flux_points.cols(); ++c) CHECK(batch.flux_points(3, c) == 0.0);
  nn::NetworkParams<double> grad;
  const auto v = loss::evaluate_loss(net, p, batch, loss::LossWeights{}, loss::BcMode::Hard, &grad);
  CHECK(std::isfinite(v.total));
  CHECK(v.pde_neumann > 0.0);
  CHECK(grad.weights[0].allFinite());
}
