#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "itee/errors.hpp"
#include "itee/fields.hpp"
#include "oracles.hpp"

using namespace itee;
using std::numbers::pi;

namespace {

double max_err(const Grid& g, const Field& f, int c, const std::function<double(const Vec&)>& exact) {
  double e = 0.0;
  for (int k = 0; k < g.nodes(); ++k) e = std::max(e, std::abs(f.at(k, c) - exact(g.coord(k))));
  return e;
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid g(oracle::box(2, 5, 3, 2.0, 1.0));
  CHECK(g.nodes() == 15);
  CHECK(g.h(0) == doctest::Approx(0.5));
  CHECK(g.h(1) == doctest::Approx(0.5));
  CHECK(g.measure() == doctest::Approx(2.0));
  const Vec x = g.coord(g.node(4, 2));
  CHECK(x(0) == doctest::Approx(2.0));
  CHECK(x(1) == doctest::Approx(1.0));
  CHECK(g.on_face(g.node(4, 2), Face::Right));
  CHECK(g.on_face(g.node(4, 2), Face::Top));
  CHECK_FALSE(g.on_face(g.node(2, 1), Face::Left));
  double w = 0.0;
  for (double v : g.volume_weights()) w += v;
  CHECK(w == doctest::Approx(2.0));
  double wq = 0.0;
  for (const auto& q : g.corner_quadrature()) wq += q.weight;
  CHECK(wq == doctest::Approx(2.0));
  CHECK(g.corner_quadrature().size() == 4 * 8);
}

TEST_CASE("gradient is exact on quadratics and second order on smooth fields") {
  const Grid g(oracle::box(2, 9, 7, 1.0, 2.0));
  const Field f = sample(g, 1, [](const Vec& x, int) { return x(0) * x(0) + 3 * x(0) * x(1) - x(1) * x(1); });
  const Field gr = gradient(g, f);
  CHECK(max_err(g, gr, 0, [](const Vec& x) { return 2 * x(0) + 3 * x(1); }) < 1e-12);
  CHECK(max_err(g, gr, 1, [](const Vec& x) { return 3 * x(0) - 2 * x(1); }) < 1e-12);

  std::vector<double> err;
  for (int n : {11, 21, 41, 81}) {
    const Grid h(oracle::box(1, n));
    const Field s = sample(h, 1, [](const Vec& x, int) { return std::sin(2.0 * x(0)); });
    err.push_back(max_err(h, gradient(h, s), 0, [](const Vec& x) { return 2.0 * std::cos(2.0 * x(0)); }));
  }
  for (size_t k = 0; k + 1 < err.size(); ++k) CHECK(std::log2(err[k] / err[k + 1]) > 1.9);
}

TEST_CASE("divergence of a linear flux") {
  const Grid g(oracle::box(2, 6, 6));
  const Field f = sample(g, 2, [](const Vec& x, int c) { return c == 0 ? 2 * x(0) + x(1) : -x(0) + 5 * x(1); });
  const Field dv = divergence(g, f);
  CHECK(max_err(g, dv, 0, [](const Vec&) { return 7.0; }) < 1e-12);
}

TEST_CASE("trapezoidal integrals") {
  const Grid g(oracle::box(2, 5, 5, 2.0, 1.0));
  const Field f = sample(g, 2, [](const Vec& x, int c) { return c == 0 ? 1.0 : x(0) * x(1); });
  const auto v = integrate_volume(g, f);
  CHECK(v[0] == doctest::Approx(2.0));
  CHECK(v[1] == doctest::Approx(1.0));  // bilinear integrand is integrated exactly
  const Field one = sample(g, 1, [](const Vec&, int) { return 1.0; });
  const auto s = integrate_surface(g, one, Physics::Mechanical, Side::Essential);
  CHECK(s[0] == doctest::Approx(6.0));  // perimeter
}

TEST_CASE("corner quadrature gradient of a bilinear field is exact on edges") {
  const Grid g(oracle::box(2, 4, 4));
  const Field f = sample(g, 1, [](const Vec& x, int) { return 1.0 + 2.0 * x(0) - x(1); });
  for (const auto& q : g.corner_quadrature()) {
    const Vec gv = quad_gradient(q, f, 2);
    CHECK(gv(0) == doctest::Approx(2.0));
    CHECK(gv(1) == doctest::Approx(-1.0));
  }
}

TEST_CASE("grid and partition validation") {
  CHECK_THROWS_AS(Grid(oracle::box(1, 2)), GridTooSmall);
  GridSpec s = oracle::box(1, 5);
  s.partitions[0] = FacePartition{{Face::Left}, {Face::Left, Face::Right}};
  CHECK_THROWS_AS(Grid{s}, ValidationError);
  s.partitions[0] = FacePartition{{Face::Left}, {}};
  CHECK_THROWS_AS(Grid{s}, ValidationError);
  s.partitions[0] = FacePartition{{Face::Top}, {Face::Left, Face::Right}};
  CHECK_THROWS_AS(Grid{s}, ValidationError);
  s.partitions[0] = FacePartition{{Face::Left}, {Face::Right}};
  const Grid g(s);
  CHECK(g.side(Physics::Mechanical, 0) == Side::Essential);
  CHECK(g.side(Physics::Mechanical, 4) == Side::Natural);
  CHECK(g.side(Physics::Mechanical, 2) == Side::Interior);
  CHECK_NOTHROW(g.check_partition_axioms(Physics::Mechanical));
}

TEST_CASE("signals and profiles") {
  CHECK(evaluate(Signal{ConstantSignal{2.0}}, 7.0) == 2.0);
  CHECK(evaluate(Signal{RampSignal{2.0, 1.0}}, 0.5) == 0.0);
  CHECK(evaluate(Signal{RampSignal{2.0, 1.0}}, 3.0) == doctest::Approx(4.0));
  CHECK(evaluate(Signal{SineSignal{2.0, pi, 0.0}}, 0.5) == doctest::Approx(2.0));
  CHECK(evaluate(Signal{GaussianPulseSignal{3.0, 1.0, 0.5}}, 1.0) == doctest::Approx(3.0));
  const Grid g(oracle::box(1, 11, 1, 2.0));
  Vec x;
  x(0) = 0.5;
  CHECK(evaluate(Profile{SineProfile{{1, 1}}}, g, x) == doctest::Approx(std::sin(pi / 4)));
  CHECK(evaluate(Profile{UniformProfile{}}, g, x) == 1.0);
  GaussianProfile gp;
  gp.center(0) = 0.5;
  CHECK(evaluate(Profile{gp}, g, x) == doctest::Approx(1.0));
}

TEST_CASE("load fields sum their loads") {
  const Grid g(oracle::box(1, 5));
  Load a{UniformProfile{}, {2.0}, ConstantSignal{1.5}};
  Load b{SineProfile{{1, 1}}, {1.0}, RampSignal{1.0, 0.0}};
  const Field f = load_field(g, {a, b}, 1, 2.0);
  CHECK(f.at(0) == doctest::Approx(3.0));
  CHECK(f.at(2) == doctest::Approx(5.0));
}

TEST_CASE("boundary data") {
  GridSpec s = oracle::box(1, 5);
  s.partitions[0] = FacePartition{{Face::Left}, {Face::Right}};
  const Grid g(s);
  IncrementalAction a;
  a.boundary.push_back({Face::Left, BoundaryKind::Displacement, {0.5}, ConstantSignal{2.0}});
  a.boundary.push_back({Face::Right, BoundaryKind::Traction, {3.0}, ConstantSignal{1.0}});
  CHECK_NOTHROW(validate_action(g, a));
  Field u(5, 1), phi(5, 1), th(5, 1);
  const BoundaryLoads bl = apply_boundary_conditions(g, a, 0.0, u, phi, th);
  CHECK(u.at(0) == doctest::Approx(1.0));
  CHECK(u.at(4) == 0.0);
  CHECK(bl.traction.at(4) == doctest::Approx(3.0));
  CHECK(bl.traction.at(0) == 0.0);

  IncrementalAction bad;
  bad.boundary.push_back({Face::Left, BoundaryKind::Traction, {1.0}, ConstantSignal{}});
  CHECK_THROWS_AS(validate_action(g, bad), PartitionMismatch);
  IncrementalAction wrong;
  wrong.boundary.push_back({Face::Right, BoundaryKind::Traction, {1.0, 2.0}, ConstantSignal{}});
  CHECK_THROWS_AS(validate_action(g, wrong), ValidationError);
}

TEST_CASE("action algebra") {
  IncrementalAction a;
  a.body_force.push_back({UniformProfile{}, {1.0}, ConstantSignal{2.0}});
  const IncrementalAction b = a.scaled(3.0);
  const Grid g(oracle::box(1, 3));
  CHECK(load_field(g, b.body_force, 1, 0.0).at(1) == doctest::Approx(6.0));
  const IncrementalAction c = a.combined(b);
  CHECK(load_field(g, c.body_force, 1, 0.0).at(1) == doctest::Approx(8.0));
}

TEST_CASE("field csv layout") {
  const Grid g(oracle::box(2, 3, 3));
  Field u(g.nodes(), 2), th(g.nodes(), 1);
  u.at(4, 1) = 0.25;
  const std::string csv = field_csv(g, {{"u", &u}, {"theta", &th}});
  CHECK(csv.rfind("# itee-field-csv v1\nx,y,u_0,u_1,theta\n", 0) == 0);
  CHECK(csv.find("0.5,0.5,0,0.25,0\n") != std::string::npos);
}
