#include <cmath>

#include "doctest.h"
#include "homflow/errors.hpp"
#include "homflow/integrators.hpp"
#include "support.hpp"

using namespace homflow;

namespace {

const std::vector<std::string> kMethods{"lie-euler", "rkmk4", "cf4"};

// g C(g^T z) g^T: the field transported by a rotation g.
CoefficientField conjugated(const CoefficientField& v, const Matrix& g) {
  CoefficientField::ValueFn value = [v, g](const Matrix& z) -> AlgebraElement {
    return g * v.coeff(Point(v.space(), g.transpose() * z)) * g.transpose();
  };
  CoefficientField::TaylorFn taylor = [](const Matrix&, const Jet::BasisPtr&, int) -> JetMatrix {
    throw RegularityError("conjugated field: values only");
  };
  return CoefficientField(v.space(), v.name() + "^g", value, taylor, v.regularity());
}

}  // namespace

TEST_CASE("tableaux and schemes validate") {
  CHECK_NOTHROW(ButcherTableau::explicit_euler().validate());
  CHECK_NOTHROW(ButcherTableau::classical_rk4().validate());
  CHECK_NOTHROW(CommutatorFreeScheme::cf4().validate());
  for (const auto& id : MethodSpec::known_ids()) CHECK_NOTHROW(MethodSpec::from_id(id).validate());
  CHECK(MethodSpec::from_id("lie-euler").order == 1);
  CHECK(MethodSpec::from_id("rkmk4").order == 4);
  CHECK(MethodSpec::from_id("cf4").order == 4);
  CHECK_THROWS_AS(MethodSpec::from_id("rk45"), DomainError);

  auto bad = ButcherTableau::classical_rk4();
  bad.b(0) += 1e-3;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  auto implicit = ButcherTableau::classical_rk4();
  implicit.a(1, 1) = 0.1;
  CHECK_THROWS_AS(implicit.validate(), DomainError);
  auto low = MethodSpec::from_id("rkmk4");
  low.dexpinv_order = 1;
  CHECK_THROWS_AS(low.validate(), DomainError);
}

TEST_CASE("zero step is the identity") {
  for (const auto& sp : {SpaceDescriptor::sphere(3), SpaceDescriptor::group(3)}) {
    const auto v = sample_field(sp, sp.model() == Model::Sphere ? "b" : "c");
    const Point x = sample_point(sp, 2);
    for (const auto& id : kMethods) {
      CHECK((step(v, x, 0.0, MethodSpec::from_id(id)).coords() - x.coords()).norm() == 0.0);
    }
  }
}

TEST_CASE("constant fields are integrated exactly") {
  Rng rng(5);
  for (const auto& sp : {SpaceDescriptor::sphere(3), SpaceDescriptor::group(3), SpaceDescriptor::sphere(5)}) {
    const Matrix xi = homflow::testing::random_skew(rng, sp.n(), 1.7);
    const auto v = CoefficientField::constant(sp, xi);
    const Point x = sample_point(sp, 3);
    const Point exact(sp, mat_exp(1.0 * xi) * x.coords());
    for (const auto& id : kMethods) {
      const auto traj = integrate(MethodSpec::from_id(id), v, x, uniform_grid(0.0, 1.0, 7));
      CHECK(geodesic_distance(traj.points.back(), exact) <= 1e-13);
    }
    CHECK(geodesic_distance(reference_flow(v, x, 1.0), exact) <= 1e-14);
  }
}

TEST_CASE("Lie-Euler is the exponential of the frozen coefficient") {
  const auto sp = SpaceDescriptor::group(3);
  const auto v = sample_field(sp, "c");
  const Point x = sample_point(sp, 7);
  const Point y = step(v, x, 0.1, MethodSpec::from_id("lie-euler"));
  CHECK((y.coords() - mat_exp(0.1 * v.coeff(x)) * x.coords()).norm() < 1e-15);
}

TEST_CASE("steps stay on the manifold") {
  for (const auto& sp : {SpaceDescriptor::sphere(3), SpaceDescriptor::group(3)}) {
    const auto v = sample_field(sp, sp.model() == Model::Sphere ? "b" : "c");
    for (const auto& id : kMethods) {
      const auto traj = integrate(MethodSpec::from_id(id), v, sample_point(sp, 1), uniform_grid(0.0, 2.0, 40));
      CHECK(traj.points.size() == 41);
      CHECK(traj.times.back() == 2.0);
      for (const auto& p : traj.points) CHECK(manifold_defect(p) < 1e-13);
    }
  }
}

TEST_CASE("integration is deterministic") {
  const auto sp = SpaceDescriptor::sphere(3);
  const auto v = sample_field(sp, "b");
  for (const auto& id : kMethods) {
    const auto a = integrate(MethodSpec::from_id(id), v, sample_point(sp, 4), uniform_grid(0.0, 1.0, 10));
    const auto b = integrate(MethodSpec::from_id(id), v, sample_point(sp, 4), uniform_grid(0.0, 1.0, 10));
    CHECK((a.points.back().coords() - b.points.back().coords()).norm() == 0.0);
  }
}

TEST_CASE("grids are validated") {
  const auto sp = SpaceDescriptor::sphere(3);
  const auto v = sample_field(sp, "a");
  const auto spec = MethodSpec::from_id("rkmk4");
  CHECK_THROWS_AS(integrate(spec, v, sample_point(sp, 1), {0.0}), DomainError);
  CHECK_THROWS_AS(integrate(spec, v, sample_point(sp, 1), {0.0, 0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 0), DomainError);
  const auto g = uniform_grid(0.0, 0.3, 3);
  CHECK(g.size() == 4);
  CHECK(g.back() == 0.3);
}

TEST_CASE("global convergence orders on the catalog") {
  struct Case {
    const char* space;
    const char* family;
  };
  for (const Case c : {Case{"sphere:3", "b"}, Case{"group:3", "c"}}) {
    const auto sp = SpaceDescriptor::parse(c.space);
    const auto v = sample_field(sp, c.family);
    const Point x = sample_point(sp, 7);
    const Point ref = reference_flow(v, x, 1.0);
    for (const auto& id : kMethods) {
      const auto spec = MethodSpec::from_id(id);
      std::vector<double> hs, errs;
      for (int n : {16, 32, 64, 128}) {
        const auto traj = integrate(spec, v, x, uniform_grid(0.0, 1.0, n));
        hs.push_back(1.0 / n);
        errs.push_back(geodesic_distance(traj.points.back(), ref));
      }
      INFO(c.space << " " << id);
      const double s = homflow::testing::log2_slope(hs, errs);
      CHECK(s > spec.order - 0.3);
      CHECK(s < spec.order + 0.5);
    }
  }
}

TEST_CASE("methods commute with rotations") {
  const auto sp = SpaceDescriptor::sphere(3);
  const auto v = sample_field(sp, "b");
  const Matrix g = mat_exp(hat(Eigen::Vector3d(0.4, -1.1, 0.7)));
  const auto vg = conjugated(v, g);
  const Point x = sample_point(sp, 11);
  const Point gx = act(g, x);
  for (const auto& id : kMethods) {
    const auto spec = MethodSpec::from_id(id);
    const Point a = act(g, step(v, x, 0.2, spec));
    const Point b = step(vg, gx, 0.2, spec);
    CHECK(geodesic_distance(a, b) < 1e-13);
  }
}

TEST_CASE("reference flow is self-consistent") {
  const auto sp = SpaceDescriptor::group(3);
  const auto v = sample_field(sp, "c");
  const Point x = sample_point(sp, 5);
  const Point whole = reference_flow(v, x, 1.0);
  const Point split = reference_flow(v, reference_flow(v, x, 0.4), 0.6);
  CHECK(geodesic_distance(whole, split) < 1e-11);
  const Point back = reference_flow(v, whole, -1.0);
  CHECK(geodesic_distance(back, x) < 1e-11);
  CHECK(geodesic_distance(reference_flow(v, x, 0.0), x) == 0.0);
  CHECK_THROWS_AS(reference_flow(v, x, 1.0, 1e-14), DomainError);
}
