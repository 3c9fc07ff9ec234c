#include <cmath>

#include "doctest.h"
#include "homflow/errors.hpp"
#include "homflow/error_analysis.hpp"
#include "support.hpp"

using namespace homflow;

TEST_CASE("slope of an exact power law") {
  std::vector<double> h, e;
  for (int k = 2; k <= 7; ++k) {
    h.push_back(std::ldexp(1.0, -k));
    e.push_back(3.0 * std::pow(h.back(), 5));
  }
  const auto r = convergence_slope(h, e, 4.7, 5.3);
  CHECK(r.slope == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(r.residual < 1e-12);
  CHECK(r.pass);
  CHECK(r.window_h.size() == 6);
  CHECK_FALSE(convergence_slope(h, e, 1.7, 2.3).pass);
}

TEST_CASE("slope window drops floor rows and needs four points") {
  std::vector<double> h{0.5, 0.25, 0.125, 0.0625, 0.03125}, e{1e-4, 1e-6, 1e-8, 1e-10, 1e-15};
  const auto r = convergence_slope(h, e, 0, 100);
  CHECK(r.window_h.size() == 4);
  std::vector<double> e2{1e-4, 1e-6, 1e-8, 1e-14, 1e-15};
  CHECK_THROWS_AS(convergence_slope(h, e2, 0, 100), DomainError);
}

TEST_CASE("error tables validate") {
  ErrorTable t{"p", "m", {"x"}, {{0.5, 1e-3, 1e-3, {1.0}}, {0.25, 1e-4, 1e-4, {2.0}}}};
  CHECK_NOTHROW(t.validate());
  t.rows[1].h = 0.5;
  CHECK_THROWS_AS(t.validate(), DomainError);
  t.rows[1].h = 0.25;
  t.rows[1].aux.clear();
  CHECK_THROWS_AS(t.validate(), DomainError);
  t.rows[1].aux = {std::nan("")};
  t.rows[1].err_metric = -1.0;
  CHECK_THROWS_AS(t.validate(), DomainError);
}

TEST_CASE("p_alpha maximum is the 1-norm") {
  Rng rng(3);
  const Vector x = homflow::testing::random_vector(rng, 3);
  double best = -1e300;
  for (unsigned a = 0; a < 8; ++a) best = std::max(best, p_alpha(x, a));
  CHECK(best == doctest::Approx(x.lpNorm<1>()).epsilon(1e-15));
  Vector y(2);
  y << 1.0, -2.0;
  CHECK(p_alpha(y, 0) == -1.0);
  CHECK(p_alpha(y, 2) == 3.0);
  CHECK(p_alpha(y, 3) == 1.0);
}

TEST_CASE("smooth cutoff shape") {
  CHECK(smooth_cutoff(-0.1) == 1.0);
  CHECK(smooth_cutoff(0.0) == 1.0);
  CHECK(smooth_cutoff(1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(smooth_cutoff(1.5) == 0.0);
  CHECK(smooth_cutoff(0.5) == doctest::Approx(0.5).epsilon(1e-14));
  double prev = 1.0;
  for (int i = 1; i <= 100; ++i) {
    const double c = smooth_cutoff(i / 100.0);
    CHECK(c <= prev + 1e-15);
    prev = c;
  }
}

TEST_CASE("comparison family vanishes at o, dominates the distance and is supported near o") {
  for (const auto& sp : {SpaceDescriptor::sphere(3), SpaceDescriptor::group(3)}) {
    const ComparisonFamily fam(sp, 0.3);
    CHECK(fam.size() == 1 << sp.tangent_dim());
    CHECK(fam.max_member(Point::base(sp)) == 0.0);
    CHECK(fam.lipschitz() > 0.0);
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
      const double r = 0.3 * rng.uniform();
      const Point p = homflow::testing::nearby_point(Point::base(sp), rng, r);
      CHECK(fam.max_member(p) >= geodesic_distance(p, Point::base(sp)) - 1e-14);
      const Point far = homflow::testing::nearby_point(Point::base(sp), rng, 0.61);
      CHECK(fam.cutoff(far) == 0.0);
    }
  }
  CHECK_THROWS_AS(ComparisonFamily(SpaceDescriptor::sphere(3), 1.0), DomainError);
  CHECK_THROWS_AS(ComparisonFamily(SpaceDescriptor::sphere(3), 0.0), DomainError);
}

TEST_CASE("local errors need a positive step and shrink with h") {
  const auto sp = SpaceDescriptor::sphere(3);
  const auto v = sample_field(sp, "b");
  const auto suite = test_function_suite(sp);
  const Point x = sample_point(sp, 7);
  const auto spec = MethodSpec::from_id("lie-euler");
  CHECK_THROWS_AS(local_errors(spec, v, x, 0.0, suite), DomainError);
  const auto coarse = local_errors(spec, v, x, 0.1, suite);
  const auto fine = local_errors(spec, v, x, 0.05, suite);
  CHECK(fine.err_metric < coarse.err_metric / 3.0);
  CHECK(coarse.err_testfn.size() == suite.size());
  CHECK(global_error(spec, v, x, 0.0, 4) == 0.0);
}

TEST_CASE("local error table carries comparison columns") {
  const auto sp = SpaceDescriptor::group(3);
  const auto v = sample_field(sp, "c");
  const std::vector<double> hs{0.25, 0.125, 0.0625, 0.03125};
  const auto t = local_error_table(MethodSpec::from_id("rkmk4"), v, sample_point(sp, 7), hs, test_function_suite(sp));
  CHECK_NOTHROW(t.validate());
  REQUIRE(t.aux_names.size() == 2);
  for (const auto& row : t.rows) CHECK(row.aux[0] >= row.err_metric - 1e-14);
  const auto s = convergence_slope(t, ErrorColumn::Metric, 4.5, 5.5);
  CHECK(s.pass);
}

TEST_CASE("global table rows") {
  const auto sp = SpaceDescriptor::sphere(3);
  const auto v = sample_field(sp, "b");
  const auto t = global_error_table(MethodSpec::from_id("lie-euler"), v, sample_point(sp, 7), 1.0, {64, 8, 16, 32});
  CHECK_NOTHROW(t.validate());
  CHECK(t.rows.front().h == 1.0 / 8);
  CHECK(t.rows.front().aux[0] == 8.0);
  CHECK(convergence_slope(t, ErrorColumn::Metric, 0.7, 1.3).pass);
}

TEST_CASE("Gronwall constant of the zero field is zero, Killing fields do not expand") {
  const auto sp = SpaceDescriptor::sphere(3);
  const Point p = sample_point(sp, 1);
  Rng rng(4);
  const Point q = homflow::testing::nearby_point(p, rng, 0.2);
  const auto zero = CoefficientField::constant(sp, Matrix::Zero(3, 3));
  const auto r0 = gronwall_check(zero, p, q, 1.0, 4);
  CHECK(r0.c_t == 0.0);
  CHECK(r0.pass);
  const auto kill = sample_field(sp, "a");
  const auto rk = gronwall_check(kill, p, q, 1.0, 4);
  CHECK(rk.max_ratio <= 1.0 + 1e-12);
  CHECK(rk.pass);
}

TEST_CASE("Gronwall constant is stable under resolution doubling") {
  const auto sp = SpaceDescriptor::group(3);
  const auto v = sample_field(sp, "c");
  const Point p = sample_point(sp, 1);
  Rng rng(9);
  const Point q = homflow::testing::nearby_point(p, rng, 0.1);
  const double c8 = gronwall_constant(v, p, q, 1.0, 8).c_t;
  const double c16 = gronwall_constant(v, p, q, 1.0, 16).c_t;
  CHECK(std::abs(c16 - c8) < 0.02 * c16);
  const auto r = gronwall_check(v, p, q, 1.0, 16);
  CHECK(r.pass);
  CHECK(r.max_ratio <= 1.0);
}

TEST_CASE("fan decomposition with a single step is the local error") {
  const auto sp = SpaceDescriptor::sphere(3);
  const auto v = sample_field(sp, "b");
  const Point x = sample_point(sp, 7);
  const auto spec = MethodSpec::from_id("rkmk4");
  const auto fan = windermere_decomposition(spec, v, x, uniform_grid(0.0, 0.1, 1));
  REQUIRE(fan.e.size() == 1);
  CHECK(fan.horizon[0] == 0.0);
  CHECK(fan.big_e[0] == doctest::Approx(fan.e[0]).epsilon(1e-12));
  CHECK(fan.global_error == doctest::Approx(fan.e[0]).epsilon(1e-12));
  CHECK(fan.pass());
}

TEST_CASE("fan decomposition on a short grid") {
  const auto sp = SpaceDescriptor::group(3);
  const auto v = sample_field(sp, "c");
  const auto fan = windermere_decomposition(MethodSpec::from_id("lie-euler"), v, sample_point(sp, 7),
                                            uniform_grid(0.0, 0.5, 8));
  CHECK(fan.e.size() == 8);
  CHECK(fan.transport_pass);
  CHECK(fan.triangle_pass);
  CHECK(fan.bound_pass);
  CHECK(fan.global_error <= fan.sum_big_e * (1 + 1e-9));
}

TEST_CASE("mechanism check on a short ladder") {
  const auto sp = SpaceDescriptor::sphere(3);
  const auto v = sample_field(sp, "b");
  const ComparisonFamily fam(sp, 0.3);
  const auto ladder = mechanism_ladder(MethodSpec::from_id("lie-euler"), v, sample_point(sp, 7),
                                       {0.0625, 0.03125, 0.015625}, fam, 8);
  CHECK(ladder.pass);
  for (const auto& r : ladder.reports) {
    CHECK(r.invariance_pass);
    CHECK(r.domination_pass);
  }
  CHECK_THROWS_AS(mechanism_check(MethodSpec::from_id("lie-euler"), v, sample_point(sp, 7), 3.0, fam),
                  DomainError);
}
