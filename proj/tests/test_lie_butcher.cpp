#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "homflow/errors.hpp"
#include "homflow/integrators.hpp"
#include "homflow/lie_butcher.hpp"
#include "support.hpp"

using namespace homflow;

namespace {

using Combination = std::map<PlanarForest, double>;

PlanarTree node() { return PlanarTree(); }
PlanarTree with(std::vector<PlanarTree> children) { return PlanarTree(std::move(children)); }

// Left grafting of a single node onto every vertex of a forest, as leftmost child.
std::vector<PlanarForest> graft_node(const PlanarForest& forest);

std::vector<PlanarTree> graft_node(const PlanarTree& tree) {
  std::vector<PlanarTree> out;
  std::vector<PlanarTree> at_root{node()};
  for (const auto& c : tree.children()) at_root.push_back(c);
  out.emplace_back(std::move(at_root));
  for (const auto& f : graft_node(tree.children_forest())) out.emplace_back(f);
  return out;
}

std::vector<PlanarForest> graft_node(const PlanarForest& forest) {
  std::vector<PlanarForest> out;
  const auto& trees = forest.trees();
  for (std::size_t i = 0; i < trees.size(); ++i) {
    for (const auto& t : graft_node(trees[i])) {
      std::vector<PlanarTree> copy = trees;
      copy[i] = t;
      out.emplace_back(std::move(copy));
    }
  }
  return out;
}

// Applies the operator "differentiate along V": ω -> •ω + (• grafted onto ω).
Combination apply_v(const Combination& c) {
  Combination out;
  for (const auto& [forest, w] : c) {
    std::vector<PlanarTree> prefixed{node()};
    for (const auto& t : forest.trees()) prefixed.push_back(t);
    out[PlanarForest(prefixed)] += w;
    for (const auto& g : graft_node(forest)) out[g] += w;
  }
  return out;
}

// Value of W(f) at x through the ambient gradient; independent of the jet machinery in the library.
double apply_field(const CoefficientField& w, const ScalarField& f, const Point& x) {
  return frobenius_inner(f.gradient(x), w.vector(x));
}

}  // namespace

TEST_CASE("forest counts follow the Catalan numbers") {
  const std::vector<std::size_t> expected{1, 1, 2, 5, 14, 42, 132, 429, 1430};
  for (int n = 0; n <= kMaxForestOrder; ++n) {
    const auto forests = generate_forests(n);
    CHECK(forests.size() == expected[static_cast<std::size_t>(n)]);
    for (std::size_t i = 1; i < forests.size(); ++i) CHECK(forests[i - 1] < forests[i]);
    for (const auto& f : forests) CHECK(f.order() == n);
  }
  CHECK_THROWS_AS(generate_forests(9), SizeGuardError);
  CHECK_THROWS_AS(generate_forests(-1), DomainError);
}

TEST_CASE("printing and parsing round trip") {
  for (int n = 0; n <= 6; ++n) {
    for (const auto& f : generate_forests(n)) {
      CHECK(PlanarForest::parse(f.to_string()) == f);
    }
  }
  CHECK(PlanarForest::parse("").empty());
  CHECK(PlanarForest::parse("0").empty());
  CHECK(PlanarForest::parse("∅").empty());
  CHECK(PlanarForest::parse("* [*]") == PlanarForest::parse("• [•]"));
  CHECK(PlanarForest::parse("[• •]").order() == 3);
  CHECK(PlanarForest().to_string() == "∅");
  CHECK_THROWS_AS(PlanarForest::parse("[•"), DomainError);
  CHECK_THROWS_AS(PlanarForest::parse("x"), DomainError);
}

TEST_CASE("planar factorial of small forests") {
  auto fact = [](const char* s) { return sigma_factorial_character(PlanarForest::parse(s)).factorial; };
  CHECK(fact("∅") == 1);
  CHECK(fact("•") == 1);
  CHECK(fact("• •") == 2);
  CHECK(fact("[•]") == 2);
  CHECK(fact("• • •") == 6);
  CHECK(fact("[• •]") == 6);
  CHECK(fact("[[•]]") == 6);
  CHECK(fact("• [•]") == 3);
  CHECK(fact("[•] •") == 6);
  for (int n = 0; n <= 6; ++n)
    for (const auto& f : generate_forests(n)) {
      const auto c = sigma_factorial_character(f);
      CHECK(c.sigma == 1);
      CHECK(c.exact == doctest::Approx(1.0 / static_cast<double>(c.factorial)).epsilon(1e-15));
    }
}

TEST_CASE("1/factorial equals the coefficient of each forest in V^k / k!") {
  Combination c{{PlanarForest(), 1.0}};
  double k_factorial = 1.0;
  for (int k = 1; k <= 7; ++k) {
    c = apply_v(c);
    k_factorial *= k;
    const auto forests = generate_forests(k);
    CHECK(c.size() == forests.size());
    for (const auto& f : forests) {
      INFO(f.to_string());
      CHECK(c[f] / k_factorial == doctest::Approx(sigma_factorial_character(f).exact).epsilon(1e-14));
    }
  }
}

TEST_CASE("coefficient identity on a nonlinear field") {
  const auto sp = SpaceDescriptor::sphere(3);
  const auto v = sample_field(sp, "b");
  const auto f = test_function_suite(sp)[2];
  const Point x = sample_point(sp, 9);
  for (int k = 1; k <= 4; ++k) {
    double sum = 0.0;
    for (const auto& w : generate_forests(k))
      sum += sigma_factorial_character(w).exact * elementary_differential(w, v, f, x);
    double kf = 1.0;
    for (int i = 2; i <= k; ++i) kf *= i;
    const double direct = iterated_lie_derivative(v, f, x, k) / kf;
    CHECK(std::abs(sum - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("post-Lie product matches a finite difference along the flow direction") {
  const auto sp = SpaceDescriptor::sphere(3);
  const auto xf = sample_field(sp, "b"), yf = sample_field(sp, "b", {{0.2, 0.7, -0.3}, 1.5});
  const auto prod = post_lie_product(xf, yf);
  const Point p = sample_point(sp, 2);
  const Matrix a = xf.coeff(p);
  std::vector<double> steps, errs;
  for (double s : {1e-2, 5e-3, 2.5e-3}) {
    const Matrix fd = (yf.coeff(act(mat_exp(s * a), p)) - yf.coeff(act(mat_exp(-s * a), p))) / (2 * s);
    steps.push_back(s);
    errs.push_back((fd - prod.coeff(p)).norm());
  }
  CHECK(homflow::testing::log2_slope(steps, errs) > 1.8);
  CHECK(is_skew(prod.coeff(p)));
}

TEST_CASE("post-Lie product of constants vanishes and regularity drops") {
  const auto sp = SpaceDescriptor::group(3);
  const auto a = sample_field(sp, "a"), c = sample_field(sp, "c");
  CHECK(post_lie_product(c, a).coeff(sample_point(sp, 1)).norm() == 0.0);
  const auto prod = post_lie_product(a, c);
  CHECK(prod.regularity() == kCatalogRegularity - 1);
  auto low = c;
  for (int i = 0; i < kCatalogRegularity; ++i) low = post_lie_product(a, low);
  CHECK(low.regularity() == 0);
  CHECK_THROWS_AS(post_lie_product(a, low), RegularityError);
}

TEST_CASE("two routes to the chain differential agree") {
  // V_{[•]} f = (V ▷ V)(f), and V_{• •} f = V(V f) - (V ▷ V)(f).
  const auto sp = SpaceDescriptor::sphere(3);
  const auto v = sample_field(sp, "b");
  const auto vv = post_lie_product(v, v);
  for (const auto& f : test_function_suite(sp)) {
    const Point x = sample_point(sp, 6);
    const double chain = apply_field(vv, f, x);
    CHECK(std::abs(elementary_differential(PlanarForest::parse("[•]"), v, f, x) - chain) < 1e-13);
    const double vvf = iterated_lie_derivative(v, f, x, 2);
    CHECK(std::abs(elementary_differential(PlanarForest::parse("• •"), v, f, x) - (vvf - chain)) < 1e-12);
  }
}

TEST_CASE("constant fields see only bushes of single nodes") {
  const auto sp = SpaceDescriptor::group(3);
  const auto v = sample_field(sp, "a");
  const auto f = test_function_suite(sp)[1];
  const Point x = sample_point(sp, 3);
  for (int k = 2; k <= 4; ++k)
    for (const auto& w : generate_forests(k)) {
      bool flat = true;
      for (const auto& t : w.trees()) flat = flat && t.size() == 1;
      if (!flat) CHECK(elementary_differential(w, v, f, x) == 0.0);
    }
}

TEST_CASE("rotation about e3 applied twice to x1 at e1") {
  const auto sp = SpaceDescriptor::sphere(3);
  const auto v = CoefficientField::constant(sp, hat(Eigen::Vector3d(0, 0, 1)));
  const auto f = coordinate_function(sp, 0);
  const Point x(sp, Vector::Unit(3, 0));
  CHECK(std::abs(iterated_lie_derivative(v, f, x, 1)) < 1e-15);
  CHECK(iterated_lie_derivative(v, f, x, 2) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(iterated_lie_derivative(v, f, x, 0) == 1.0);
  CHECK(elementary_differential(PlanarForest::parse("• •"), v, f, x) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("Lie series of a rotation reproduces the cosine series") {
  const auto sp = SpaceDescriptor::sphere(3);
  const auto v = CoefficientField::constant(sp, hat(Eigen::Vector3d(0, 0, 1)));
  const auto f = coordinate_function(sp, 0);
  const Point x(sp, Vector::Unit(3, 0));
  const auto r = lie_series_partial_sum(v, f, x, 0.1, 3);
  CHECK(r.value == doctest::Approx(1.0 - 0.005).epsilon(1e-14));
  CHECK(std::abs(std::cos(0.1) - r.value) <= r.remainder_bound_probe * 1.0001);
}

TEST_CASE("iterated Lie derivatives match derivatives of f along the flow") {
  const auto sp = SpaceDescriptor::group(3);
  const auto v = sample_field(sp, "c");
  const auto f = test_function_suite(sp)[2];
  const Point x = sample_point(sp, 4);
  auto g = [&](double t) { return f.value(reference_flow(v, x, t)); };
  const double h = 0.01;
  const double d1 = (g(h) - g(-h)) / (2 * h);
  const double d2 = (g(h) - 2 * g(0) + g(-h)) / (h * h);
  const double d1_half = (g(h / 2) - g(-h / 2)) / h;
  const double d2_half = (g(h / 2) - 2 * g(0) + g(-h / 2)) / (h * h / 4);
  // Richardson extrapolation removes the h^2 term.
  CHECK(std::abs((4 * d1_half - d1) / 3 - iterated_lie_derivative(v, f, x, 1)) < 1e-6);
  CHECK(std::abs((4 * d2_half - d2) / 3 - iterated_lie_derivative(v, f, x, 2)) < 1e-4);
}

TEST_CASE("elementary differentials demand enough regularity") {
  const auto sp = SpaceDescriptor::group(3);
  auto v = sample_field(sp, "c");
  const auto f = test_function_suite(sp)[0];
  const auto low = post_lie_product(sample_field(sp, "a"), post_lie_product(sample_field(sp, "a"), v));
  CHECK(low.regularity() == kCatalogRegularity - 2);
  CHECK_NOTHROW(elementary_differential(generate_forests(3)[0], low, f, sample_point(sp, 1)));
  CHECK_THROWS_AS(elementary_differential(generate_forests(4)[0], low, f, sample_point(sp, 1)), RegularityError);
  CHECK_THROWS_AS(elementary_differential(generate_forests(6)[0], v, f, sample_point(sp, 1)), RegularityError);
}

TEST_CASE("the connection is flat with torsion given by the pointwise bracket") {
  // X▷(Y▷Z) − (X▷Y)▷Z − Y▷(X▷Z) + (Y▷X)▷Z = K▷Z with coeff_K = −[coeff_X, coeff_Y].
  struct Case {
    SpaceDescriptor space;
    const char* family;
  };
  for (const Case& c : {Case{SpaceDescriptor::sphere(3), "b"}, Case{SpaceDescriptor::group(3), "c"}}) {
    const auto x = sample_field(c.space, c.family);
    const auto y = sample_field(c.space, c.family, {{0.2, 0.7, -0.3}, 1.5});
    const auto z = sample_field(c.space, c.family, {{-0.4, 0.1, 0.5}, 0.8});
    CoefficientField::TaylorFn bracket = [x, y](const Matrix& coords, const Jet::BasisPtr& basis, int degree) {
      const JetMatrix a = x.taylor(coords, basis, degree), b = y.taylor(coords, basis, degree);
      return JetMatrix(jet_matmul(b, a) - jet_matmul(a, b));
    };
    const CoefficientField k(c.space, "K", nullptr, bracket, kCatalogRegularity);
    const auto lhs = post_lie_product(x, post_lie_product(y, z)) - post_lie_product(post_lie_product(x, y), z) -
                     post_lie_product(y, post_lie_product(x, z)) + post_lie_product(post_lie_product(y, x), z);
    const auto rhs = post_lie_product(k, z);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Point p = sample_point(c.space, s);
      INFO(c.space.id() << " seed " << s);
      CHECK((lhs.coeff(p) - rhs.coeff(p)).norm() < 1e-12 * std::max(1.0, rhs.coeff(p).norm()));
      CHECK(rhs.coeff(p).norm() > 1e-3);
    }
  }
}
