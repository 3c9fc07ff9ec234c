#include "homflow/integrators.hpp"

#include <cmath>

#include "homflow/errors.hpp"

namespace homflow {

ButcherTableau ButcherTableau::explicit_euler() {
  ButcherTableau t;
  t.name = "euler";
  t.a = Matrix::Zero(1, 1);
  t.b = Vector::Ones(1);
  t.c = Vector::Zero(1);
  t.order = 1;
  return t;
}

ButcherTableau ButcherTableau::classical_rk4() {
  ButcherTableau t;
  t.name = "rk4";
  t.a = Matrix::Zero(4, 4);
  t.a(1, 0) = 0.5;
  t.a(2, 1) = 0.5;
  t.a(3, 2) = 1.0;
  t.b = Vector(4);
  t.b << 1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0;
  t.c = Vector(4);
  t.c << 0.0, 0.5, 0.5, 1.0;
  t.order = 4;
  return t;
}

void ButcherTableau::validate() const {
  const auto s = b.size();
  if (s == 0 || a.rows() != s || a.cols() != s || c.size() != s) {
    throw DomainError("tableau '" + name + "': inconsistent shapes");
  }
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = i; j < s; ++j) {
      if (a(i, j) != 0.0) throw DomainError("tableau '" + name + "': only explicit tableaus are supported");
    }
    if (std::abs(a.row(i).sum() - c(i)) > 1e-14) throw DomainError("tableau '" + name + "': row sum != c");
  }
  if (std::abs(b.sum() - 1.0) > 1e-14) throw DomainError("tableau '" + name + "': weights do not sum to 1");
}

CommutatorFreeScheme CommutatorFreeScheme::cf4() {
  CommutatorFreeScheme s;
  s.name = "cf4";
  s.order = 4;
  s.stages = {
      {},
      {{0.5}},
      {{0.0, 0.5}},
      {{0.5, 0.0, 0.0}, {-0.5, 0.0, 1.0}},
  };
  s.update = {
      {0.25, 1.0 / 6.0, 1.0 / 6.0, -1.0 / 12.0},
      {-1.0 / 12.0, 1.0 / 6.0, 1.0 / 6.0, 0.25},
  };
  return s;
}

void CommutatorFreeScheme::validate() const {
  if (stages.empty() || !stages.front().empty()) throw DomainError("scheme '" + name + "': first stage must be y");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    for (const auto& w : stages[i]) {
      if (w.size() > i) throw DomainError("scheme '" + name + "': stage uses a later coefficient");
    }
  }
  double total = 0.0;
  for (const auto& w : update) {
    if (w.size() > stages.size()) throw DomainError("scheme '" + name + "': update uses unknown stages");
    for (double x : w) total += x;
  }
  if (std::abs(total - 1.0) > 1e-14) throw DomainError("scheme '" + name + "': update weights do not sum to 1");
}

MethodSpec MethodSpec::from_id(const std::string& id) {
  MethodSpec m;
  m.id = id;
  if (id == "lie-euler") {
    m.kind = MethodKind::LieEuler;
    m.order = 1;
    m.tableau = ButcherTableau::explicit_euler();
    m.dexpinv_order = 0;
  } else if (id == "rkmk4") {
    m.kind = MethodKind::Rkmk;
    m.order = 4;
    m.tableau = ButcherTableau::classical_rk4();
    m.dexpinv_order = 2;
  } else if (id == "cf4") {
    m.kind = MethodKind::CommutatorFree;
    m.order = 4;
    m.scheme = CommutatorFreeScheme::cf4();
  } else {
    throw DomainError("unknown method id '" + id + "' (expected lie-euler, rkmk4 or cf4)");
  }
  m.validate();
  return m;
}

std::vector<std::string> MethodSpec::known_ids() { return {"lie-euler", "rkmk4", "cf4"}; }

void MethodSpec::validate() const {
  if (kind == MethodKind::CommutatorFree) {
    scheme.validate();
    if (scheme.order != order) throw DomainError("method '" + id + "': claimed order differs from scheme");
    return;
  }
  tableau.validate();
  if (tableau.order != order) throw DomainError("method '" + id + "': claimed order differs from tableau");
  if (dexpinv_order < 0) throw DomainError("method '" + id + "': negative dexpinv truncation");
  if (dexpinv_order < order - 2) {
    throw DomainError("method '" + id + "': dexpinv truncation " + std::to_string(dexpinv_order) +
                      " is too low for order " + std::to_string(order));
  }
}

Point rkmk_step(const CoefficientField& v, const Point& x, double h, const MethodSpec& spec) {
  if (spec.kind == MethodKind::CommutatorFree) throw DomainError("rkmk_step: method '" + spec.id + "' is not RKMK");
  if (!std::isfinite(h)) throw DomainError("rkmk_step: non-finite step");
  if (h == 0.0) return x;
  const ButcherTableau& t = spec.tableau;
  const auto s = t.b.size();
  const int n = x.space().n();
  std::vector<AlgebraElement> k(static_cast<std::size_t>(s));
  for (Eigen::Index i = 0; i < s; ++i) {
    AlgebraElement u = AlgebraElement::Zero(n, n);
    for (Eigen::Index j = 0; j < i; ++j) {
      if (t.a(i, j) != 0.0) u += (h * t.a(i, j)) * k[static_cast<std::size_t>(j)];
    }
    const AlgebraElement f = (i == 0) ? v.coeff(x) : v.coeff(act(mat_exp(u), x));
    k[static_cast<std::size_t>(i)] = (i == 0) ? f : dexpinv(u, f, spec.dexpinv_order);
  }
  AlgebraElement u = AlgebraElement::Zero(n, n);
  for (Eigen::Index i = 0; i < s; ++i) u += (h * t.b(i)) * k[static_cast<std::size_t>(i)];
  return act(mat_exp(u), x);
}

namespace {

Point apply_exponentials(const std::vector<std::vector<double>>& factors, const std::vector<AlgebraElement>& f,
                         double h, Point y) {
  for (const auto& w : factors) {
    AlgebraElement u = AlgebraElement::Zero(f.front().rows(), f.front().cols());
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] != 0.0) u += (h * w[j]) * f[j];
    }
    y = act(mat_exp(u), y);
  }
  return y;
}

}  // namespace

Point commutator_free_step(const CoefficientField& v, const Point& x, double h, const MethodSpec& spec) {
  if (spec.kind != MethodKind::CommutatorFree) {
    throw DomainError("commutator_free_step: method '" + spec.id + "' is not commutator-free");
  }
  if (!std::isfinite(h)) throw DomainError("commutator_free_step: non-finite step");
  if (h == 0.0) return x;
  std::vector<AlgebraElement> f;
  for (const auto& stage : spec.scheme.stages) {
    f.push_back(v.coeff(apply_exponentials(stage, f, h, x)));
  }
  return apply_exponentials(spec.scheme.update, f, h, x);
}

Point step(const CoefficientField& v, const Point& x, double h, const MethodSpec& spec) {
  if (!(v.space() == x.space())) throw DomainError("step: field and point live on different spaces");
  return spec.kind == MethodKind::CommutatorFree ? commutator_free_step(v, x, h, spec) : rkmk_step(v, x, h, spec);
}

std::vector<double> uniform_grid(double t0, double t1, int n) {
  if (n < 1) throw DomainError("uniform_grid: need at least one step");
  if (!(t1 > t0)) throw DomainError("uniform_grid: empty interval");
  std::vector<double> g(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) g[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / n;
  g.back() = t1;
  return g;
}

Trajectory integrate(const MethodSpec& spec, const CoefficientField& v, const Point& x0,
                     const std::vector<double>& grid) {
  if (grid.size() < 2) throw DomainError("integrate: grid needs at least two nodes");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("integrate: grid must be strictly increasing");
  }
  Trajectory tr;
  tr.method = spec.id;
  tr.times = grid;
  tr.points.reserve(grid.size());
  tr.points.push_back(x0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    tr.points.push_back(step(v, tr.points.back(), grid[i] - grid[i - 1], spec));
  }
  return tr;
}

namespace {

Point rk4_substeps(const CoefficientField& v, const Point& x0, double t, long long m, const MethodSpec& rk4) {
  Point y = x0;
  const double h = t / static_cast<double>(m);
  for (long long i = 0; i < m; ++i) y = rkmk_step(v, y, h, rk4);
  return y;
}

}  // namespace

Point reference_flow(const CoefficientField& v, const Point& x0, double t, double tol) {
  if (!(tol >= 1e-13)) throw DomainError("reference_flow: tolerance below 1e-13 is not attainable");
  if (!std::isfinite(t)) throw DomainError("reference_flow: non-finite time");
  if (!(v.space() == x0.space())) throw DomainError("reference_flow: field and point live on different spaces");
  if (t == 0.0) return x0;
  if (const auto& xi = v.constant_value()) return act(mat_exp(t * *xi), x0);

  static const MethodSpec rk4 = MethodSpec::from_id("rkmk4");
  constexpr long long kMaxSteps = 1LL << 22;
  long long m = std::max<long long>(4, static_cast<long long>(std::ceil(std::abs(t) / 0x1.0p-6)));
  Point coarse = rk4_substeps(v, x0, t, m, rk4);
  while (2 * m <= kMaxSteps) {
    m *= 2;
    Point fine = rk4_substeps(v, x0, t, m, rk4);
    if (geodesic_distance(coarse, fine) < tol / 4) return fine;
    coarse = std::move(fine);
  }
  throw ConvergenceError("reference_flow: no convergence to " + std::to_string(tol) + " within 2^22 steps");
}

}  // namespace homflow
