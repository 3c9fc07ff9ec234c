#include "homflow/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "homflow/errors.hpp"
#include "homflow/parallel.hpp"
#include "homflow/random.hpp"

namespace homflow {

void ErrorTable::validate() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ErrorRow& r = rows[i];
    if (!(r.h > 0.0)) throw DomainError("ErrorTable: step sizes must be positive");
    if (i > 0 && !(r.h < rows[i - 1].h)) throw DomainError("ErrorTable: h must be strictly decreasing");
    if (!(r.err_metric >= 0.0) || !(r.err_testfn_max >= 0.0) || !std::isfinite(r.err_metric) ||
        !std::isfinite(r.err_testfn_max)) {
      throw DomainError("ErrorTable: errors must be finite and nonnegative");
    }
    if (r.aux.size() != aux_names.size()) throw DomainError("ErrorTable: aux column count mismatch");
  }
}

SlopeReport convergence_slope(const std::vector<double>& h, const std::vector<double>& err, double lo, double hi) {
  if (h.size() != err.size()) throw DomainError("convergence_slope: length mismatch");
  std::vector<double> lx, ly;
  SlopeReport rep;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0)) throw DomainError("convergence_slope: step sizes must be positive");
    if (!(err[i] >= kErrorFloor) || !std::isfinite(err[i])) continue;
    lx.push_back(std::log2(h[i]));
    ly.push_back(std::log2(err[i]));
    rep.window_h.push_back(h[i]);
  }
  if (lx.size() < 4) {
    throw DomainError("convergence_slope: " + std::to_string(lx.size()) +
                      " rows above the 1e-13 floor, at least 4 are needed");
  }
  const auto n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw DomainError("convergence_slope: all retained rows share one h");
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (rep.intercept + rep.slope * lx[i]);
    ss += r * r;
  }
  rep.residual = std::sqrt(ss / n);
  rep.expected = 0.5 * (lo + hi);
  rep.lo = lo;
  rep.hi = hi;
  rep.pass = rep.slope >= lo && rep.slope <= hi;
  return rep;
}

SlopeReport convergence_slope(const ErrorTable& table, ErrorColumn column, double lo, double hi) {
  std::vector<double> h, e;
  for (const auto& r : table.rows) {
    h.push_back(r.h);
    e.push_back(column == ErrorColumn::Metric ? r.err_metric : r.err_testfn_max);
  }
  return convergence_slope(h, e, lo, hi);
}

LocalErrors local_errors(const MethodSpec& spec, const CoefficientField& v, const Point& x0, double h,
                         const std::vector<ScalarField>& suite) {
  if (!(h > 0.0)) throw DomainError("local_errors: h must be positive");
  const Point exact = reference_flow(v, x0, h);
  const Point approx = step(v, x0, h, spec);
  LocalErrors out;
  out.err_metric = geodesic_distance(exact, approx);
  for (const auto& f : suite) out.err_testfn.push_back(std::abs(f.value(approx) - f.value(exact)));
  return out;
}

double global_error(const MethodSpec& spec, const CoefficientField& v, const Point& x0, double t_end, int n) {
  if (n < 1) throw DomainError("global_error: need at least one step");
  if (t_end == 0.0) return 0.0;
  const Trajectory tr = integrate(spec, v, x0, uniform_grid(0.0, t_end, n));
  return geodesic_distance(reference_flow(v, x0, t_end), tr.points.back());
}

// ---------------------------------------------------------------------------

double p_alpha(const Vector& x, unsigned alpha) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += ((alpha >> i) & 1u) ? -x(i) : x(i);
  return s;
}

double smooth_cutoff(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double u3 = u * u * u;
  const double poly = 462.0 + u * (-1980.0 + u * (3465.0 + u * (-3080.0 + u * (1386.0 - 252.0 * u))));
  return 1.0 - u3 * u3 * poly;
}

ComparisonFamily::ComparisonFamily(SpaceDescriptor space, double epsilon, std::uint64_t seed, int samples)
    : space_(space), epsilon_(epsilon), dim_(space.tangent_dim()) {
  if (!(epsilon > 0.0) || epsilon > std::numbers::pi / 4) {
    throw DomainError("ComparisonFamily: epsilon must lie in (0, pi/4] so the 2 epsilon-ball stays in the chart");
  }
  if (dim_ > 20) throw SizeGuardError("ComparisonFamily: tangent dimension too large for 2^dim members");
  if (samples < 1) throw DomainError("ComparisonFamily: need at least one Lipschitz sample");
  if (space_.model() == Model::Sphere) {
    chord_inner_ = 4.0 * std::pow(std::sin(0.5 * epsilon), 2);
    chord_outer_ = 4.0 * std::pow(std::sin(epsilon), 2);
  } else {
    // ‖Y - I‖² <= d(Y, I)², and on the sphere d = 2 epsilon the chord is at
    // least its value for a single rotation plane.
    chord_inner_ = epsilon * epsilon;
    chord_outer_ = 8.0 * std::pow(std::sin(epsilon / std::numbers::sqrt2), 2);
  }

  Rng rng(seed);
  const Point o = Point::base(space_);
  auto ball_sample = [&](bool boundary) {
    Vector dir(dim_);
    for (int i = 0; i < dim_; ++i) dir(i) = rng.normal();
    const double r = boundary ? epsilon : epsilon * std::pow(rng.uniform(), 1.0 / dim_);
    return exp_at_base(space_, dir.normalized() * r);
  };
  double worst = 0.0;
  auto consider = [&](const Point& a, const Point& b) {
    const double denom = (chart(a) - chart(b)).lpNorm<1>();
    if (denom > 1e-12) worst = std::max(worst, geodesic_distance(a, b) / denom);
  };
  for (int k = 0; k < samples; ++k) {
    const Point x = ball_sample(k % 8 == 0);
    const Point y = ball_sample(k % 8 == 1);
    consider(x, o);
    consider(x, y);
  }
  lipschitz_ = 1.05 * worst;
}

Vector ComparisonFamily::chart(const Point& x) const {
  if (!(x.space() == space_)) throw DomainError("ComparisonFamily: point lives on another space");
  const Matrix& c = x.coords();
  const int n = space_.n();
  Vector out(dim_);
  if (space_.model() == Model::Sphere) {
    for (int i = 0; i < n - 1; ++i) out(i) = c(i, 0);
    return out;
  }
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) out(k++) = (c(i, j) - c(j, i)) / std::numbers::sqrt2;
  }
  return out;
}

double ComparisonFamily::cutoff(const Point& x) const {
  const double chord2 = (x.coords() - space_.base_point()).squaredNorm();
  return smooth_cutoff((chord2 - chord_inner_) / (chord_outer_ - chord_inner_));
}

double ComparisonFamily::member(int index, const Point& x) const {
  if (index < 0 || index >= size()) throw DomainError("ComparisonFamily: member index out of range");
  const double xi = cutoff(x);
  if (xi == 0.0) return 0.0;
  return lipschitz_ * xi * p_alpha(chart(x), static_cast<unsigned>(index));
}

double ComparisonFamily::max_member(const Point& x) const {
  double best = member(0, x);
  for (int i = 1; i < size(); ++i) best = std::max(best, member(i, x));
  return best;
}

MechanismReport mechanism_check(const MethodSpec& spec, const CoefficientField& v, const Point& x0, double h,
                                         const ComparisonFamily& family, int grid) {
  if (!(h > 0.0)) throw DomainError("mechanism check: h must be positive");
  if (grid < 1) throw DomainError("mechanism check: grid must have at least one interval");
  if (!(family.space() == x0.space())) throw DomainError("mechanism check: family lives on another space");
  MechanismReport rep;
  rep.h = h;
  std::vector<Point> exact{x0};
  std::vector<Point> approx{x0};
  rep.t.push_back(0.0);
  for (int k = 1; k <= grid; ++k) {
    const double t = h * k / grid;
    exact.push_back(reference_flow(v, exact.back(), t - rep.t.back()));
    approx.push_back(step(v, x0, t, spec));
    rep.t.push_back(t);
  }
  const std::vector<GroupElement> lifts = lift_curve(exact);
  const Point o = Point::base(x0.space());
  rep.invariance_pass = true;
  rep.domination_pass = true;
  double sup = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const double d = geodesic_distance(approx[k], exact[k]);
    if (d >= family.epsilon()) {
      throw DomainError("mechanism check: error " + std::to_string(d) + " leaves the epsilon-ball at t = " +
                        std::to_string(rep.t[k]) + "; use a smaller h");
    }
    const Point shifted = act(lifts[k].transpose(), approx[k]);
    const double ds = geodesic_distance(shifted, o);
    const double w = family.max_member(shifted);
    rep.distance.push_back(d);
    rep.shifted_distance.push_back(ds);
    rep.comparison.push_back(w);
    rep.invariance_defect = std::max(rep.invariance_defect, std::abs(d - ds));
    // Rounding in the distance and chart evaluations is of order 1e-16.
    if (w < d - 1e-14) rep.domination_pass = false;
    sup = std::max(sup, w);
  }
  rep.invariance_pass = rep.invariance_defect <= 1e-10;
  rep.ratio = sup / std::pow(h, spec.order + 1);
  return rep;
}

MechanismLadder mechanism_ladder(const MethodSpec& spec, const CoefficientField& v, const Point& x0,
                                 const std::vector<double>& hs, const ComparisonFamily& family, int grid) {
  if (hs.size() < 2) throw DomainError("mechanism ladder: need at least two step sizes");
  MechanismLadder out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool all = true;
  for (double h : hs) {
    out.reports.push_back(mechanism_check(spec, v, x0, h, family, grid));
    lo = std::min(lo, out.reports.back().ratio);
    hi = std::max(hi, out.reports.back().ratio);
    all = all && out.reports.back().pass();
  }
  out.ratio_spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  out.bounded_pass = out.ratio_spread < 10.0;
  out.pass = all && out.bounded_pass;
  return out;
}

// ---------------------------------------------------------------------------

ErrorTable local_error_table(const MethodSpec& spec, const CoefficientField& v, const Point& x0,
                             const std::vector<double>& hs, const std::vector<ScalarField>& suite,
                             const LocalTableOptions& options) {
  ErrorTable table;
  table.problem = v.name();
  table.method = spec.id;
  std::optional<ComparisonFamily> family;
  if (options.comparison_epsilon > 0.0) {
    family.emplace(v.space(), options.comparison_epsilon);
    table.aux_names = {"comparison_max", "comparison_ratio"};
  }
  table.rows.resize(hs.size());
  parallel_for(hs.size(), options.threads, [&](std::size_t i) {
    const double h = hs[i];
    if (!(h > 0.0)) throw DomainError("local_error_table: h must be positive");
    const Point exact = reference_flow(v, x0, h);
    const Point approx = step(v, x0, h, spec);
    ErrorRow& row = table.rows[i];
    row.h = h;
    row.err_metric = geodesic_distance(exact, approx);
    for (const auto& f : suite) {
      row.err_testfn_max = std::max(row.err_testfn_max, std::abs(f.value(approx) - f.value(exact)));
    }
    if (family) {
      // Comparison functions centred at y(h): g_n = f_n ∘ (lift of y(h))^{-1}, with g_n(y(h)) = 0.
      const Point shifted = act(lift_to_group(exact).transpose(), approx);
      const double w = family->max_member(shifted);
      row.aux = {w, w > 0.0 ? row.err_metric / w : 0.0};
    }
  });
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const ErrorRow& a, const ErrorRow& b) { return a.h > b.h; });
  table.validate();
  return table;
}

ErrorTable global_error_table(const MethodSpec& spec, const CoefficientField& v, const Point& x0, double t_end,
                              const std::vector<int>& ns, int threads) {
  if (!(t_end > 0.0)) throw DomainError("global_error_table: T must be positive");
  ErrorTable table;
  table.problem = v.name();
  table.method = spec.id;
  table.aux_names = {"n"};
  const Point exact = reference_flow(v, x0, t_end);
  table.rows.resize(ns.size());
  parallel_for(ns.size(), threads, [&](std::size_t i) {
    const int n = ns[i];
    if (n < 1) throw DomainError("global_error_table: n must be positive");
    const Trajectory tr = integrate(spec, v, x0, uniform_grid(0.0, t_end, n));
    ErrorRow& row = table.rows[i];
    row.h = t_end / n;
    row.err_metric = geodesic_distance(exact, tr.points.back());
    row.aux = {static_cast<double>(n)};
  });
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const ErrorRow& a, const ErrorRow& b) { return a.h > b.h; });
  table.validate();
  return table;
}

// ---------------------------------------------------------------------------

namespace {

struct FlowSample {
  Point end;
  double max_norm;
};

// Flows x over [0, t] in `pieces` equal reference segments and records the
// largest covariant-derivative norm seen at the nodes.
FlowSample flow_with_norms(const CoefficientField& v, const Point& x, double t, int pieces,
                           std::vector<Point>* nodes = nullptr) {
  Point y = x;
  double best = operator_norm(covariant_derivative_operator(v, y));
  if (nodes) nodes->push_back(y);
  for (int j = 1; j <= pieces; ++j) {
    y = reference_flow(v, y, t / pieces);
    best = std::max(best, operator_norm(covariant_derivative_operator(v, y)));
    if (nodes) nodes->push_back(y);
  }
  return {y, best};
}

GronwallReport gronwall_impl(const CoefficientField& v, const Point& p0, const Point& q0, double t_end,
                             int resolution, bool check) {
  if (resolution < 1) throw DomainError("gronwall: resolution must be positive");
  if (!(t_end >= 0.0)) throw DomainError("gronwall: T must be nonnegative");
  GronwallReport rep;
  rep.s_resolution = resolution;
  rep.t_resolution = resolution;
  std::vector<Point> p_nodes, q_nodes;
  for (int i = 0; i <= resolution; ++i) {
    const Point s = geodesic_point(p0, q0, static_cast<double>(i) / resolution);
    std::vector<Point>* nodes = (i == 0) ? &p_nodes : (i == resolution ? &q_nodes : nullptr);
    rep.c_t = std::max(rep.c_t, flow_with_norms(v, s, t_end, resolution, nodes).max_norm);
  }
  if (!check) return rep;
  const double d0 = geodesic_distance(p0, q0);
  if (d0 == 0.0) throw DomainError("gronwall_check: the two initial points coincide");
  const double c = kGronwallInflation * rep.c_t;
  rep.pass = true;
  for (int j = 0; j <= resolution; ++j) {
    const double t = t_end * j / resolution;
    const double r = geodesic_distance(p_nodes[static_cast<std::size_t>(j)], q_nodes[static_cast<std::size_t>(j)]) /
                     (d0 * std::exp(c * t));
    rep.t.push_back(t);
    rep.ratio.push_back(r);
    rep.max_ratio = std::max(rep.max_ratio, r);
  }
  rep.pass = rep.max_ratio <= 1.0;
  return rep;
}

}  // namespace

GronwallReport gronwall_constant(const CoefficientField& v, const Point& p0, const Point& q0, double t_end,
                                 int resolution) {
  return gronwall_impl(v, p0, q0, t_end, resolution, false);
}

GronwallReport gronwall_check(const CoefficientField& v, const Point& p0, const Point& q0, double t_end,
                              int resolution) {
  return gronwall_impl(v, p0, q0, t_end, resolution, true);
}

FanReport windermere_decomposition(const MethodSpec& spec, const CoefficientField& v, const Point& x0,
                                   const std::vector<double>& grid, int threads) {
  const Trajectory tr = integrate(spec, v, x0, grid);
  const std::size_t n = grid.size() - 1;
  const double t_end = grid.back();
  const double span = t_end - grid.front();
  FanReport rep;
  rep.times = grid;
  rep.e.resize(n);
  rep.big_e.resize(n);
  rep.horizon.resize(n);

  // transported[i] = flow_{T - t_i}(ŷ_i); the last one is ŷ_n itself.
  std::vector<Point> transported(n + 1, x0);
  std::vector<double> norms(n + 1, 0.0);
  std::vector<double> local_norms(n + 1, 0.0);
  auto pieces_for = [&](double horizon) { return std::max(1, static_cast<int>(std::ceil(16.0 * horizon / span))); };
  parallel_for(n + 1, threads, [&](std::size_t i) {
    const double horizon = t_end - grid[i];
    const FlowSample s = flow_with_norms(v, tr.points[i], horizon, pieces_for(horizon));
    transported[i] = s.end;
    norms[i] = s.max_norm;
    if (i == 0) return;
    // Local error against the exact step from ŷ_{i-1}, and the flow of the
    // midpoint of the short geodesic between the two.
    const double h = grid[i] - grid[i - 1];
    const Point exact_step = reference_flow(v, tr.points[i - 1], h);
    rep.e[i - 1] = geodesic_distance(tr.points[i], exact_step);
    rep.horizon[i - 1] = horizon;
    const Point mid = geodesic_point(exact_step, tr.points[i], 0.5);
    const double m1 = flow_with_norms(v, exact_step, horizon, pieces_for(horizon)).max_norm;
    const double m2 = flow_with_norms(v, mid, horizon, pieces_for(horizon)).max_norm;
    local_norms[i] = std::max(m1, m2);
  });
  for (std::size_t i = 0; i <= n; ++i) rep.c_t = std::max({rep.c_t, norms[i], local_norms[i]});

  double h_max = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    rep.big_e[i - 1] = geodesic_distance(transported[i], transported[i - 1]);
    rep.sum_big_e += rep.big_e[i - 1];
    const double h = grid[i] - grid[i - 1];
    h_max = std::max(h_max, h);
    rep.local_constant = std::max(rep.local_constant, rep.e[i - 1] / std::pow(h, spec.order + 1));
  }
  rep.global_error = geodesic_distance(transported[0], tr.points.back());

  // A comparison whose left-hand side is below kErrorFloor only compares
  // rounding noise and is not counted as a violation.
  auto noise = [](double lhs) { return lhs < kErrorFloor; };
  rep.transport_pass = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double bound = std::exp(rep.c_t * rep.horizon[i]) * rep.e[i] * kGronwallInflation;
    if (rep.big_e[i] > bound && !noise(rep.big_e[i])) rep.transport_pass = false;
  }
  rep.triangle_pass = rep.global_error <= rep.sum_big_e * (1.0 + 1e-9) || noise(rep.global_error);
  const double growth = rep.c_t > 0.0 ? std::expm1(rep.c_t * span) / rep.c_t : span;
  rep.fan_bound = rep.local_constant * growth * std::pow(h_max, spec.order);
  rep.bound_pass = rep.sum_big_e <= rep.fan_bound * 1.05 || noise(rep.sum_big_e);
  return rep;
}

}  // namespace homflow
