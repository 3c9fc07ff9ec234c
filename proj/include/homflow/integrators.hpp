#pragma once

// Lie group integrators acting through the group action: Runge-Kutta
// Munthe-Kaas (RKMK) steps driven by a Butcher tableau, commutator-free
// steps built from compositions of exponentials, and a refined reference
// flow used as ground truth by the error analysis.

#include <string>
#include <vector>

#include "homflow/fields.hpp"

namespace homflow {

struct ButcherTableau {
  std::string name;
  Matrix a;  // strictly lower triangular for explicit schemes
  Vector b;
  Vector c;
  int order = 0;

  static ButcherTableau explicit_euler();
  static ButcherTableau classical_rk4();
  /// Row sums equal c and weights sum to one (1e-14); explicit.
  void validate() const;
};

/// Each stage point is y transported by a product of exponentials; each
/// exponential is exp(h * sum_j w_j F_j) with F_j the coefficient at earlier
/// stage points. Exponentials in a list are applied in order, first to y.
struct CommutatorFreeScheme {
  std::string name;
  std::vector<std::vector<std::vector<double>>> stages;
  std::vector<std::vector<double>> update;
  int order = 0;

  static CommutatorFreeScheme cf4();
  void validate() const;
};

enum class MethodKind { LieEuler, Rkmk, CommutatorFree };

struct MethodSpec {
  std::string id;
  MethodKind kind = MethodKind::Rkmk;
  int order = 0;
  ButcherTableau tableau;
  int dexpinv_order = 0;
  CommutatorFreeScheme scheme;

  /// "lie-euler", "rkmk4" or "cf4"; DomainError otherwise.
  static MethodSpec from_id(const std::string& id);
  static std::vector<std::string> known_ids();
  /// Consistency of the tableau / scheme and dexpinv_order >= order - 2.
  void validate() const;
};

struct Trajectory {
  std::string method;
  std::vector<double> times;
  std::vector<Point> points;
};

Point rkmk_step(const CoefficientField& v, const Point& x, double h, const MethodSpec& spec);
Point commutator_free_step(const CoefficientField& v, const Point& x, double h, const MethodSpec& spec);
/// Dispatches on spec.kind.
Point step(const CoefficientField& v, const Point& x, double h, const MethodSpec& spec);

/// n equal steps from t0 to t1 (n + 1 nodes, last node exactly t1).
std::vector<double> uniform_grid(double t0, double t1, int n);

/// Throws DomainError unless the grid is strictly increasing with >= 2 nodes.
Trajectory integrate(const MethodSpec& spec, const CoefficientField& v, const Point& x0,
                     const std::vector<double>& grid);

inline constexpr double kReferenceTolerance = 1e-12;

/// Exact flow for constant fields; otherwise RKMK4 with repeated step
/// doubling until two successive solutions differ by less than tol / 4.
/// The finer of the two is returned. Throws DomainError for tol < 1e-13 and
/// ConvergenceError if more than 2^22 steps would be needed.
Point reference_flow(const CoefficientField& v, const Point& x0, double t, double tol = kReferenceTolerance);

}  // namespace homflow
