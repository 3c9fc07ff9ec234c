#pragma once

// Executable error estimates: local errors against the reference flow,
// convergence slopes, the Gronwall stability bound, the fan decomposition
// of the global error, and the comparison-function mechanism that turns
// test-function estimates into metric ones.

#include <cstdint>
#include <string>
#include <vector>

#include "homflow/integrators.hpp"

namespace homflow {

inline constexpr double kErrorFloor = 1e-13;

struct ErrorRow {
  double h = 0.0;
  double err_metric = 0.0;
  double err_testfn_max = 0.0;
  std::vector<double> aux;  // one value per ErrorTable::aux_names entry
};

struct ErrorTable {
  std::string problem;
  std::string method;
  std::vector<std::string> aux_names;
  std::vector<ErrorRow> rows;

  /// h strictly decreasing, errors finite and nonnegative, aux widths match.
  void validate() const;
};

enum class ErrorColumn { Metric, TestFunctionMax };

struct SlopeReport {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root mean square of the log2 residuals of the fit.
  double residual = 0.0;
  /// Retained rows: those with error >= kErrorFloor.
  std::vector<double> window_h;
  double expected = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

/// Least-squares slope of log err against log h over rows with
/// err >= 1e-13. Throws DomainError with fewer than 4 usable rows. The
/// verdict is lo <= slope <= hi.
SlopeReport convergence_slope(const std::vector<double>& h, const std::vector<double>& err, double lo, double hi);
SlopeReport convergence_slope(const ErrorTable& table, ErrorColumn column, double lo, double hi);

struct LocalErrors {
  double err_metric = 0.0;
  std::vector<double> err_testfn;
};

/// One step of size h from x0 compared with the reference flow.
LocalErrors local_errors(const MethodSpec& spec, const CoefficientField& v, const Point& x0, double h,
                         const std::vector<ScalarField>& suite);

/// d(flow_T(x0), last point of n uniform steps).
double global_error(const MethodSpec& spec, const CoefficientField& v, const Point& x0, double t_end, int n);

// ---------------------------------------------------------------------------
// Comparison functions near the base point

/// Sum of the entries with signs picked by the bits of alpha (bit i set: -x_i).
/// The maximum over all alpha is the 1-norm of x.
double p_alpha(const Vector& x, unsigned alpha);

/// C^5 transition: 1 for u <= 0, 0 for u >= 1.
double smooth_cutoff(double u);

class ComparisonFamily {
 public:
  /// Throws DomainError unless 0 < epsilon <= pi/4.
  ComparisonFamily(SpaceDescriptor space, double epsilon, std::uint64_t seed = 20240601, int samples = 4000);

  const SpaceDescriptor& space() const { return space_; }
  double epsilon() const { return epsilon_; }
  double lipschitz() const { return lipschitz_; }
  /// 2^dim members.
  int size() const { return 1 << dim_; }

  /// Coordinates at the base point: sphere, first n-1 entries; group,
  /// (Y_ij - Y_ji)/sqrt(2) for i < j.
  Vector chart(const Point& x) const;
  /// 1 on the epsilon-ball around o, 0 outside the 2 epsilon-ball.
  double cutoff(const Point& x) const;
  double member(int index, const Point& x) const;
  double max_member(const Point& x) const;

 private:
  SpaceDescriptor space_;
  double epsilon_;
  int dim_;
  double lipschitz_ = 0.0;
  double chord_inner_ = 0.0;  // squared chord length where the cutoff starts to fall
  double chord_outer_ = 0.0;  // ... and where it reaches zero
};

struct MechanismReport {
  double h = 0.0;
  std::vector<double> t;
  std::vector<double> distance;          // d(ŷ(t), y(t))
  std::vector<double> shifted_distance;  // d(shifted ŷ(t), o)
  std::vector<double> comparison;        // max_n of the comparison family at the shifted point
  double invariance_defect = 0.0;
  bool invariance_pass = false;
  bool domination_pass = false;
  /// sup_t max_n comparison / h^{p+1}
  double ratio = 0.0;
  bool pass() const { return invariance_pass && domination_pass; }
};

/// Lifts the reference solution over [0, h], shifts the method's one-step
/// approximation back to o and evaluates the comparison family there.
/// Throws DomainError if the error leaves the epsilon-ball (use a smaller h).
MechanismReport mechanism_check(const MethodSpec& spec, const CoefficientField& v, const Point& x0, double h,
                                         const ComparisonFamily& family, int grid = 16);

struct MechanismLadder {
  std::vector<MechanismReport> reports;
  double ratio_spread = 0.0;  // max ratio / min ratio
  bool bounded_pass = false;  // spread < 10
  bool pass = false;
};

MechanismLadder mechanism_ladder(const MethodSpec& spec, const CoefficientField& v, const Point& x0,
                                 const std::vector<double>& hs, const ComparisonFamily& family, int grid = 16);

// ---------------------------------------------------------------------------
// Tables

struct LocalTableOptions {
  int threads = 0;
  /// Adds aux columns comparing the metric error with the comparison family
  /// centred at y(h) and used as test functions. 0 disables.
  double comparison_epsilon = 0.3;
};

ErrorTable local_error_table(const MethodSpec& spec, const CoefficientField& v, const Point& x0,
                             const std::vector<double>& hs, const std::vector<ScalarField>& suite,
                             const LocalTableOptions& options = {});

/// Rows for each n, with h = T / n.
ErrorTable global_error_table(const MethodSpec& spec, const CoefficientField& v, const Point& x0, double t_end,
                              const std::vector<int>& ns, int threads = 0);

// ---------------------------------------------------------------------------
// Stability

struct GronwallReport {
  double c_t = 0.0;
  int s_resolution = 0;
  int t_resolution = 0;
  std::vector<double> t;
  std::vector<double> ratio;  // d(flow p0, flow q0) / (d(p0, q0) exp(1.02 C_T t))
  double max_ratio = 0.0;
  bool pass = false;
};

inline constexpr double kGronwallInflation = 1.02;

/// Sup of the covariant-derivative operator norm over the flow of a
/// minimizing geodesic from p0 to q0, sampled on (resolution + 1)^2 points.
GronwallReport gronwall_constant(const CoefficientField& v, const Point& p0, const Point& q0, double t_end,
                                 int resolution = 16);
/// Also flows p0 and q0 and checks the exponential bound with C_T inflated by 2%.
GronwallReport gronwall_check(const CoefficientField& v, const Point& p0, const Point& q0, double t_end,
                              int resolution = 16);

struct FanReport {
  std::vector<double> times;
  std::vector<double> e;        // e_i, i = 1..n (index i - 1)
  std::vector<double> big_e;    // E_i
  std::vector<double> horizon;  // T_i = T - t_i
  double sum_big_e = 0.0;
  double global_error = 0.0;
  double c_t = 0.0;
  double local_constant = 0.0;  // max_i e_i / h_i^{p+1}
  double fan_bound = 0.0;       // local_constant (e^{C_T T} - 1) / C_T h^p
  bool transport_pass = false;
  bool triangle_pass = false;
  bool bound_pass = false;
  bool pass() const { return transport_pass && triangle_pass && bound_pass; }
};

/// Decomposes the global error of `integrate` on the grid into local errors
/// transported to the final time by the exact flow. `h` in the closing bound
/// is the largest step.
FanReport windermere_decomposition(const MethodSpec& spec, const CoefficientField& v, const Point& x0,
                                   const std::vector<double>& grid, int threads = 0);

}  // namespace homflow
