#pragma once

// Truncated multivariate Taylor polynomials ("jets").
//
// A Jet holds the Taylor coefficients of a function of `nvars` perturbation
// variables up to a total degree. Arithmetic truncates at the smaller of the
// operand degrees and differentiation lowers the degree by one, so the degree
// of a result tracks exactly how many derivatives remain trustworthy.
//
// A Jet without a basis is a plain constant; it mixes freely with jets of any
// basis. This is what lets Eigen zero-initialise Jet matrices.

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

namespace homflow {

class MonomialBasis {
 public:
  MonomialBasis(int nvars, int max_degree);

  int nvars() const { return nvars_; }
  int max_degree() const { return max_degree_; }
  int size() const { return static_cast<int>(degree_.size()); }
  /// Number of monomials with total degree <= d.
  int count_up_to(int d) const { return degree_offset_[static_cast<std::size_t>(d) + 1]; }
  int degree(int m) const { return degree_[static_cast<std::size_t>(m)]; }
  /// Index of the monomial z_v (degree one).
  int linear_index(int v) const { return 1 + v; }
  const std::vector<int>& exponents(int m) const { return exponents_[static_cast<std::size_t>(m)]; }

  struct Product {
    int lhs, rhs, out;
  };
  struct DerivativeTerm {
    int src, dst;
    double factor;
  };
  /// Products ordered by output degree; the first product_end(d) entries are
  /// exactly those with output degree <= d.
  const std::vector<Product>& products() const { return products_; }
  std::size_t product_end(int d) const { return product_end_[static_cast<std::size_t>(d)]; }
  const std::vector<DerivativeTerm>& derivative_terms(int v) const {
    return derivative_[static_cast<std::size_t>(v)];
  }

  /// Shared, immutable basis for (nvars, max_degree). Thread-safe.
  static std::shared_ptr<const MonomialBasis> get(int nvars, int max_degree);

 private:
  int nvars_;
  int max_degree_;
  std::vector<std::vector<int>> exponents_;
  std::vector<int> degree_;
  std::vector<int> degree_offset_;
  std::vector<Product> products_;
  std::vector<std::size_t> product_end_;
  std::vector<std::vector<DerivativeTerm>> derivative_;
};

class Jet {
 public:
  using BasisPtr = std::shared_ptr<const MonomialBasis>;
  static constexpr int kUnbounded = 1 << 20;

  Jet() = default;
  Jet(double value) : constant_(value) {}  // NOLINT(implicit)
  Jet(BasisPtr basis, int degree);

  static Jet variable(const BasisPtr& basis, int degree, double value, int var);

  bool is_constant() const { return basis_ == nullptr; }
  const BasisPtr& basis() const { return basis_; }
  /// Truncation degree; kUnbounded for plain constants.
  int degree() const { return basis_ ? degree_ : kUnbounded; }
  double value() const { return basis_ ? coeffs_[0] : constant_; }
  /// Coefficient of monomial m (Taylor coefficient, not derivative).
  double coeff(int m) const;
  /// d/dz_v at the expansion point.
  double partial(int v) const;

  Jet derivative(int var) const;
  Jet truncated(int degree) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator*=(double s);
  Jet operator-() const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(Jet a, double s) { return a *= (1.0 / s); }

  // Comparisons look at the value only (used by Eigen internals).
  friend bool operator==(const Jet& a, const Jet& b) { return a.value() == b.value(); }
  friend bool operator!=(const Jet& a, const Jet& b) { return a.value() != b.value(); }
  friend bool operator<(const Jet& a, const Jet& b) { return a.value() < b.value(); }
  friend bool operator>(const Jet& a, const Jet& b) { return a.value() > b.value(); }

 private:
  void promote_like(const Jet& o);

  BasisPtr basis_;
  int degree_ = 0;
  double constant_ = 0.0;
  std::vector<double> coeffs_;
};

Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet exp(const Jet& x);
Jet abs(const Jet& x);

using JetMatrix = Eigen::Matrix<Jet, Eigen::Dynamic, Eigen::Dynamic>;

/// Jet matrix of `x + dz`, one perturbation variable per entry of x in
/// column-major order, truncated at `degree` (basis degree >= degree).
JetMatrix identity_jet(const Eigen::MatrixXd& x, const Jet::BasisPtr& basis, int degree);
/// Same, over the shared basis of exactly `degree`.
JetMatrix identity_jet(const Eigen::MatrixXd& x, int degree);

/// Small dense product; avoids Eigen's blocked kernels for a non-POD scalar.
JetMatrix jet_matmul(const JetMatrix& a, const JetMatrix& b);
JetMatrix jet_matmul(const Eigen::MatrixXd& a, const JetMatrix& b);
Eigen::MatrixXd jet_values(const JetMatrix& m);
int min_degree(const JetMatrix& m);

}  // namespace homflow

namespace Eigen {
template <>
struct NumTraits<homflow::Jet> : GenericNumTraits<homflow::Jet> {
  using Real = homflow::Jet;
  using NonInteger = homflow::Jet;
  using Nested = homflow::Jet;
  using Literal = homflow::Jet;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 64,
    MulCost = 256
  };
  static inline Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline int digits10() { return std::numeric_limits<double>::digits10; }
};

template <typename BinaryOp>
struct ScalarBinaryOpTraits<homflow::Jet, double, BinaryOp> {
  using ReturnType = homflow::Jet;
};
template <typename BinaryOp>
struct ScalarBinaryOpTraits<double, homflow::Jet, BinaryOp> {
  using ReturnType = homflow::Jet;
};
}  // namespace Eigen
