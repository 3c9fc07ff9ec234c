#pragma once

// Vector fields in coefficient form V(x) = coeff(x) · x with coeff: M -> so(n),
// and smooth scalar test functions. Both carry an exact Taylor expansion in
// ambient coordinates (see jet.hpp), which is where every derivative used by
// the library comes from.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "homflow/homogeneous_space.hpp"
#include "homflow/jet.hpp"

namespace homflow {

class CoefficientField {
 public:
  using ValueFn = std::function<AlgebraElement(const Matrix& coords)>;
  /// Taylor expansion of coeff at `coords` over `basis`, truncated at `degree`.
  using TaylorFn = std::function<JetMatrix(const Matrix& coords, const Jet::BasisPtr& basis, int degree)>;

  /// `value` may be empty, in which case values come from the degree-0 expansion.
  CoefficientField(SpaceDescriptor space, std::string name, ValueFn value, TaylorFn taylor,
                   int regularity, int taylor_depth = 0);

  /// Builds both evaluation paths from one generic callable
  /// `f(const Eigen::Matrix<T, -1, -1>&) -> Eigen::Matrix<T, -1, -1>`.
  template <class F>
  static CoefficientField from_generic(SpaceDescriptor space, std::string name, F f, int regularity) {
    ValueFn value = [f](const Matrix& c) -> AlgebraElement { return f(c); };
    TaylorFn taylor = [f](const Matrix& c, const Jet::BasisPtr& basis, int degree) -> JetMatrix {
      return f(identity_jet(c, basis, degree));
    };
    return CoefficientField(space, std::move(name), std::move(value), std::move(taylor), regularity);
  }

  static CoefficientField constant(SpaceDescriptor space, const AlgebraElement& xi,
                                   std::string name = "constant");

  const SpaceDescriptor& space() const { return space_; }
  const std::string& name() const { return name_; }
  /// Number of derivatives the field is declared to have (C^k).
  int regularity() const { return regularity_; }
  /// Extra Taylor degrees needed internally beyond the requested one.
  int taylor_depth() const { return taylor_depth_; }
  const std::optional<AlgebraElement>& constant_value() const { return constant_; }

  AlgebraElement coeff(const Point& x) const;
  /// Exact directional derivative of coeff at x along an ambient tangent vector.
  AlgebraElement coeff_dirderiv(const Point& x, const Matrix& tangent) const;
  /// Ambient value of the vector field, coeff(x) · x.
  Matrix vector(const Point& x) const;

  JetMatrix taylor(const Matrix& coords, const Jet::BasisPtr& basis, int degree) const;
  /// Expansion over a basis sized for `degree` plus this field's depth.
  JetMatrix taylor(const Point& x, int degree) const;

  CoefficientField operator+(const CoefficientField& o) const;
  CoefficientField operator-(const CoefficientField& o) const;
  CoefficientField scaled(double s) const;

 private:
  SpaceDescriptor space_;
  std::string name_;
  ValueFn value_;
  TaylorFn taylor_;
  int regularity_;
  int taylor_depth_;
  std::optional<AlgebraElement> constant_;
};

/// Ambient vector-field jet W(z) = C(z) · z at the expansion point.
JetMatrix vector_jet(const JetMatrix& coeff, const Matrix& coords, const Jet::BasisPtr& basis, int degree);

/// Lie derivative of a scalar jet along an ambient vector-field jet:
/// sum_v d_v g · W_v.
Jet lie_derivative(const JetMatrix& w, const Jet& g);

class ScalarField {
 public:
  using ValueFn = std::function<double(const Matrix& coords)>;
  using TaylorFn = std::function<Jet(const Matrix& coords, const Jet::BasisPtr& basis, int degree)>;

  ScalarField(SpaceDescriptor space, std::string name, ValueFn value, TaylorFn taylor,
              int derivative_depth);

  template <class F>
  static ScalarField from_generic(SpaceDescriptor space, std::string name, F f, int derivative_depth) {
    ValueFn value = [f](const Matrix& c) { return f(c); };
    TaylorFn taylor = [f](const Matrix& c, const Jet::BasisPtr& basis, int degree) -> Jet {
      return f(identity_jet(c, basis, degree));
    };
    return ScalarField(space, std::move(name), std::move(value), std::move(taylor), derivative_depth);
  }

  const SpaceDescriptor& space() const { return space_; }
  const std::string& name() const { return name_; }
  /// Highest total derivative order the field exposes exactly.
  int derivative_depth() const { return derivative_depth_; }

  double value(const Point& x) const;
  /// Exact ambient gradient (same shape as the coordinates).
  Matrix gradient(const Point& x) const;
  Jet taylor(const Matrix& coords, const Jet::BasisPtr& basis, int degree) const;

 private:
  SpaceDescriptor space_;
  std::string name_;
  ValueFn value_;
  TaylorFn taylor_;
  int derivative_depth_;
};

/// Matrix of Y -> ∇_Y V (Levi-Civita) in the orthonormal basis tangent_basis(x).
Matrix covariant_derivative_operator(const CoefficientField& v, const Point& x);

// ---------------------------------------------------------------------------
// Problem catalog

struct FieldParams {
  Eigen::Vector3d vector{0.0, 0.0, 1.0};
  double epsilon = 0.0;
};

/// Default parameters of a catalog family.
FieldParams default_field_params(const std::string& family);

/// Catalog families (all on 3-dimensional models):
///   "a": coeff ≡ hat(vector), any model with n = 3 (closed-form flow)
///   "b": sphere:3, coeff(x) = hat(vector + ε (x₂², sin x₃, x₁x₂))
///   "c": group:3,  coeff(Y) = hat(vector + ε (Y₁₂, Y₂₃², Y₃₁))
/// Throws DomainError for an unknown family or a model it is not defined on.
CoefficientField sample_field(const SpaceDescriptor& space, const std::string& family,
                              const FieldParams& params);
CoefficientField sample_field(const SpaceDescriptor& space, const std::string& family);

/// Declared regularity of catalog fields (they are smooth; C^k tag for k = 5).
inline constexpr int kCatalogRegularity = 5;
/// Exact derivative depth shipped by catalog scalar fields.
inline constexpr int kCatalogDerivativeDepth = 4;

/// At least five non-constant smooth test functions on the given model.
std::vector<ScalarField> test_function_suite(const SpaceDescriptor& space);

/// f(x) = x_{index} on the sphere (component of the coordinate vector);
/// f(Y) = Y_{row, col} on the group.
ScalarField coordinate_function(const SpaceDescriptor& space, int row, int col = 0);
ScalarField constant_function(const SpaceDescriptor& space, double value);

}  // namespace homflow
