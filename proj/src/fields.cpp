#include "homflow/fields.hpp"

#include <cmath>
#include <utility>

#include "homflow/errors.hpp"

namespace homflow {
namespace {

template <class T>
Eigen::Matrix<T, -1, -1> hat_generic(const T& w0, const T& w1, const T& w2) {
  Eigen::Matrix<T, -1, -1> a(3, 3);
  a(0, 0) = T(0.0);
  a(0, 1) = -w2;
  a(0, 2) = w1;
  a(1, 0) = w2;
  a(1, 1) = T(0.0);
  a(1, 2) = -w0;
  a(2, 0) = -w1;
  a(2, 1) = w0;
  a(2, 2) = T(0.0);
  return a;
}

void require_three(const SpaceDescriptor& space, const std::string& family) {
  if (space.n() != 3) {
    throw DomainError("catalog family '" + family + "' is defined for n = 3 only, got " + space.id());
  }
}

}  // namespace

CoefficientField::CoefficientField(SpaceDescriptor space, std::string name, ValueFn value,
                                   TaylorFn taylor, int regularity, int taylor_depth)
    : space_(space),
      name_(std::move(name)),
      value_(std::move(value)),
      taylor_(std::move(taylor)),
      regularity_(regularity),
      taylor_depth_(taylor_depth) {
  if (!taylor_) throw DomainError("CoefficientField: missing Taylor callback");
  if (regularity_ < 0) throw DomainError("CoefficientField: negative regularity");
}

CoefficientField CoefficientField::constant(SpaceDescriptor space, const AlgebraElement& xi, std::string name) {
  if (xi.rows() != space.n() || xi.cols() != space.n()) {
    throw DomainError("CoefficientField::constant: generator shape does not match " + space.id());
  }
  ValueFn value = [xi](const Matrix&) { return xi; };
  TaylorFn taylor = [xi](const Matrix&, const Jet::BasisPtr&, int) -> JetMatrix { return xi.cast<Jet>(); };
  CoefficientField field(space, std::move(name), std::move(value), std::move(taylor), kCatalogRegularity);
  field.constant_ = xi;
  return field;
}

AlgebraElement CoefficientField::coeff(const Point& x) const {
  if (value_) return value_(x.coords());
  return jet_values(taylor(x, 0));
}

AlgebraElement CoefficientField::coeff_dirderiv(const Point& x, const Matrix& tangent) const {
  if (tangent.rows() != x.coords().rows() || tangent.cols() != x.coords().cols()) {
    throw DomainError("coeff_dirderiv: tangent shape mismatch");
  }
  if (regularity_ < 1) throw RegularityError("coeff_dirderiv: field '" + name_ + "' has regularity 0");
  const JetMatrix c = taylor(x, 1);
  AlgebraElement d = AlgebraElement::Zero(c.rows(), c.cols());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    for (Eigen::Index v = 0; v < tangent.size(); ++v) d(i) += c(i).partial(static_cast<int>(v)) * tangent(v);
  }
  return d;
}

Matrix CoefficientField::vector(const Point& x) const { return coeff(x) * x.coords(); }

JetMatrix CoefficientField::taylor(const Matrix& coords, const Jet::BasisPtr& basis, int degree) const {
  if (degree + taylor_depth_ > basis->max_degree()) {
    throw DomainError("CoefficientField::taylor: basis degree too small for '" + name_ + "'");
  }
  return taylor_(coords, basis, degree);
}

JetMatrix CoefficientField::taylor(const Point& x, int degree) const {
  const auto basis = MonomialBasis::get(x.space().ambient_dim(), degree + taylor_depth_);
  return taylor(x.coords(), basis, degree);
}

namespace {

CoefficientField combine(const CoefficientField& a, const CoefficientField& b, double sign,
                         const std::string& op) {
  if (!(a.space() == b.space())) throw DomainError("CoefficientField: combining fields on different spaces");
  CoefficientField::ValueFn value = [a, b, sign](const Matrix& c) -> AlgebraElement {
    const Point p(a.space(), c);
    return a.coeff(p) + sign * b.coeff(p);
  };
  CoefficientField::TaylorFn taylor = [a, b, sign](const Matrix& c, const Jet::BasisPtr& basis, int degree) {
    JetMatrix ja = a.taylor(c, basis, degree);
    const JetMatrix jb = b.taylor(c, basis, degree);
    for (Eigen::Index i = 0; i < ja.size(); ++i) ja(i) += sign * jb(i);
    return ja;
  };
  CoefficientField out(a.space(), "(" + a.name() + op + b.name() + ")", std::move(value), std::move(taylor),
                       std::min(a.regularity(), b.regularity()),
                       std::max(a.taylor_depth(), b.taylor_depth()));
  return out;
}

}  // namespace

CoefficientField CoefficientField::operator+(const CoefficientField& o) const { return combine(*this, o, 1.0, "+"); }
CoefficientField CoefficientField::operator-(const CoefficientField& o) const { return combine(*this, o, -1.0, "-"); }

CoefficientField CoefficientField::scaled(double s) const {
  const CoefficientField self = *this;
  ValueFn value = [self, s](const Matrix& c) -> AlgebraElement { return s * self.coeff(Point(self.space(), c)); };
  TaylorFn taylor = [self, s](const Matrix& c, const Jet::BasisPtr& basis, int degree) {
    JetMatrix j = self.taylor(c, basis, degree);
    for (Eigen::Index i = 0; i < j.size(); ++i) j(i) *= s;
    return j;
  };
  CoefficientField out(space_, name_, std::move(value), std::move(taylor), regularity_, taylor_depth_);
  if (constant_) out.constant_ = s * *constant_;
  return out;
}

JetMatrix vector_jet(const JetMatrix& coeff, const Matrix& coords, const Jet::BasisPtr& basis, int degree) {
  return jet_matmul(coeff, identity_jet(coords, basis, degree));
}

Jet lie_derivative(const JetMatrix& w, const Jet& g) {
  if (g.is_constant()) return Jet(0.0);
  Jet out(0.0);
  for (Eigen::Index v = 0; v < w.size(); ++v) {
    if (w(v).is_constant() && w(v).value() == 0.0) continue;
    out += g.derivative(static_cast<int>(v)) * w(v);
  }
  return out;
}

ScalarField::ScalarField(SpaceDescriptor space, std::string name, ValueFn value, TaylorFn taylor,
                         int derivative_depth)
    : space_(space),
      name_(std::move(name)),
      value_(std::move(value)),
      taylor_(std::move(taylor)),
      derivative_depth_(derivative_depth) {
  if (!value_ || !taylor_) throw DomainError("ScalarField: missing callback");
}

double ScalarField::value(const Point& x) const { return value_(x.coords()); }

Matrix ScalarField::gradient(const Point& x) const {
  if (derivative_depth_ < 1) throw RegularityError("ScalarField::gradient: no derivative available");
  const auto basis = MonomialBasis::get(x.space().ambient_dim(), 1);
  const Jet j = taylor_(x.coords(), basis, 1);
  Matrix g = Matrix::Zero(x.coords().rows(), x.coords().cols());
  for (Eigen::Index v = 0; v < g.size(); ++v) g(v) = j.partial(static_cast<int>(v));
  return g;
}

Jet ScalarField::taylor(const Matrix& coords, const Jet::BasisPtr& basis, int degree) const {
  if (degree > derivative_depth_) {
    throw RegularityError("ScalarField '" + name_ + "': exact derivatives available to order " +
                          std::to_string(derivative_depth_) + ", requested " + std::to_string(degree));
  }
  return taylor_(coords, basis, degree);
}

Matrix covariant_derivative_operator(const CoefficientField& v, const Point& x) {
  if (v.regularity() < 1) throw RegularityError("covariant_derivative_operator: field has regularity 0");
  const auto basis = MonomialBasis::get(x.space().ambient_dim(), 1 + v.taylor_depth());
  const JetMatrix w = vector_jet(v.taylor(x.coords(), basis, 1), x.coords(), basis, 1);
  const std::vector<Matrix> frame = tangent_basis(x);
  const auto k = static_cast<Eigen::Index>(frame.size());
  Matrix op(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Matrix& dir = frame[static_cast<std::size_t>(j)];
    Matrix dw = Matrix::Zero(w.rows(), w.cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      for (Eigen::Index q = 0; q < dir.size(); ++q) dw(i) += w(i).partial(static_cast<int>(q)) * dir(q);
    }
    // Projection onto T_xM is implicit: the frame is tangent and orthonormal.
    for (Eigen::Index i = 0; i < k; ++i) op(i, j) = frobenius_inner(frame[static_cast<std::size_t>(i)], dw);
  }
  return op;
}

FieldParams default_field_params(const std::string& family) {
  FieldParams p;
  if (family == "a") {
    p.vector = {0.3, -0.5, 0.8};
    p.epsilon = 0.0;
  } else if (family == "b") {
    p.vector = {0.9, -1.5, 2.4};
    p.epsilon = 3.0;
  } else if (family == "c") {
    p.vector = {0.8, 1.4, -0.6};
    p.epsilon = 1.25;
  } else {
    throw DomainError("unknown field family '" + family + "'");
  }
  return p;
}

CoefficientField sample_field(const SpaceDescriptor& space, const std::string& family) {
  return sample_field(space, family, default_field_params(family));
}

CoefficientField sample_field(const SpaceDescriptor& space, const std::string& family,
                              const FieldParams& params) {
  const Eigen::Vector3d a = params.vector;
  const double eps = params.epsilon;
  if (family == "a") {
    require_three(space, family);
    return CoefficientField::constant(space, hat(a), "a");
  }
  if (family == "b") {
    if (space.model() != Model::Sphere) throw DomainError("catalog family 'b' lives on sphere:3");
    require_three(space, family);
    if (eps == 0.0) return CoefficientField::constant(space, hat(a), "b");
    auto f = [a, eps](const auto& x) {
      using T = typename std::decay_t<decltype(x)>::Scalar;
      using std::sin;
      const T w0 = a(0) + eps * (x(1, 0) * x(1, 0));
      const T w1 = a(1) + eps * sin(x(2, 0));
      const T w2 = a(2) + eps * (x(0, 0) * x(1, 0));
      return hat_generic<T>(w0, w1, w2);
    };
    return CoefficientField::from_generic(space, "b", f, kCatalogRegularity);
  }
  if (family == "c") {
    if (space.model() != Model::GroupAsSpace) throw DomainError("catalog family 'c' lives on group:3");
    require_three(space, family);
    if (eps == 0.0) return CoefficientField::constant(space, hat(a), "c");
    auto f = [a, eps](const auto& y) {
      using T = typename std::decay_t<decltype(y)>::Scalar;
      const T w0 = a(0) + eps * y(0, 1);
      const T w1 = a(1) + eps * (y(1, 2) * y(1, 2));
      const T w2 = a(2) + eps * y(2, 0);
      return hat_generic<T>(w0, w1, w2);
    };
    return CoefficientField::from_generic(space, "c", f, kCatalogRegularity);
  }
  throw DomainError("unknown field family '" + family + "'");
}

ScalarField coordinate_function(const SpaceDescriptor& space, int row, int col) {
  if (row < 0 || row >= space.ambient_rows() || col < 0 || col >= space.ambient_cols()) {
    throw DomainError("coordinate_function: index out of range");
  }
  auto f = [row, col](const auto& x) { return x(row, col); };
  return ScalarField::from_generic(space, "coord(" + std::to_string(row) + "," + std::to_string(col) + ")", f,
                                   kCatalogDerivativeDepth);
}

ScalarField constant_function(const SpaceDescriptor& space, double value) {
  ScalarField::ValueFn v = [value](const Matrix&) { return value; };
  ScalarField::TaylorFn t = [value](const Matrix&, const Jet::BasisPtr&, int) { return Jet(value); };
  return ScalarField(space, "const", std::move(v), std::move(t), kCatalogDerivativeDepth);
}

std::vector<ScalarField> test_function_suite(const SpaceDescriptor& space) {
  const int n = space.n();
  auto ix = [n](int i) { return std::min(i, n - 1); };
  std::vector<ScalarField> suite;
  constexpr int depth = kCatalogDerivativeDepth;
  if (space.model() == Model::Sphere) {
    const int i0 = ix(0), i1 = ix(1), i2 = ix(2);
    suite.push_back(coordinate_function(space, i0));
    suite.push_back(ScalarField::from_generic(space, "x2*x3", [=](const auto& x) { return x(i1, 0) * x(i2, 0); }, depth));
    suite.push_back(ScalarField::from_generic(space, "sin(x1+2x2)", [=](const auto& x) {
      using std::sin;
      return sin(x(i0, 0) + 2.0 * x(i1, 0));
    }, depth));
    suite.push_back(ScalarField::from_generic(space, "exp(x3)", [=](const auto& x) {
      using std::exp;
      return exp(x(i2, 0));
    }, depth));
    suite.push_back(ScalarField::from_generic(space, "x1^2-x2*x3+x3/2", [=](const auto& x) {
      return x(i0, 0) * x(i0, 0) - x(i1, 0) * x(i2, 0) + 0.5 * x(i2, 0);
    }, depth));
    return suite;
  }
  const int i0 = ix(0), i1 = ix(1), i2 = ix(2);
  suite.push_back(coordinate_function(space, i0, i0));
  suite.push_back(ScalarField::from_generic(space, "Y12*Y21", [=](const auto& y) { return y(i0, i1) * y(i1, i0); }, depth));
  suite.push_back(ScalarField::from_generic(space, "sin(Y13+2Y31)", [=](const auto& y) {
    using std::sin;
    return sin(y(i0, i2) + 2.0 * y(i2, i0));
  }, depth));
  suite.push_back(ScalarField::from_generic(space, "exp(Y22)", [=](const auto& y) {
    using std::exp;
    return exp(y(i1, i1));
  }, depth));
  suite.push_back(ScalarField::from_generic(space, "Y23^2-Y11*Y33+Y32/2", [=](const auto& y) {
    return y(i1, i2) * y(i1, i2) - y(i0, i0) * y(i2, i2) + 0.5 * y(i2, i1);
  }, depth));
  return suite;
}

}  // namespace homflow
