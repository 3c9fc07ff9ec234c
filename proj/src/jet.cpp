#include "homflow/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "homflow/errors.hpp"

namespace homflow {
namespace {

void enumerate(int nvars, int degree, int var, std::vector<int>& current,
               std::vector<std::vector<int>>& out) {
  if (var == nvars - 1) {
    current[static_cast<std::size_t>(var)] = degree;
    out.push_back(current);
    current[static_cast<std::size_t>(var)] = 0;
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[static_cast<std::size_t>(var)] = e;
    enumerate(nvars, degree - e, var + 1, current, out);
  }
  current[static_cast<std::size_t>(var)] = 0;
}

}  // namespace

MonomialBasis::MonomialBasis(int nvars, int max_degree) : nvars_(nvars), max_degree_(max_degree) {
  if (nvars < 1 || max_degree < 0) throw DomainError("MonomialBasis: invalid shape");
  degree_offset_.push_back(0);
  std::vector<int> current(static_cast<std::size_t>(nvars), 0);
  for (int d = 0; d <= max_degree; ++d) {
    enumerate(nvars, d, 0, current, exponents_);
    degree_offset_.push_back(static_cast<int>(exponents_.size()));
  }
  std::map<std::vector<int>, int> index;
  for (int m = 0; m < static_cast<int>(exponents_.size()); ++m) {
    degree_.push_back(0);
    for (int e : exponents_[static_cast<std::size_t>(m)]) degree_.back() += e;
    index.emplace(exponents_[static_cast<std::size_t>(m)], m);
  }

  std::vector<std::vector<Product>> by_degree(static_cast<std::size_t>(max_degree) + 1);
  std::vector<int> sum(static_cast<std::size_t>(nvars));
  for (int i = 0; i < size(); ++i) {
    const int limit = count_up_to(max_degree - degree(i));
    for (int j = 0; j < limit; ++j) {
      for (int v = 0; v < nvars; ++v) {
        sum[static_cast<std::size_t>(v)] =
            exponents(i)[static_cast<std::size_t>(v)] + exponents(j)[static_cast<std::size_t>(v)];
      }
      const int out = index.at(sum);
      by_degree[static_cast<std::size_t>(degree(out))].push_back({i, j, out});
    }
  }
  for (const auto& bucket : by_degree) {
    products_.insert(products_.end(), bucket.begin(), bucket.end());
    product_end_.push_back(products_.size());
  }

  derivative_.resize(static_cast<std::size_t>(nvars));
  for (int v = 0; v < nvars; ++v) {
    for (int m = 0; m < size(); ++m) {
      const int e = exponents(m)[static_cast<std::size_t>(v)];
      if (e == 0) continue;
      std::vector<int> lowered = exponents(m);
      lowered[static_cast<std::size_t>(v)] -= 1;
      derivative_[static_cast<std::size_t>(v)].push_back({m, index.at(lowered), static_cast<double>(e)});
    }
  }
}

std::shared_ptr<const MonomialBasis> MonomialBasis::get(int nvars, int max_degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{nvars, max_degree}];
  if (!slot) slot = std::make_shared<const MonomialBasis>(nvars, max_degree);
  return slot;
}

Jet::Jet(BasisPtr basis, int degree) : basis_(std::move(basis)), degree_(degree) {
  if (!basis_) throw DomainError("Jet: null basis");
  if (degree < 0 || degree > basis_->max_degree()) {
    throw DomainError("Jet: degree " + std::to_string(degree) + " outside basis range");
  }
  coeffs_.assign(static_cast<std::size_t>(basis_->count_up_to(degree)), 0.0);
}

Jet Jet::variable(const BasisPtr& basis, int degree, double value, int var) {
  Jet j(basis, degree);
  j.coeffs_[0] = value;
  if (degree >= 1) j.coeffs_[static_cast<std::size_t>(basis->linear_index(var))] = 1.0;
  return j;
}

double Jet::coeff(int m) const {
  if (!basis_) return m == 0 ? constant_ : 0.0;
  return m < static_cast<int>(coeffs_.size()) ? coeffs_[static_cast<std::size_t>(m)] : 0.0;
}

double Jet::partial(int v) const {
  if (!basis_) return 0.0;
  if (degree_ < 1) throw RegularityError("Jet::partial: degree-0 jet carries no derivative");
  return coeffs_[static_cast<std::size_t>(basis_->linear_index(v))];
}

void Jet::promote_like(const Jet& o) {
  const double c = constant_;
  basis_ = o.basis_;
  degree_ = o.degree_;
  coeffs_.assign(static_cast<std::size_t>(basis_->count_up_to(degree_)), 0.0);
  coeffs_[0] = c;
}

Jet Jet::truncated(int degree) const {
  if (!basis_ || degree >= degree_) return *this;
  Jet r = *this;
  r.degree_ = std::max(degree, 0);
  r.coeffs_.resize(static_cast<std::size_t>(basis_->count_up_to(r.degree_)));
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  if (!o.basis_) {
    if (basis_) coeffs_[0] += o.constant_;
    else constant_ += o.constant_;
    return *this;
  }
  if (!basis_) promote_like(o);
  if (basis_ != o.basis_) throw DomainError("Jet: mixing jets from different bases");
  if (o.degree_ < degree_) *this = truncated(o.degree_);
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] += o.coeffs_[m];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) { return *this += -o; }

Jet& Jet::operator*=(double s) {
  if (!basis_) constant_ *= s;
  else
    for (double& c : coeffs_) c *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }

Jet Jet::operator-() const {
  Jet r = *this;
  r *= -1.0;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (!a.basis_) {
    Jet r = b;
    return r *= a.constant_;
  }
  if (!b.basis_) {
    Jet r = a;
    return r *= b.constant_;
  }
  if (a.basis_ != b.basis_) throw DomainError("Jet: mixing jets from different bases");
  const int degree = std::min(a.degree_, b.degree_);
  Jet r(a.basis_, degree);
  const auto& products = a.basis_->products();
  const std::size_t end = a.basis_->product_end(degree);
  const double* pa = a.coeffs_.data();
  const double* pb = b.coeffs_.data();
  double* pr = r.coeffs_.data();
  for (std::size_t k = 0; k < end; ++k) {
    const auto& p = products[k];
    pr[p.out] += pa[p.lhs] * pb[p.rhs];
  }
  return r;
}

Jet Jet::derivative(int var) const {
  if (!basis_) return Jet(0.0);
  if (degree_ < 1) throw RegularityError("Jet::derivative: degree-0 jet carries no derivative");
  Jet r(basis_, degree_ - 1);
  const auto limit = static_cast<int>(coeffs_.size());
  for (const auto& t : basis_->derivative_terms(var)) {
    if (t.src >= limit) break;
    r.coeffs_[static_cast<std::size_t>(t.dst)] += t.factor * coeffs_[static_cast<std::size_t>(t.src)];
  }
  return r;
}

namespace {

// f(a + u) = sum_k f^(k)(a)/k! u^k with u the non-constant part of x.
template <class DerivativeAt>
Jet compose_univariate(const Jet& x, DerivativeAt derivative_at) {
  const double a = x.value();
  if (x.is_constant()) return Jet(derivative_at(a, 0));
  Jet u = x;
  u -= Jet(a);
  Jet result(derivative_at(a, 0));
  Jet power(1.0);
  double factorial = 1.0;
  for (int k = 1; k <= x.degree(); ++k) {
    power = power * u;
    factorial *= static_cast<double>(k);
    Jet term = power;
    term *= derivative_at(a, k) / factorial;
    result += term;
  }
  return result.is_constant() ? result : result.truncated(x.degree());
}

}  // namespace

Jet sin(const Jet& x) {
  return compose_univariate(x, [](double a, int k) {
    switch (k % 4) {
      case 0: return std::sin(a);
      case 1: return std::cos(a);
      case 2: return -std::sin(a);
      default: return -std::cos(a);
    }
  });
}

Jet cos(const Jet& x) {
  return compose_univariate(x, [](double a, int k) {
    switch (k % 4) {
      case 0: return std::cos(a);
      case 1: return -std::sin(a);
      case 2: return -std::cos(a);
      default: return std::sin(a);
    }
  });
}

Jet exp(const Jet& x) {
  return compose_univariate(x, [](double a, int) { return std::exp(a); });
}

Jet abs(const Jet& x) { return x.value() < 0.0 ? -x : x; }

JetMatrix identity_jet(const Eigen::MatrixXd& x, int degree) {
  return identity_jet(x, MonomialBasis::get(static_cast<int>(x.size()), degree), degree);
}

JetMatrix identity_jet(const Eigen::MatrixXd& x, const Jet::BasisPtr& basis, int degree) {
  if (basis->nvars() != x.size()) throw DomainError("identity_jet: basis size mismatch");
  JetMatrix out(x.rows(), x.cols());
  for (Eigen::Index v = 0; v < x.size(); ++v) {
    out(v) = Jet::variable(basis, degree, x(v), static_cast<int>(v));
  }
  return out;
}

JetMatrix jet_matmul(const JetMatrix& a, const JetMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("jet_matmul: shape mismatch");
  JetMatrix out(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Jet acc(0.0);
      for (Eigen::Index k = 0; k < a.cols(); ++k) {
        if (a(i, k).is_constant() && a(i, k).value() == 0.0) continue;
        acc += a(i, k) * b(k, j);
      }
      out(i, j) = std::move(acc);
    }
  }
  return out;
}

JetMatrix jet_matmul(const Eigen::MatrixXd& a, const JetMatrix& b) {
  return jet_matmul(JetMatrix(a.cast<Jet>()), b);
}

Eigen::MatrixXd jet_values(const JetMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.size(); ++i) out(i) = m(i).value();
  return out;
}

int min_degree(const JetMatrix& m) {
  int d = Jet::kUnbounded;
  for (Eigen::Index i = 0; i < m.size(); ++i) d = std::min(d, m(i).degree());
  return d;
}

}  // namespace homflow
