#include "homflow/lie_butcher.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>

#include "homflow/errors.hpp"
#include "homflow/integrators.hpp"

namespace homflow {

PlanarTree::PlanarTree(std::vector<PlanarTree> children) : children_(std::move(children)), size_(1) {
  for (const auto& c : children_) size_ += c.size();
}

PlanarTree::PlanarTree(const PlanarForest& children) : PlanarTree(children.trees()) {}

PlanarForest PlanarTree::children_forest() const { return PlanarForest(children_); }

std::string PlanarTree::to_string() const {
  if (children_.empty()) return "•";
  return "[" + children_forest().to_string() + "]";
}

std::strong_ordering operator<=>(const PlanarTree& a, const PlanarTree& b) {
  if (auto c = a.size_ <=> b.size_; c != 0) return c;
  return std::lexicographical_compare_three_way(a.children_.begin(), a.children_.end(), b.children_.begin(),
                                                b.children_.end());
}

PlanarForest::PlanarForest(std::vector<PlanarTree> trees) : trees_(std::move(trees)) {
  for (const auto& t : trees_) order_ += t.size();
}

std::string PlanarForest::to_string() const {
  if (trees_.empty()) return "∅";
  std::string out;
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    if (i) out += ' ';
    out += trees_[i].to_string();
  }
  return out;
}

std::strong_ordering operator<=>(const PlanarForest& a, const PlanarForest& b) {
  if (auto c = a.order_ <=> b.order_; c != 0) return c;
  return std::lexicographical_compare_three_way(a.trees_.begin(), a.trees_.end(), b.trees_.begin(),
                                                b.trees_.end());
}

namespace {

class ForestParser {
 public:
  explicit ForestParser(const std::string& s) : s_(s) {}

  PlanarForest forest(bool nested) {
    std::vector<PlanarTree> trees;
    for (;;) {
      skip_space();
      if (pos_ == s_.size()) break;
      if (s_[pos_] == ']') {
        if (!nested) fail("unbalanced ']'");
        break;
      }
      trees.push_back(tree());
    }
    return PlanarForest(std::move(trees));
  }

  void expect_end() {
    skip_space();
    if (pos_ != s_.size()) fail("trailing characters");
  }

 private:
  static constexpr const char* kNode = "\xE2\x80\xA2";

  PlanarTree tree() {
    if (s_.compare(pos_, 3, kNode) == 0) {
      pos_ += 3;
      return PlanarTree();
    }
    if (s_[pos_] == '*') {
      ++pos_;
      return PlanarTree();
    }
    if (s_[pos_] == '[') {
      ++pos_;
      PlanarForest inner = forest(true);
      if (pos_ == s_.size() || s_[pos_] != ']') fail("missing ']'");
      ++pos_;
      if (inner.empty()) fail("empty brackets");
      return PlanarTree(inner);
    }
    fail("unexpected character");
    return PlanarTree();
  }

  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DomainError("forest parse error at byte " + std::to_string(pos_) + ": " + what + " in '" + s_ + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

PlanarForest PlanarForest::parse(const std::string& text) {
  if (text == "∅" || text == "0" || text.find_first_not_of(" \t") == std::string::npos) return PlanarForest();
  ForestParser parser(text);
  PlanarForest f = parser.forest(false);
  parser.expect_end();
  return f;
}

std::vector<PlanarForest> generate_forests(int n) {
  if (n < 0) throw DomainError("generate_forests: negative order");
  if (n > kMaxForestOrder) {
    throw SizeGuardError("generate_forests: order " + std::to_string(n) + " exceeds the supported maximum " +
                         std::to_string(kMaxForestOrder));
  }
  static std::mutex mutex;
  static std::vector<std::vector<PlanarForest>> table;
  std::lock_guard<std::mutex> lock(mutex);
  if (table.empty()) table.push_back({PlanarForest()});
  while (static_cast<int>(table.size()) <= n) {
    const int m = static_cast<int>(table.size());
    std::vector<PlanarForest> level;
    // First tree has k nodes: a root over a forest of k - 1, followed by any forest of m - k.
    for (int k = 1; k <= m; ++k) {
      for (const auto& inner : table[static_cast<std::size_t>(k - 1)]) {
        const PlanarTree head(inner);
        for (const auto& rest : table[static_cast<std::size_t>(m - k)]) {
          std::vector<PlanarTree> trees{head};
          trees.insert(trees.end(), rest.trees().begin(), rest.trees().end());
          level.emplace_back(std::move(trees));
        }
      }
    }
    std::sort(level.begin(), level.end());
    table.push_back(std::move(level));
  }
  return table[static_cast<std::size_t>(n)];
}

namespace {

long long planar_factorial(const PlanarForest& forest) {
  long long out = 1;
  long long seen = 0;
  for (const auto& t : forest.trees()) {
    seen += t.size();
    out *= seen * planar_factorial(t.children_forest());
  }
  return out;
}

}  // namespace

ForestCharacter sigma_factorial_character(const PlanarForest& forest) {
  if (forest.order() > kMaxForestOrder) throw SizeGuardError("sigma_factorial_character: order exceeds 8");
  const long long fact = planar_factorial(forest);
  return {1, fact, 1.0 / static_cast<double>(fact)};
}

namespace {

// Coefficient jets of a field over a shared basis. The post-Lie product
// X ▷ Y differentiates Y once, so its degree is min(deg X, deg Y - 1).
JetMatrix jet_product(const JetMatrix& cx, const JetMatrix& cy, const Matrix& coords, const Jet::BasisPtr& basis) {
  const int deg = std::min({min_degree(cx), min_degree(cy) - 1, basis->max_degree()});
  if (deg < 0) throw RegularityError("post-Lie product: derivative budget exhausted");
  const JetMatrix w = vector_jet(cx, coords, basis, deg);
  JetMatrix out(cy.rows(), cy.cols());
  for (Eigen::Index i = 0; i < cy.size(); ++i) {
    Jet acc(0.0);
    if (!cy(i).is_constant()) {
      for (Eigen::Index v = 0; v < w.size(); ++v) acc += cy(i).derivative(static_cast<int>(v)) * w(v);
    }
    out(i) = std::move(acc);
  }
  return out;
}

struct JetContext {
  const Matrix& coords;
  Jet::BasisPtr basis;
};

// (X1 ... Xk) ▷ Z expanded with (X w) ▷ Z = X ▷ (w ▷ Z) - (X ▷ w) ▷ Z,
// where X ▷ acts on a word as a derivation.
JetMatrix word_action(const std::vector<JetMatrix>& word, const JetMatrix& z, const JetContext& ctx) {
  if (word.empty()) return z;
  const JetMatrix& head = word.front();
  const std::vector<JetMatrix> rest(word.begin() + 1, word.end());
  JetMatrix out = jet_product(head, word_action(rest, z, ctx), ctx.coords, ctx.basis);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    std::vector<JetMatrix> modified = rest;
    modified[i] = jet_product(head, rest[i], ctx.coords, ctx.basis);
    const JetMatrix term = word_action(modified, z, ctx);
    for (Eigen::Index e = 0; e < out.size(); ++e) out(e) -= term(e);
  }
  return out;
}

// Word of fields applied to a scalar jet as a differential operator:
// (X w)(f) = X(w(f)) - (X ▷ w)(f).
Jet word_apply(const std::vector<JetMatrix>& word, const Jet& f, const JetContext& ctx) {
  if (word.empty()) return f;
  const JetMatrix& head = word.front();
  const std::vector<JetMatrix> rest(word.begin() + 1, word.end());
  const Jet inner = word_apply(rest, f, ctx);
  const int deg = std::min(min_degree(head), ctx.basis->max_degree());
  Jet out = lie_derivative(vector_jet(head, ctx.coords, ctx.basis, deg), inner);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    std::vector<JetMatrix> modified = rest;
    modified[i] = jet_product(head, rest[i], ctx.coords, ctx.basis);
    out -= word_apply(modified, f, ctx);
  }
  return out;
}

JetMatrix tree_field(const PlanarTree& tree, const JetMatrix& v, const JetContext& ctx) {
  std::vector<JetMatrix> word;
  for (const auto& child : tree.children()) word.push_back(tree_field(child, v, ctx));
  return word_action(word, v, ctx);
}

}  // namespace

CoefficientField post_lie_product(const CoefficientField& x, const CoefficientField& y) {
  if (!(x.space() == y.space())) throw DomainError("post_lie_product: fields live on different spaces");
  if (y.regularity() < 1) {
    throw RegularityError("post_lie_product: field '" + y.name() + "' has no derivative left");
  }
  if (y.constant_value()) {
    const int n = y.space().n();
    return CoefficientField::constant(y.space(), AlgebraElement::Zero(n, n), "(" + x.name() + "▷" + y.name() + ")");
  }
  CoefficientField::TaylorFn taylor = [x, y](const Matrix& c, const Jet::BasisPtr& basis, int degree) {
    const JetMatrix cx = x.taylor(c, basis, degree);
    const JetMatrix cy = y.taylor(c, basis, degree + 1);
    return jet_product(cx, cy, c, basis);
  };
  return CoefficientField(x.space(), "(" + x.name() + "▷" + y.name() + ")", nullptr, std::move(taylor),
                          std::min(y.regularity() - 1, x.regularity()),
                          std::max(x.taylor_depth(), y.taylor_depth() + 1));
}

double elementary_differential(const PlanarForest& forest, const CoefficientField& v, const ScalarField& f,
                               const Point& x) {
  if (!(x.space() == v.space())) throw DomainError("elementary_differential: point and field spaces differ");
  const int k = forest.order();
  if (k == 0) return f.value(x);
  if (v.regularity() < k) {
    throw RegularityError("elementary_differential: forest of order " + std::to_string(k) + " needs regularity " +
                          std::to_string(k) + ", field '" + v.name() + "' has " + std::to_string(v.regularity()));
  }
  const auto basis = MonomialBasis::get(x.space().ambient_dim(), k + v.taylor_depth());
  const JetContext ctx{x.coords(), basis};
  const JetMatrix vj = v.taylor(x.coords(), basis, k);
  const Jet fj = f.taylor(x.coords(), basis, k);
  std::vector<JetMatrix> word;
  for (const auto& t : forest.trees()) word.push_back(tree_field(t, vj, ctx));
  return word_apply(word, fj, ctx).value();
}

double iterated_lie_derivative(const CoefficientField& v, const ScalarField& f, const Point& x, int k) {
  if (k < 0) throw DomainError("iterated_lie_derivative: negative order");
  if (k == 0) return f.value(x);
  if (v.regularity() < k - 1) throw RegularityError("iterated_lie_derivative: field regularity exhausted");
  const auto basis = MonomialBasis::get(x.space().ambient_dim(), k + v.taylor_depth());
  const JetMatrix w = vector_jet(v.taylor(x.coords(), basis, k), x.coords(), basis, k);
  Jet g = f.taylor(x.coords(), basis, k);
  for (int i = 0; i < k; ++i) g = lie_derivative(w, g);
  return g.value();
}

LieSeriesResult lie_series_partial_sum(const CoefficientField& v, const ScalarField& f, const Point& x, double h,
                                       int p, int probe_points) {
  if (p < 0) throw DomainError("lie_series_partial_sum: negative order");
  if (probe_points < 1) throw DomainError("lie_series_partial_sum: need at least one probe interval");
  double value = f.value(x);
  double power = 1.0;
  double factorial = 1.0;
  for (int k = 1; k <= p; ++k) {
    power *= h;
    factorial *= k;
    value += power / factorial * iterated_lie_derivative(v, f, x, k);
  }
  const double scale = std::pow(std::abs(h), p + 1) / (factorial * (p + 1));
  double sup = std::abs(iterated_lie_derivative(v, f, x, p + 1));
  Point y = x;
  double t_prev = 0.0;
  for (int i = 1; i <= probe_points; ++i) {
    const double t = h * i / probe_points;
    y = reference_flow(v, y, t - t_prev, kReferenceTolerance);
    t_prev = t;
    sup = std::max(sup, std::abs(iterated_lie_derivative(v, f, y, p + 1)));
  }
  return {value, sup * scale};
}

}  // namespace homflow
