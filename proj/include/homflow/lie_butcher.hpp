#pragma once

// Planar rooted trees and forests, the post-Lie product of coefficient
// fields, elementary differentials and Lie series.
//
// Printed form: a single node is "•", a tree with children ω is "[ω]",
// trees of a forest are separated by one space, the empty forest is "∅".
// So "[•]" is the two-node chain and "• [•]" a forest of two trees.

#include <compare>
#include <string>
#include <vector>

#include "homflow/fields.hpp"

namespace homflow {

class PlanarForest;

class PlanarTree {
 public:
  /// Single node.
  PlanarTree() : size_(1) {}
  /// Root grafted onto the ordered children (B+ of the forest).
  explicit PlanarTree(const PlanarForest& children);
  explicit PlanarTree(std::vector<PlanarTree> children);

  const std::vector<PlanarTree>& children() const { return children_; }
  PlanarForest children_forest() const;
  int size() const { return size_; }
  std::string to_string() const;

  /// Size first, then the children forests lexicographically.
  friend std::strong_ordering operator<=>(const PlanarTree& a, const PlanarTree& b);
  friend bool operator==(const PlanarTree& a, const PlanarTree& b) { return (a <=> b) == 0; }

 private:
  std::vector<PlanarTree> children_;
  int size_;
};

class PlanarForest {
 public:
  PlanarForest() = default;
  explicit PlanarForest(std::vector<PlanarTree> trees);

  const std::vector<PlanarTree>& trees() const { return trees_; }
  bool empty() const { return trees_.empty(); }
  /// Total number of nodes.
  int order() const { return order_; }
  std::string to_string() const;
  /// Inverse of to_string; "*" is accepted for "•" and "" or "0" for "∅".
  static PlanarForest parse(const std::string& text);

  /// Lexicographic over trees; forests of different order compare by order first.
  friend std::strong_ordering operator<=>(const PlanarForest& a, const PlanarForest& b);
  friend bool operator==(const PlanarForest& a, const PlanarForest& b) { return (a <=> b) == 0; }

 private:
  std::vector<PlanarTree> trees_;
  int order_ = 0;
};

inline constexpr int kMaxForestOrder = 8;

/// All planar forests with exactly n nodes in canonical order.
/// Throws SizeGuardError for n > 8.
std::vector<PlanarForest> generate_forests(int n);

struct ForestCharacter {
  long long sigma;
  long long factorial;
  double exact;  // 1 / (sigma * factorial)
};

/// Symmetry factor and planar factorial of a forest. For planar forests the
/// symmetry factor is 1. The planar factorial multiplies, over the trees of
/// the forest in order, the number of nodes seen so far (this tree included),
/// and recurses into the children of each tree. Its reciprocal is the
/// coefficient of the forest in the expansion of the exact flow.
ForestCharacter sigma_factorial_character(const PlanarForest& forest);

/// x |-> d coeff_Y(x)[V_X(x)]. Throws RegularityError if Y has no derivative left.
CoefficientField post_lie_product(const CoefficientField& x, const CoefficientField& y);

/// Value at x of the elementary differential of V indexed by the forest,
/// applied to f. Needs regularity(V) >= |forest| and f with |forest| exact
/// derivatives; throws RegularityError otherwise.
double elementary_differential(const PlanarForest& forest, const CoefficientField& v, const ScalarField& f,
                               const Point& x);

/// V^k(f)(x); k = 0 gives f(x).
double iterated_lie_derivative(const CoefficientField& v, const ScalarField& f, const Point& x, int k);

struct LieSeriesResult {
  double value;
  /// sup over a t-grid in [0, h] of |V^{p+1}(f)(flow_t(x))| h^{p+1} / (p+1)!
  double remainder_bound_probe;
};

LieSeriesResult lie_series_partial_sum(const CoefficientField& v, const ScalarField& f, const Point& x, double h,
                                       int p, int probe_points = 32);

}  // namespace homflow
