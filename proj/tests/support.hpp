#pragma once

#include <cmath>
#include <vector>

#include "homflow/homogeneous_space.hpp"
#include "homflow/random.hpp"

namespace homflow::testing {

inline Matrix random_skew(Rng& rng, int n, double norm) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  Matrix s = a - a.transpose();
  return s * (norm / s.norm());
}

inline Matrix random_matrix(Rng& rng, int rows, int cols) {
  Matrix a(rows, cols);
  for (int i = 0; i < a.size(); ++i) a(i) = rng.normal();
  return a;
}

inline Vector random_vector(Rng& rng, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

/// Point at geodesic distance `radius` from x in a random direction.
inline Point nearby_point(const Point& x, Rng& rng, double radius) {
  const SpaceDescriptor& sp = x.space();
  const Vector dir = random_vector(rng, sp.tangent_dim()).normalized();
  return act(lift_to_group(x), exp_at_base(sp, radius * dir));
}

inline double log2_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log2(x[i]);
    my += std::log2(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (std::log2(x[i]) - mx) * (std::log2(x[i]) - mx);
    sxy += (std::log2(x[i]) - mx) * (std::log2(y[i]) - my);
  }
  return sxy / sxx;
}

}  // namespace homflow::testing
