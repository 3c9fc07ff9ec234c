#pragma once

// Concrete homogeneous models M = G/H with G = SO(n):
//   Sphere(n):       unit vectors in R^n, base point o = e_n, H = SO(n-1)
//   GroupAsSpace(n): SO(n) acting on itself by left multiplication, o = I
// Points are stored in their ambient representation (n x 1 or n x n), so the
// action is a plain matrix product in both models.

#include <cstdint>
#include <string>
#include <vector>

#include "homflow/matrix_kernels.hpp"

namespace homflow {

enum class Model { Sphere, GroupAsSpace };

class SpaceDescriptor {
 public:
  static SpaceDescriptor sphere(int n);
  static SpaceDescriptor group(int n);
  /// Parses "sphere:3" / "group:3".
  static SpaceDescriptor parse(const std::string& id);

  Model model() const { return model_; }
  int n() const { return n_; }
  int ambient_rows() const { return n_; }
  int ambient_cols() const { return model_ == Model::Sphere ? 1 : n_; }
  int ambient_dim() const { return ambient_rows() * ambient_cols(); }
  int tangent_dim() const { return model_ == Model::Sphere ? n_ - 1 : n_ * (n_ - 1) / 2; }
  Matrix base_point() const;
  std::string id() const;

  friend bool operator==(const SpaceDescriptor&, const SpaceDescriptor&) = default;

 private:
  SpaceDescriptor(Model model, int n) : model_(model), n_(n) {}
  Model model_;
  int n_;
};

class Point {
 public:
  /// Validates the manifold invariant (unit norm / orthogonal with det +1)
  /// to 1e-10; throws DomainError otherwise.
  Point(SpaceDescriptor space, Matrix coords);

  static Point base(const SpaceDescriptor& space) { return Point(space, space.base_point()); }

  const SpaceDescriptor& space() const { return space_; }
  const Matrix& coords() const { return coords_; }

 private:
  SpaceDescriptor space_;
  Matrix coords_;
};

/// Distance of the coordinates from the manifold: |‖x‖ - 1| for the sphere,
/// ‖XᵀX - I‖_F for the group.
double manifold_defect(const Point& x);

Point act(const GroupElement& g, const Point& x);

/// Geodesic distance of the round / bi-invariant (Frobenius) metric.
/// Defined for every pair, including antipodal points and rotations by pi.
double geodesic_distance(const Point& x, const Point& y);

/// Point at parameter s in [0, 1] on the minimizing geodesic from x to y.
/// Throws GeodesicError when the minimizing geodesic is not unique.
Point geodesic_point(const Point& x, const Point& y, double s);

/// Exponential map at the base point: tangent coordinates in the orthonormal
/// basis of T_oM returned by tangent_basis(o).
Point exp_at_base(const SpaceDescriptor& space, const Vector& tangent);

/// Deterministic g with act(g, o) = x. Sphere: x completed to a positively
/// oriented orthonormal basis (x as last column) by Gram-Schmidt over the
/// seeds e_1, ..., e_n in order. Group: g = x.
GroupElement lift_to_group(const Point& x);

/// Discrete lift of a sampled curve: each lift is corrected by a stabilizer
/// element chosen to minimize ‖g_{k+1} - g_k‖_F (orthogonal Procrustes).
std::vector<GroupElement> lift_curve(const std::vector<Point>& curve);

/// Orthonormal basis of T_xM (Frobenius inner product), as ambient matrices.
std::vector<Matrix> tangent_basis(const Point& x);

/// Orthogonal projection of an ambient vector onto T_xM.
Matrix project_tangent(const Point& x, const Matrix& ambient);

double frobenius_inner(const Matrix& a, const Matrix& b);

/// Deterministic pseudo-random point (uniform on the sphere / Haar on SO(n)).
Point sample_point(const SpaceDescriptor& space, std::uint64_t seed);

}  // namespace homflow
