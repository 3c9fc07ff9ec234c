#pragma once

#include <Eigen/Dense>

namespace homflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// so(n) and SO(n) are carried as plain dense matrices; the predicates below
// state the invariants each role is expected to satisfy.
using AlgebraElement = Matrix;
using GroupElement = Matrix;

bool is_skew(const Matrix& a, double rel_tol = 1e-14);
bool is_rotation(const Matrix& r, double tol = 1e-12);

/// 3-vector to so(3): hat(w) v = w x v.
AlgebraElement hat(const Eigen::Vector3d& w);
Eigen::Vector3d vee(const AlgebraElement& a);

/// Matrix exponential by scaling and squaring around a degree-18 Taylor
/// kernel (truncation error below 1e-22 once the scaled 1-norm is <= 1/2).
/// Throws DomainError for non-square or non-finite input.
GroupElement mat_exp(const AlgebraElement& a);

/// Principal logarithm of a rotation by inverse scaling and squaring
/// (Denman-Beavers square roots, then the atanh series).
/// Throws LogBranchError when some rotation angle is within 1e-8 of pi.
AlgebraElement mat_log(const GroupElement& r);

/// Rotation angles of an orthogonal matrix, one per eigenvalue, in [0, pi].
Vector rotation_angles(const GroupElement& r);

AlgebraElement commutator(const Matrix& a, const Matrix& b);

/// Bernoulli number B_k with the B_1 = -1/2 convention.
double bernoulli(int k);

/// Truncated inverse differential of the exponential:
///   sum_{k=0..q} B_k / k! ad_u^k(v).
AlgebraElement dexpinv(const AlgebraElement& u, const AlgebraElement& v, int q);

/// Largest singular value.
double operator_norm(const Matrix& l);

}  // namespace homflow
