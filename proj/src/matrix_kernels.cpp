#include "homflow/matrix_kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "homflow/errors.hpp"

namespace homflow {
namespace {

void require_square_finite(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DomainError(std::string(what) + ": expected a non-empty square matrix, got " +
                      std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (!a.allFinite()) {
    throw DomainError(std::string(what) + ": non-finite entries");
  }
}

double norm1(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Denman-Beavers iteration for the principal square root.
Matrix sqrtm(const Matrix& a) {
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  Matrix y = a;
  Matrix z = id;
  for (int it = 0; it < 100; ++it) {
    Matrix y_next = 0.5 * (y + z.inverse());
    Matrix z_next = 0.5 * (z + y.inverse());
    const double change = norm1(y_next - y);
    y = std::move(y_next);
    z = std::move(z_next);
    if (change <= 1e-15 * norm1(y)) return y;
  }
  throw ConvergenceError("mat_log: square root iteration did not converge");
}

}  // namespace

bool is_skew(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  return (a + a.transpose()).norm() <= rel_tol * std::max(a.norm(), 1e-300) ||
         (a + a.transpose()).norm() == 0.0;
}

bool is_rotation(const Matrix& r, double tol) {
  if (r.rows() != r.cols() || r.rows() == 0) return false;
  const Matrix id = Matrix::Identity(r.rows(), r.cols());
  return (r.transpose() * r - id).norm() <= tol && r.determinant() > 0.0;
}

AlgebraElement hat(const Eigen::Vector3d& w) {
  Matrix a(3, 3);
  a << 0.0, -w(2), w(1),
       w(2), 0.0, -w(0),
       -w(1), w(0), 0.0;
  return a;
}

Eigen::Vector3d vee(const AlgebraElement& a) {
  if (a.rows() != 3 || a.cols() != 3) throw DomainError("vee: expected a 3x3 matrix");
  return {0.5 * (a(2, 1) - a(1, 2)), 0.5 * (a(0, 2) - a(2, 0)), 0.5 * (a(1, 0) - a(0, 1))};
}

namespace {

// Closed form for so(3): exp(hat w) = I + a hat(w) + b hat(w)^2.
GroupElement rodrigues(const AlgebraElement& k) {
  const Eigen::Vector3d w = vee(k);
  const double theta2 = w.squaredNorm();
  double a, b;
  if (theta2 < 1e-8) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    const double theta = std::sqrt(theta2);
    const double s = std::sin(0.5 * theta);
    a = std::sin(theta) / theta;
    b = 2.0 * s * s / theta2;
  }
  const Matrix kk = hat(w);
  return Matrix::Identity(3, 3) + a * kk + b * (kk * kk);
}

bool nearly_skew3(const Matrix& a) {
  if (a.rows() != 3) return false;
  const double scale = a.cwiseAbs().maxCoeff();
  return (a + a.transpose()).cwiseAbs().maxCoeff() <= 4e-16 * scale;
}

}  // namespace

GroupElement mat_exp(const AlgebraElement& a) {
  require_square_finite(a, "mat_exp");
  if (nearly_skew3(a)) return rodrigues(a);
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  int squarings = 0;
  const double n1 = norm1(a);
  if (n1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(n1 / 0.5)));
  const Matrix b = a / std::ldexp(1.0, squarings);

  // Smallest degree whose first omitted term bound is below 1e-18.
  const double nb = norm1(b);
  int degree = 1;
  for (double bound = nb; degree < 18; ++degree) {
    bound *= nb / (degree + 1);
    if (bound < 1e-18) break;
  }
  Matrix e = id;
  for (int k = degree; k >= 1; --k) {
    e = id + (b * e) / static_cast<double>(k);
  }
  for (int s = 0; s < squarings; ++s) e = e * e;
  return e;
}

Vector rotation_angles(const GroupElement& r) {
  require_square_finite(r, "rotation_angles");
  Eigen::EigenSolver<Matrix> es(r, /*computeEigenvectors=*/false);
  const auto& ev = es.eigenvalues();
  Vector angles(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) angles(i) = std::abs(std::arg(ev(i)));
  std::sort(angles.data(), angles.data() + angles.size(), std::greater<>());
  return angles;
}

AlgebraElement mat_log(const GroupElement& r) {
  require_square_finite(r, "mat_log");
  const Vector angles = rotation_angles(r);
  if (angles.size() > 0 && angles(0) > std::numbers::pi - 1e-8) {
    throw LogBranchError("mat_log: rotation angle within 1e-8 of pi (log branch cut)");
  }
  const Matrix id = Matrix::Identity(r.rows(), r.cols());

  Matrix x = r;
  int roots = 0;
  while (norm1(x - id) > 0.25) {
    if (roots > 60) throw ConvergenceError("mat_log: too many square roots");
    x = sqrtm(x);
    ++roots;
  }

  // log(X) = 2 atanh(Z), Z = (X - I)(X + I)^{-1}
  const Matrix z = (x - id) * (x + id).inverse();
  const Matrix z2 = z * z;
  Matrix power = z;
  Matrix sum = z;
  for (int j = 1; j < 200; ++j) {
    power = power * z2;
    const Matrix term = power / static_cast<double>(2 * j + 1);
    sum += term;
    if (norm1(term) < 1e-20) break;
  }
  Matrix log = std::ldexp(2.0, roots) * sum;
  if ((r.transpose() * r - id).norm() <= 1e-10) {
    log = 0.5 * (log - log.transpose()).eval();
  }
  return log;
}

AlgebraElement commutator(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DomainError("commutator: shape mismatch");
  }
  return a * b - b * a;
}

double bernoulli(int k) {
  // Exact rationals; odd indices above 1 vanish.
  static constexpr std::array<std::array<double, 2>, 16> even = {{
      {1.0, 1.0},
      {1.0, 6.0},
      {-1.0, 30.0},
      {1.0, 42.0},
      {-1.0, 30.0},
      {5.0, 66.0},
      {-691.0, 2730.0},
      {7.0, 6.0},
      {-3617.0, 510.0},
      {43867.0, 798.0},
      {-174611.0, 330.0},
      {854513.0, 138.0},
      {-236364091.0, 2730.0},
      {8553103.0, 6.0},
      {-23749461029.0, 870.0},
      {8615841276005.0, 14322.0},
  }};
  if (k < 0 || k > 30) throw DomainError("bernoulli: index out of supported range [0, 30]");
  if (k == 1) return -0.5;
  if (k % 2 == 1) return 0.0;
  const auto& r = even[static_cast<std::size_t>(k / 2)];
  return r[0] / r[1];
}

AlgebraElement dexpinv(const AlgebraElement& u, const AlgebraElement& v, int q) {
  if (q < 0) throw DomainError("dexpinv: truncation order must be >= 0");
  if (!u.allFinite() || !v.allFinite()) throw DomainError("dexpinv: non-finite input");
  Matrix result = v;
  Matrix term = v;
  double factorial = 1.0;
  for (int k = 1; k <= q; ++k) {
    term = commutator(u, term);
    factorial *= static_cast<double>(k);
    const double bk = bernoulli(k);
    if (bk != 0.0) result += (bk / factorial) * term;
  }
  return result;
}

double operator_norm(const Matrix& l) {
  if (l.size() == 0) return 0.0;
  if (!l.allFinite()) throw DomainError("operator_norm: non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(l);
  return svd.singularValues()(0);
}

}  // namespace homflow
