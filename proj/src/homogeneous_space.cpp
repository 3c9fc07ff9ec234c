#include "homflow/homogeneous_space.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <string>

#include "homflow/errors.hpp"
#include "homflow/random.hpp"

namespace homflow {
namespace {

constexpr double kPointTolerance = 1e-10;
constexpr double kAntipodalGuard = 1e-8;

void require_same_space(const Point& x, const Point& y, const char* what) {
  if (!(x.space() == y.space())) {
    throw DomainError(std::string(what) + ": points live in different spaces");
  }
}

Matrix skew_part(const Matrix& b) { return 0.5 * (b - b.transpose()); }

// so(n) generator for the k-th pair (i < j) in lexicographic order, scaled to
// unit Frobenius norm.
Matrix unit_generator(int n, int k) {
  int idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++idx) {
      if (idx == k) {
        Matrix e = Matrix::Zero(n, n);
        e(i, j) = -(1.0 / std::numbers::sqrt2);
        e(j, i) = (1.0 / std::numbers::sqrt2);
        return e;
      }
    }
  }
  throw DomainError("unit_generator: index out of range");
}

}  // namespace

SpaceDescriptor SpaceDescriptor::sphere(int n) {
  if (n < 2) throw DomainError("Sphere(n) requires n >= 2");
  return {Model::Sphere, n};
}

SpaceDescriptor SpaceDescriptor::group(int n) {
  if (n < 2) throw DomainError("GroupAsSpace(n) requires n >= 2");
  return {Model::GroupAsSpace, n};
}

SpaceDescriptor SpaceDescriptor::parse(const std::string& id) {
  const auto colon = id.find(':');
  if (colon == std::string::npos) throw DomainError("space id must look like sphere:3 or group:3");
  const std::string kind = id.substr(0, colon);
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(id.substr(colon + 1), &used);
    if (used != id.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw DomainError("space id '" + id + "': bad dimension");
  }
  if (kind == "sphere") return sphere(n);
  if (kind == "group") return group(n);
  throw DomainError("space id '" + id + "': unknown model");
}

Matrix SpaceDescriptor::base_point() const {
  if (model_ == Model::Sphere) {
    Matrix o = Matrix::Zero(n_, 1);
    o(n_ - 1, 0) = 1.0;
    return o;
  }
  return Matrix::Identity(n_, n_);
}

std::string SpaceDescriptor::id() const {
  return (model_ == Model::Sphere ? "sphere:" : "group:") + std::to_string(n_);
}

Point::Point(SpaceDescriptor space, Matrix coords) : space_(space), coords_(std::move(coords)) {
  if (coords_.rows() != space_.ambient_rows() || coords_.cols() != space_.ambient_cols()) {
    throw DomainError("Point: coordinates do not match " + space_.id());
  }
  if (!coords_.allFinite()) throw DomainError("Point: non-finite coordinates");
  const double defect = manifold_defect(*this);
  if (defect > kPointTolerance) {
    throw DomainError("Point: not on " + space_.id() + " (defect " + std::to_string(defect) + ")");
  }
  if (space_.model() == Model::GroupAsSpace && coords_.determinant() <= 0.0) {
    throw DomainError("Point: orthogonal matrix with det <= 0 is not in SO(n)");
  }
}

double manifold_defect(const Point& x) {
  const Matrix& c = x.coords();
  if (x.space().model() == Model::Sphere) return std::abs(c.norm() - 1.0);
  return (c.transpose() * c - Matrix::Identity(c.rows(), c.cols())).norm();
}

Point act(const GroupElement& g, const Point& x) {
  const int n = x.space().n();
  if (g.rows() != n || g.cols() != n) {
    throw DomainError("act: group element is " + std::to_string(g.rows()) + "x" +
                      std::to_string(g.cols()) + ", space is " + x.space().id());
  }
  return Point(x.space(), g * x.coords());
}

double geodesic_distance(const Point& x, const Point& y) {
  require_same_space(x, y, "geodesic_distance");
  if (x.space().model() == Model::Sphere) {
    // Same value as arccos(<x, y>), without its loss of precision near 0 and pi.
    const Matrix& a = x.coords();
    const Matrix& b = y.coords();
    return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
  }
  const Matrix r = x.coords().transpose() * y.coords();
  if (r.rows() == 3) {
    const double c = 0.5 * (r.trace() - 1.0);
    const double s = 0.5 * vee(r - r.transpose()).norm();
    return std::numbers::sqrt2 * std::atan2(s, c);
  }
  const Vector angles = rotation_angles(r);
  if (angles(0) < std::numbers::pi - kAntipodalGuard) return mat_log(r).norm();
  return angles.norm();
}

Point geodesic_point(const Point& x, const Point& y, double s) {
  require_same_space(x, y, "geodesic_point");
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("geodesic_point: s must lie in [0, 1]");
  if (x.space().model() == Model::Sphere) {
    const double theta = geodesic_distance(x, y);
    if (theta > std::numbers::pi - kAntipodalGuard) {
      throw GeodesicError("geodesic_point: antipodal points have no unique minimizing geodesic");
    }
    if (s == 0.0) return x;
    if (s == 1.0) return y;
    const Matrix& a = x.coords();
    Matrix u = y.coords() - (a.transpose() * y.coords())(0, 0) * a;
    const double un = u.norm();
    if (un == 0.0) return x;
    u /= un;
    Matrix p = std::cos(s * theta) * a + std::sin(s * theta) * u;
    p /= p.norm();
    return Point(x.space(), std::move(p));
  }
  Matrix log;
  try {
    log = mat_log(x.coords().transpose() * y.coords());
  } catch (const LogBranchError&) {
    throw GeodesicError("geodesic_point: rotation by pi has no unique minimizing geodesic");
  }
  if (s == 0.0) return x;
  if (s == 1.0) return y;
  return Point(x.space(), x.coords() * mat_exp(s * log));
}

Point exp_at_base(const SpaceDescriptor& space, const Vector& tangent) {
  if (tangent.size() != space.tangent_dim()) throw DomainError("exp_at_base: wrong tangent size");
  const int n = space.n();
  if (space.model() == Model::Sphere) {
    const double r = tangent.norm();
    Matrix x = Matrix::Zero(n, 1);
    x(n - 1, 0) = std::cos(r);
    if (r > 0.0) {
      for (int i = 0; i < n - 1; ++i) x(i, 0) = std::sin(r) * tangent(i) / r;
    }
    return Point(space, std::move(x));
  }
  Matrix omega = Matrix::Zero(n, n);
  for (int k = 0; k < tangent.size(); ++k) omega += tangent(k) * unit_generator(n, k);
  return Point(space, mat_exp(omega));
}

GroupElement lift_to_group(const Point& x) {
  if (x.space().model() == Model::GroupAsSpace) return x.coords();
  const int n = x.space().n();
  const Vector v = x.coords().col(0);
  std::vector<Vector> frame{v};
  for (int seed = 0; seed < n && static_cast<int>(frame.size()) < n; ++seed) {
    Vector w = Vector::Unit(n, seed);
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& b : frame) w -= b.dot(w) * b;
    }
    const double norm = w.norm();
    if (norm < 1e-6) continue;
    frame.push_back(w / norm);
  }
  GroupElement g(n, n);
  for (int k = 1; k < n; ++k) g.col(k - 1) = frame[static_cast<std::size_t>(k)];
  g.col(n - 1) = v;
  if (g.determinant() < 0.0) g.col(0) = -g.col(0);
  return g;
}

std::vector<GroupElement> lift_curve(const std::vector<Point>& curve) {
  std::vector<GroupElement> lifts;
  lifts.reserve(curve.size());
  for (const Point& x : curve) {
    GroupElement g = lift_to_group(x);
    if (!lifts.empty() && x.space().model() == Model::Sphere) {
      const int n = x.space().n();
      // Stabilizer of e_n is diag(h, 1), h in SO(n-1); maximize tr(hᵀ M).
      const Matrix m = (g.transpose() * lifts.back()).topLeftCorner(n - 1, n - 1);
      Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Matrix d = Matrix::Identity(n - 1, n - 1);
      if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(n - 2, n - 2) = -1.0;
      Matrix h = Matrix::Identity(n, n);
      h.topLeftCorner(n - 1, n - 1) = svd.matrixU() * d * svd.matrixV().transpose();
      g = g * h;
    }
    lifts.push_back(std::move(g));
  }
  return lifts;
}

std::vector<Matrix> tangent_basis(const Point& x) {
  const int n = x.space().n();
  std::vector<Matrix> basis;
  if (x.space().model() == Model::Sphere) {
    const GroupElement g = lift_to_group(x);
    for (int k = 0; k < n - 1; ++k) basis.emplace_back(g.col(k));
    return basis;
  }
  for (int k = 0; k < x.space().tangent_dim(); ++k) basis.push_back(unit_generator(n, k) * x.coords());
  return basis;
}

Matrix project_tangent(const Point& x, const Matrix& ambient) {
  const Matrix& c = x.coords();
  if (ambient.rows() != c.rows() || ambient.cols() != c.cols()) {
    throw DomainError("project_tangent: shape mismatch");
  }
  if (x.space().model() == Model::Sphere) return ambient - (c.transpose() * ambient)(0, 0) * c;
  return skew_part(ambient * c.transpose()) * c;
}

double frobenius_inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

Point sample_point(const SpaceDescriptor& space, std::uint64_t seed) {
  Rng rng(seed);
  const int n = space.n();
  if (space.model() == Model::Sphere) {
    Matrix x(n, 1);
    do {
      for (int i = 0; i < n; ++i) x(i, 0) = rng.normal();
    } while (x.norm() < 1e-3);
    x /= x.norm();
    return Point(space, std::move(x));
  }
  Matrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return Point(space, std::move(q));
}

}  // namespace homflow
