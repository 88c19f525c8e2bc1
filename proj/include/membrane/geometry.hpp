#pragma once

// Analytic target surfaces, closest-point projection and local charts.

#include "membrane/types.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace membrane {

enum class SurfaceKind { plane, sphere, torus, ellipsoid, graph };

inline std::string_view to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::plane: return "plane";
    case SurfaceKind::sphere: return "sphere";
    case SurfaceKind::torus: return "torus";
    case SurfaceKind::ellipsoid: return "ellipsoid";
    case SurfaceKind::graph: return "graph";
  }
  return "unknown";
}

class Chart;

/// A regular oriented surface without boundary, given analytically.
///
/// Every kind also carries an implicit function G with G = 0 on the surface;
/// the unit normal is orientation_sign * grad G / |grad G|, which extends the
/// normal field smoothly to a neighbourhood of the surface.
class Surface {
 public:
  /// Plane through `origin` with unit normal direction `normal`.
  static Surface plane(const Vec3& origin = Vec3::Zero(), const Vec3& normal = Vec3::UnitZ(),
                       int orientation_sign = 1) {
    const double len = normal.norm();
    if (!(len > 0.0)) throw Error(ErrorKind::InvalidArgument, "plane normal must be nonzero");
    Surface s(SurfaceKind::plane, orientation_sign);
    s.center_ = origin;
    s.axis_ = normal / len;
    s.scale_ = 1.0;
    return s;
  }

  static Surface sphere(const Vec3& center, double radius, int orientation_sign = 1) {
    if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "sphere radius must be positive");
    Surface s(SurfaceKind::sphere, orientation_sign);
    s.center_ = center;
    s.radius_ = radius;
    s.scale_ = radius;
    return s;
  }

  /// Torus of revolution about the z axis through `center`.
  static Surface torus(const Vec3& center, double major_radius, double minor_radius,
                       int orientation_sign = 1) {
    if (!(minor_radius > 0.0) || !(major_radius > minor_radius))
      throw Error(ErrorKind::InvalidArgument, "torus requires 0 < minor radius < major radius");
    Surface s(SurfaceKind::torus, orientation_sign);
    s.center_ = center;
    s.radius_ = major_radius;
    s.minor_ = minor_radius;
    s.scale_ = std::min(minor_radius, major_radius - minor_radius);
    return s;
  }

  static Surface ellipsoid(const Vec3& center, const Vec3& semi_axes, int orientation_sign = 1) {
    if (!(semi_axes.minCoeff() > 0.0))
      throw Error(ErrorKind::InvalidArgument, "ellipsoid semi-axes must be positive");
    Surface s(SurfaceKind::ellipsoid, orientation_sign);
    s.center_ = center;
    s.axis_ = semi_axes;
    const double amin = semi_axes.minCoeff();
    s.scale_ = amin * amin / semi_axes.maxCoeff();
    return s;
  }

  /// Graph z = c0 + c1 x + c2 y + c3 x^2 + c4 x y + c5 y^2.
  static Surface graph(const std::array<double, 6>& coeffs, int orientation_sign = 1) {
    Surface s(SurfaceKind::graph, orientation_sign);
    s.coeffs_ = coeffs;
    Mat2 H;
    H << 2 * coeffs[3], coeffs[4], coeffs[4], 2 * coeffs[5];
    const double curv = H.norm();
    s.scale_ = curv > 1.0 ? 1.0 / curv : 1.0;
    return s;
  }

  SurfaceKind kind() const { return kind_; }
  int orientation_sign() const { return sign_; }
  const Vec3& center() const { return center_; }
  /// Plane unit normal (plane) or semi-axes (ellipsoid).
  const Vec3& axis() const { return axis_; }
  double radius() const { return radius_; }
  double minor_radius() const { return minor_; }
  const std::array<double, 6>& coeffs() const { return coeffs_; }

  /// Smallest curvature radius (1 for flat kinds); tolerances scale with it.
  double scale() const { return scale_; }
  double on_surface_tol() const { return 1e-9 * scale_; }
  double medial_tol() const { return 1e-3 * scale_; }

  /// Same surface with the opposite normal field.
  Surface reoriented() const {
    Surface s = *this;
    s.sign_ = -sign_;
    return s;
  }

  double implicit_value(const Vec3& p) const {
    switch (kind_) {
      case SurfaceKind::plane: return axis_.dot(p - center_);
      case SurfaceKind::sphere: return (p - center_).squaredNorm() - radius_ * radius_;
      case SurfaceKind::torus: {
        const Vec3 x = p - center_;
        const double rho = std::hypot(x.x(), x.y());
        return (rho - radius_) * (rho - radius_) + x.z() * x.z() - minor_ * minor_;
      }
      case SurfaceKind::ellipsoid: {
        const Vec3 x = (p - center_).cwiseQuotient(axis_);
        return x.squaredNorm() - 1.0;
      }
      case SurfaceKind::graph: return p.z() - height(p.x(), p.y());
    }
    return 0.0;
  }

  Vec3 implicit_gradient(const Vec3& p) const {
    switch (kind_) {
      case SurfaceKind::plane: return axis_;
      case SurfaceKind::sphere: return 2.0 * (p - center_);
      case SurfaceKind::torus: {
        const Vec3 x = p - center_;
        const double rho = std::hypot(x.x(), x.y());
        if (rho == 0.0) return Vec3(0, 0, 2 * x.z());
        const double f = 2.0 * (rho - radius_) / rho;
        return Vec3(f * x.x(), f * x.y(), 2.0 * x.z());
      }
      case SurfaceKind::ellipsoid: {
        const Vec3 x = p - center_;
        return 2.0 * x.cwiseQuotient(axis_.cwiseProduct(axis_));
      }
      case SurfaceKind::graph: {
        const Vec2 g = height_gradient(p.x(), p.y());
        return Vec3(-g.x(), -g.y(), 1.0);
      }
    }
    return Vec3::Zero();
  }

  Mat3 implicit_hessian(const Vec3& p) const {
    Mat3 H = Mat3::Zero();
    switch (kind_) {
      case SurfaceKind::plane: break;
      case SurfaceKind::sphere: H = 2.0 * Mat3::Identity(); break;
      case SurfaceKind::torus: {
        const Vec3 x = p - center_;
        const double rho = std::hypot(x.x(), x.y());
        const double r3 = rho * rho * rho;
        H(0, 0) = 2.0 * (1.0 - radius_ / rho + radius_ * x.x() * x.x() / r3);
        H(1, 1) = 2.0 * (1.0 - radius_ / rho + radius_ * x.y() * x.y() / r3);
        H(0, 1) = H(1, 0) = 2.0 * radius_ * x.x() * x.y() / r3;
        H(2, 2) = 2.0;
        break;
      }
      case SurfaceKind::ellipsoid:
        H.diagonal() = 2.0 * axis_.cwiseProduct(axis_).cwiseInverse();
        break;
      case SurfaceKind::graph:
        H(0, 0) = -2.0 * coeffs_[3];
        H(0, 1) = H(1, 0) = -coeffs_[4];
        H(1, 1) = -2.0 * coeffs_[5];
        break;
    }
    return H;
  }

  /// Euclidean distance to the surface (exact for plane/sphere/torus,
  /// first-order |G|/|grad G| otherwise).
  double distance(const Vec3& p) const {
    switch (kind_) {
      case SurfaceKind::plane: return std::abs(axis_.dot(p - center_));
      case SurfaceKind::sphere: return std::abs((p - center_).norm() - radius_);
      case SurfaceKind::torus: {
        const Vec3 x = p - center_;
        const double rho = std::hypot(x.x(), x.y());
        return std::abs(std::hypot(rho - radius_, x.z()) - minor_);
      }
      case SurfaceKind::ellipsoid:
      case SurfaceKind::graph: {
        const double g = implicit_gradient(p).norm();
        return g > 0.0 ? std::abs(implicit_value(p)) / g : std::abs(implicit_value(p));
      }
    }
    return 0.0;
  }

  bool on_surface(const Vec3& y) const { return distance(y) <= on_surface_tol(); }

  /// Normal field extended off the surface: sign * grad G / |grad G|.
  Vec3 extended_normal(const Vec3& p) const {
    const Vec3 g = implicit_gradient(p);
    return static_cast<double>(sign_) * g / g.norm();
  }

  /// Jacobian of extended_normal.
  Mat3 extended_normal_jacobian(const Vec3& p) const {
    const Vec3 g = implicit_gradient(p);
    const double len = g.norm();
    const Vec3 n = g / len;
    return static_cast<double>(sign_) * (Mat3::Identity() - n * n.transpose()) *
           implicit_hessian(p) / len;
  }

  Vec3 normal(const Vec3& y) const {
    require_on_surface(y);
    return extended_normal(y);
  }

  Vec3 tangent_project(const Vec3& y, const Vec3& v) const {
    const Vec3 n = normal(y);
    return v - v.dot(n) * n;
  }

  /// Closest point on the surface.
  Vec3 project(const Vec3& p) const {
    switch (kind_) {
      case SurfaceKind::plane: return p - axis_.dot(p - center_) * axis_;
      case SurfaceKind::sphere: {
        const Vec3 d = p - center_;
        const double len = d.norm();
        if (len < medial_tol())
          throw Error(ErrorKind::AmbiguousProjection, "point at the sphere center");
        return center_ + radius_ * d / len;
      }
      case SurfaceKind::torus: {
        const Vec3 x = p - center_;
        const double rho = std::hypot(x.x(), x.y());
        if (rho < medial_tol())
          throw Error(ErrorKind::AmbiguousProjection, "point on the torus axis");
        const Vec3 ring(radius_ * x.x() / rho, radius_ * x.y() / rho, 0.0);
        const Vec3 d = x - ring;
        const double len = d.norm();
        if (len < medial_tol())
          throw Error(ErrorKind::AmbiguousProjection, "point on the torus core circle");
        return center_ + ring + minor_ * d / len;
      }
      case SurfaceKind::ellipsoid: return project_ellipsoid(p);
      case SurfaceKind::graph: return project_graph(p);
    }
    return p;
  }

  /// Chart centred at an on-surface point.
  Chart chart_at(const Vec3& y) const;

  double height(double x, double y) const {
    const auto& c = coeffs_;
    return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y;
  }

  Vec2 height_gradient(double x, double y) const {
    const auto& c = coeffs_;
    return Vec2(c[1] + 2 * c[3] * x + c[4] * y, c[2] + c[4] * x + 2 * c[5] * y);
  }

  void require_on_surface(const Vec3& y) const {
    if (!on_surface(y))
      throw Error(ErrorKind::OffSurface,
                  "point at distance " + std::to_string(distance(y)) + " from the surface");
  }

 private:
  Surface(SurfaceKind kind, int sign) : kind_(kind), sign_(sign >= 0 ? 1 : -1) {}

  // Lagrange condition x_i = a_i^2 p_i / (a_i^2 + t), solved for t by Newton
  // on g(t) = sum (a_i p_i / (a_i^2 + t))^2 - 1, which is convex and
  // decreasing on t > -min a_i^2. Starting where g >= 0 keeps iterates left
  // of the root.
  Vec3 project_ellipsoid(const Vec3& p) const {
    const Vec3 x = p - center_;
    const Vec3 a2 = axis_.cwiseProduct(axis_);
    int kmin = 0;
    axis_.minCoeff(&kmin);
    const auto g = [&](double t) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double q = axis_[i] * x[i] / (a2[i] + t);
        s += q * q;
      }
      return s - 1.0;
    };
    const auto dg = [&](double t) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double q = axis_[i] * x[i] / (a2[i] + t);
        s += -2.0 * q * q / (a2[i] + t);
      }
      return s;
    };
    double t = 0.0;
    if (g(0.0) < 0.0) {
      if (std::abs(x[kmin]) < medial_tol())
        throw Error(ErrorKind::AmbiguousProjection, "point near the ellipsoid medial disk");
      t = -a2[kmin] + axis_[kmin] * std::abs(x[kmin]);
    }
    for (int it = 0; it < 50; ++it) {
      const double gv = g(t);
      const double step = gv / dg(t);
      t -= step;
      if (std::abs(step) <= 1e-12 * (1.0 + std::abs(t)) || gv == 0.0) {
        Vec3 y;
        for (int i = 0; i < 3; ++i) y[i] = a2[i] * x[i] / (a2[i] + t);
        return center_ + y;
      }
    }
    throw Error(ErrorKind::NoConvergence, "ellipsoid projection did not converge in 50 iterations");
  }

  // Newton on the stationarity of |(u, v, h(u, v)) - p|^2.
  Vec3 project_graph(const Vec3& p) const {
    Vec2 uv(p.x(), p.y());
    const Mat2 Hh = (Mat2() << 2 * coeffs_[3], coeffs_[4], coeffs_[4], 2 * coeffs_[5]).finished();
    for (int it = 0; it < 50; ++it) {
      const double r = height(uv.x(), uv.y()) - p.z();
      const Vec2 gh = height_gradient(uv.x(), uv.y());
      const Vec2 grad = (uv - p.head<2>()) + r * gh;
      Mat2 hess = Mat2::Identity() + gh * gh.transpose() + r * Hh;
      Eigen::SelfAdjointEigenSolver<Mat2> es(hess);
      if (es.eigenvalues().minCoeff() <= 1e-8)
        throw Error(ErrorKind::AmbiguousProjection, "graph projection near a focal point");
      const Vec2 step = hess.ldlt().solve(grad);
      uv -= step;
      if (step.norm() <= 1e-12 * (1.0 + uv.norm()))
        return Vec3(uv.x(), uv.y(), height(uv.x(), uv.y()));
    }
    throw Error(ErrorKind::NoConvergence, "graph projection did not converge in 50 iterations");
  }

  SurfaceKind kind_;
  int sign_;
  Vec3 center_ = Vec3::Zero();
  Vec3 axis_ = Vec3::UnitZ();
  double radius_ = 0.0;
  double minor_ = 0.0;
  std::array<double, 6> coeffs_{};
  double scale_ = 1.0;
};

enum class ChartKind { planar, spherical, toroidal, graph, orthographic };

/// Local coordinates (y1, y2) -> surface around a centre point.
///
/// Charts are oriented: a_1 x a_2 points along the surface normal, so that
/// J = sqrt(a) det M holds with the sign of the oriented area ratio.
class Chart {
 public:
  Chart(const Surface& surface, const Vec3& center) : surface_(surface), center_(center) {
    build_frame();
    const Mat32 A = raw_basis(raw_center_);
    flip_ = A.col(0).cross(A.col(1)).dot(surface_.extended_normal(center_)) < 0.0;
  }

  ChartKind kind() const { return kind_; }
  const Vec3& center() const { return center_; }
  Vec2 center_params() const { return unflip(raw_center_); }

  Vec3 param_map(const Vec2& q) const { return raw_map(unflip(q)); }

  std::optional<Vec2> try_inverse(const Vec3& y) const {
    auto q = raw_inverse(y);
    if (!q) return std::nullopt;
    return unflip(*q);
  }

  Vec2 inverse_map(const Vec3& y) const {
    auto q = try_inverse(y);
    if (!q) throw Error(ErrorKind::ChartSpanFailure, "point outside the chart domain");
    return *q;
  }

  /// Columns a_1, a_2.
  Mat32 covariant_basis(const Vec2& q) const {
    Mat32 A = raw_basis(unflip(q));
    if (flip_) A.col(0).swap(A.col(1));
    return A;
  }

  Mat2 metric(const Vec2& q) const {
    const Mat32 A = covariant_basis(q);
    return A.transpose() * A;
  }

  double sqrt_a(const Vec2& q) const { return std::sqrt(metric(q).determinant()); }

  /// Columns a^1, a^2 with a^alpha . a_beta = delta.
  Mat32 contravariant_basis(const Vec2& q) const {
    const Mat32 A = covariant_basis(q);
    return A * (A.transpose() * A).inverse();
  }

 private:
  static constexpr double kPoleMargin = 0.05;

  Vec2 unflip(const Vec2& q) const { return flip_ ? Vec2(q.y(), q.x()) : q; }

  static Vec3 perpendicular(const Vec3& m) {
    const Vec3 pick = std::abs(m.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    return m.cross(pick).normalized();
  }

  static double wrap(double a) {
    constexpr double pi = std::numbers::pi;
    while (a > pi) a -= 2 * pi;
    while (a <= -pi) a += 2 * pi;
    return a;
  }

  void build_frame() {
    switch (surface_.kind()) {
      case SurfaceKind::plane: {
        kind_ = ChartKind::planar;
        const Vec3 n = surface_.axis();
        const Vec3 pick = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
        e1_ = (pick - pick.dot(n) * n).normalized();
        e2_ = n.cross(e1_);
        const Vec3 d = center_ - surface_.center();
        raw_center_ = Vec2(d.dot(e1_), d.dot(e2_));
        break;
      }
      case SurfaceKind::sphere: {
        kind_ = ChartKind::spherical;
        m_ = (center_ - surface_.center()).normalized();
        k_ = perpendicular(m_);
        l_ = k_.cross(m_);
        raw_center_ = Vec2(std::numbers::pi / 2, 0.0);
        break;
      }
      case SurfaceKind::torus: {
        kind_ = ChartKind::toroidal;
        const Vec3 x = center_ - surface_.center();
        const double rho = std::hypot(x.x(), x.y());
        raw_center_ = Vec2(std::atan2(-x.z(), rho - surface_.radius()), std::atan2(x.y(), x.x()));
        break;
      }
      case SurfaceKind::graph: {
        kind_ = ChartKind::graph;
        raw_center_ = center_.head<2>();
        break;
      }
      case SurfaceKind::ellipsoid: {
        kind_ = ChartKind::orthographic;
        m_ = surface_.implicit_gradient(center_).normalized();
        e1_ = perpendicular(m_);
        e2_ = m_.cross(e1_);
        raw_center_ = Vec2::Zero();
        break;
      }
    }
  }

  Vec3 raw_map(const Vec2& q) const {
    switch (kind_) {
      case ChartKind::planar: return surface_.center() + q.x() * e1_ + q.y() * e2_;
      case ChartKind::spherical: {
        const double R = surface_.radius();
        const double st = std::sin(q.x()), ct = std::cos(q.x());
        return surface_.center() +
               R * (st * std::cos(q.y()) * m_ + st * std::sin(q.y()) * l_ + ct * k_);
      }
      case ChartKind::toroidal: {
        const double R = surface_.radius(), r = surface_.minor_radius();
        const double w = R + r * std::cos(q.x());
        return surface_.center() + Vec3(w * std::cos(q.y()), w * std::sin(q.y()), -r * std::sin(q.x()));
      }
      case ChartKind::graph: return Vec3(q.x(), q.y(), surface_.height(q.x(), q.y()));
      case ChartKind::orthographic: {
        const Vec3 base = center_ + q.x() * e1_ + q.y() * e2_;
        double t = 0.0;
        for (int it = 0; it < 50; ++it) {
          const Vec3 P = base + t * m_;
          const double step = surface_.implicit_value(P) / surface_.implicit_gradient(P).dot(m_);
          t -= step;
          if (std::abs(step) <= 1e-14 * surface_.scale()) break;
        }
        return base + t * m_;
      }
    }
    return center_;
  }

  std::optional<Vec2> raw_inverse(const Vec3& y) const {
    switch (kind_) {
      case ChartKind::planar: {
        const Vec3 d = y - surface_.center();
        return Vec2(d.dot(e1_), d.dot(e2_));
      }
      case ChartKind::spherical: {
        const Vec3 w = (y - surface_.center()).normalized();
        const double theta = std::acos(std::clamp(w.dot(k_), -1.0, 1.0));
        const double phi = std::atan2(w.dot(l_), w.dot(m_));
        if (theta < kPoleMargin || theta > std::numbers::pi - kPoleMargin ||
            std::abs(phi) > std::numbers::pi - kPoleMargin)
          return std::nullopt;
        return Vec2(theta, phi);
      }
      case ChartKind::toroidal: {
        const Vec3 x = y - surface_.center();
        const double rho = std::hypot(x.x(), x.y());
        const double u = raw_center_.x() + wrap(std::atan2(-x.z(), rho - surface_.radius()) - raw_center_.x());
        const double v = raw_center_.y() + wrap(std::atan2(x.y(), x.x()) - raw_center_.y());
        if (std::abs(u - raw_center_.x()) > std::numbers::pi - kPoleMargin ||
            std::abs(v - raw_center_.y()) > std::numbers::pi - kPoleMargin)
          return std::nullopt;
        return Vec2(u, v);
      }
      case ChartKind::graph: return Vec2(y.x(), y.y());
      case ChartKind::orthographic: {
        const Vec3 g = surface_.implicit_gradient(y);
        if (g.dot(m_) < 0.2 * g.norm()) return std::nullopt;
        const Vec3 d = y - center_;
        return Vec2(d.dot(e1_), d.dot(e2_));
      }
    }
    return std::nullopt;
  }

  Mat32 raw_basis(const Vec2& q) const {
    Mat32 A;
    switch (kind_) {
      case ChartKind::planar:
        A.col(0) = e1_;
        A.col(1) = e2_;
        break;
      case ChartKind::spherical: {
        const double R = surface_.radius();
        const double st = std::sin(q.x()), ct = std::cos(q.x());
        const double sp = std::sin(q.y()), cp = std::cos(q.y());
        A.col(0) = R * (ct * cp * m_ + ct * sp * l_ - st * k_);
        A.col(1) = R * st * (-sp * m_ + cp * l_);
        break;
      }
      case ChartKind::toroidal: {
        const double R = surface_.radius(), r = surface_.minor_radius();
        const double su = std::sin(q.x()), cu = std::cos(q.x());
        const double sv = std::sin(q.y()), cv = std::cos(q.y());
        A.col(0) = Vec3(-r * su * cv, -r * su * sv, -r * cu);
        A.col(1) = Vec3(-(R + r * cu) * sv, (R + r * cu) * cv, 0.0);
        break;
      }
      case ChartKind::graph: {
        const Vec2 g = surface_.height_gradient(q.x(), q.y());
        A.col(0) = Vec3(1.0, 0.0, g.x());
        A.col(1) = Vec3(0.0, 1.0, g.y());
        break;
      }
      case ChartKind::orthographic: {
        const Vec3 P = raw_map(q);
        const Vec3 g = surface_.implicit_gradient(P);
        const double gn = g.dot(m_);
        A.col(0) = e1_ - (g.dot(e1_) / gn) * m_;
        A.col(1) = e2_ - (g.dot(e2_) / gn) * m_;
        break;
      }
    }
    return A;
  }

  Surface surface_;
  Vec3 center_;
  ChartKind kind_ = ChartKind::planar;
  Vec2 raw_center_ = Vec2::Zero();
  bool flip_ = false;
  // planar/orthographic tangent frame; spherical frame (m, l, k).
  Vec3 e1_ = Vec3::UnitX(), e2_ = Vec3::UnitY();
  Vec3 m_ = Vec3::UnitZ(), l_ = Vec3::UnitX(), k_ = Vec3::UnitY();
};

inline Chart Surface::chart_at(const Vec3& y) const {
  require_on_surface(y);
  return Chart(*this, y);
}

}  // namespace membrane
