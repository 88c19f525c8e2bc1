#pragma once

// Certificates computed on a configuration: Brouwer degree at a target
// point, a.e. injectivity by pairwise image overlap, and first-variation
// residuals in Lagrangian and Eulerian form.

#include "membrane/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace membrane {

// ---- Brouwer degree --------------------------------------------------------

struct DegreeOptions {
  double mollifier_radius = 0.0;  // <= 0: three local edge lengths
  double degree_margin = 1e-6;
  int subdivision_levels = 3;
};

struct DegreeResult {
  Vec3 target_point = Vec3::Zero();
  int signed_count = 0;
  double mollified_integral = 0.0;
  double mollifier_radius = 0.0;

  int mollified_degree() const { return static_cast<int>(std::lround(mollified_integral)); }
  bool methods_agree() const { return mollified_degree() == signed_count; }
};

namespace detail {

// integral_0^1 exp(-1/u) du = e^-1 - E1(1); the bump exp(-1/(1 - s^2)) on
// the unit disk has mass pi times this.
inline constexpr double kBumpMass = 0.148495506775922;

inline double bump(const Vec2& z, double eps) {
  const double s = z.squaredNorm() / (eps * eps);
  if (s >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s)) / (std::numbers::pi * kBumpMass * eps * eps);
}

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

// Integral of f over a triangle: `levels` uniform 4-way subdivisions, then
// the three-point degree-2 rule on each piece.
template <typename Fn>
double subdivided_integral(const Vec2& a, const Vec2& b, const Vec2& c, int levels, Fn&& f) {
  if (levels <= 0) {
    const double area = 0.5 * std::abs(cross2(b - a, c - a));
    const Vec2 q0 = (4.0 * a + b + c) / 6.0;
    const Vec2 q1 = (a + 4.0 * b + c) / 6.0;
    const Vec2 q2 = (a + b + 4.0 * c) / 6.0;
    return area * (f(q0) + f(q1) + f(q2)) / 3.0;
  }
  const Vec2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  return subdivided_integral(a, ab, ca, levels - 1, f) + subdivided_integral(ab, b, bc, levels - 1, f) +
         subdivided_integral(ca, bc, c, levels - 1, f) + subdivided_integral(ab, bc, ca, levels - 1, f);
}

}  // namespace detail

/// Degree of the configuration at an on-surface point y, computed in the
/// chart centred at y by signed cover counting and by the mollified integral.
inline DegreeResult brouwer_degree(const Surface& surface, const TriMesh& mesh, const Configuration& config,
                                   const Vec3& y, const DegreeOptions& opt = {}) {
  const Chart chart = surface.chart_at(y);
  const Vec2 c = chart.center_params();

  for (const auto& e : mesh.boundary_edges()) {
    const double d = detail::point_segment_distance(y, config.positions[e[0]], config.positions[e[1]]);
    if (d < opt.degree_margin)
      throw Error(ErrorKind::BoundaryTooClose, "target lies within " + std::to_string(d) + " of the boundary image");
  }

  std::vector<std::optional<Vec2>> q(config.positions.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = chart.try_inverse(config.positions[i]);

  DegreeResult out;
  out.target_point = y;
  constexpr double kEdgeEps = 1e-12;
  double local_edge = 0.0;
  int local_count = 0;
  double nearest = std::numeric_limits<double>::infinity();
  double nearest_edge = 0.0;

  for (const auto& tri : mesh.triangles()) {
    if (!q[tri[0]] || !q[tri[1]] || !q[tri[2]]) continue;
    const Vec2 &p0 = *q[tri[0]], &p1 = *q[tri[1]], &p2 = *q[tri[2]];
    const double det = detail::cross2(p1 - p0, p2 - p0);
    const double mean_edge = ((p1 - p0).norm() + (p2 - p1).norm() + (p0 - p2).norm()) / 3.0;
    const double dc = ((p0 + p1 + p2) / 3.0 - c).norm();
    if (dc < nearest) {
      nearest = dc;
      nearest_edge = mean_edge;
    }
    if (det == 0.0) continue;
    // Barycentric coordinates of c, normalised to be orientation free.
    const double l0 = detail::cross2(p1 - c, p2 - c) / det;
    const double l1 = detail::cross2(p2 - c, p0 - c) / det;
    const double l2 = 1.0 - l0 - l1;
    const double lmin = std::min({l0, l1, l2});
    if (lmin > kEdgeEps) {
      out.signed_count += det > 0.0 ? 1 : -1;
      local_edge += mean_edge;
      ++local_count;
    } else if (lmin >= -kEdgeEps) {
      throw Error(ErrorKind::IrregularValue, "target lies on the image of an edge");
    }
  }

  double eps = opt.mollifier_radius;
  if (!(eps > 0.0)) eps = 3.0 * (local_count > 0 ? local_edge / local_count : nearest_edge);
  out.mollifier_radius = eps;

  double total = 0.0;
  for (const auto& tri : mesh.triangles()) {
    if (!q[tri[0]] || !q[tri[1]] || !q[tri[2]]) continue;
    const Vec2 &p0 = *q[tri[0]], &p1 = *q[tri[1]], &p2 = *q[tri[2]];
    const Vec2 lo = p0.cwiseMin(p1).cwiseMin(p2), hi = p0.cwiseMax(p1).cwiseMax(p2);
    if ((lo.array() > (c.array() + eps)).any() || (hi.array() < (c.array() - eps)).any()) continue;
    const double det = detail::cross2(p1 - p0, p2 - p0);
    if (det == 0.0) continue;
    const double integral = detail::subdivided_integral(
        p0, p1, p2, opt.subdivision_levels, [&](const Vec2& z) { return detail::bump(z - c, eps); });
    total += det > 0.0 ? integral : -integral;
  }
  out.mollified_integral = total;
  return out;
}

// ---- Injectivity ------------------------------------------------------------

struct InjectivityReport {
  std::size_t pairs_tested = 0;
  std::size_t overlapping_pairs = 0;
  double overlap_area = 0.0;
  std::vector<std::array<int, 2>> chart_failures;

  /// Zero overlap area above 1e-12 and every pair covered by a chart.
  bool injective_ae() const { return overlap_area <= 1e-12 && chart_failures.empty(); }
};

namespace detail {

// Sutherland-Hodgman clip of a convex polygon by a counterclockwise triangle.
inline std::vector<Vec2> clip(std::vector<Vec2> poly, const std::array<Vec2, 3>& tri) {
  for (int e = 0; e < 3 && !poly.empty(); ++e) {
    const Vec2 a = tri[e], b = tri[(e + 1) % 3];
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 p = poly[i], r = poly[(i + 1) % poly.size()];
      const double sp = cross2(b - a, p - a), sr = cross2(b - a, r - a);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sr >= 0.0)) out.push_back(p + (r - p) * (sp / (sp - sr)));
    }
    poly = std::move(out);
  }
  return poly;
}

inline double polygon_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

inline std::array<Vec2, 3> ccw(std::array<Vec2, 3> t) {
  if (cross2(t[1] - t[0], t[2] - t[0]) < 0.0) std::swap(t[1], t[2]);
  return t;
}

}  // namespace detail

/// Area of the intersection of two planar triangles (any orientation).
inline double triangle_overlap_area(const std::array<Vec2, 3>& a, const std::array<Vec2, 3>& b) {
  const auto A = detail::ccw(a), B = detail::ccw(b);
  return std::max(0.0, detail::polygon_area(detail::clip({A[0], A[1], A[2]}, B)));
}

/// Pairwise overlap of image triangles that do not share an edge, measured
/// in a chart centred on the first triangle's projected centroid and scaled
/// to surface area by sqrt(a) there.
inline InjectivityReport injectivity_check(const Surface& surface, const TriMesh& mesh, const Configuration& config) {
  const std::size_t nt = mesh.triangle_count();
  struct Box {
    Vec3 lo, hi;
  };
  std::vector<Box> box(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles()[t];
    const Vec3 &a = config.positions[tri[0]], &b = config.positions[tri[1]], &c = config.positions[tri[2]];
    box[t] = {a.cwiseMin(b).cwiseMin(c), a.cwiseMax(b).cwiseMax(c)};
  }
  std::vector<std::size_t> order(nt);
  for (std::size_t t = 0; t < nt; ++t) order[t] = t;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return box[a].lo.x() < box[b].lo.x() || (box[a].lo.x() == box[b].lo.x() && a < b);
  });

  std::vector<std::array<std::size_t, 2>> candidates;
  for (std::size_t i = 0; i < nt; ++i) {
    const std::size_t s = order[i];
    for (std::size_t j = i + 1; j < nt; ++j) {
      const std::size_t t = order[j];
      if (box[t].lo.x() > box[s].hi.x()) break;
      if ((box[t].lo.array() > box[s].hi.array()).any() || (box[s].lo.array() > box[t].hi.array()).any()) continue;
      if (mesh.share_edge(s, t)) continue;
      candidates.push_back({std::min(s, t), std::max(s, t)});
    }
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<double> area(candidates.size(), 0.0);
  std::vector<char> failed(candidates.size(), 0);
  parallel_for(candidates.size(), [&](std::size_t k) {
    const auto [s, t] = candidates[k];
    const auto& ts = mesh.triangles()[s];
    const auto& tt = mesh.triangles()[t];
    const Vec3 centroid = (config.positions[ts[0]] + config.positions[ts[1]] + config.positions[ts[2]]) / 3.0;
    try {
      const Chart chart = surface.chart_at(surface.project(centroid));
      std::array<Vec2, 3> a, b;
      for (int i = 0; i < 3; ++i) {
        auto qa = chart.try_inverse(config.positions[ts[i]]);
        auto qb = chart.try_inverse(config.positions[tt[i]]);
        if (!qa || !qb) {
          failed[k] = 1;
          return;
        }
        a[i] = *qa;
        b[i] = *qb;
      }
      area[k] = triangle_overlap_area(a, b) * chart.sqrt_a(chart.center_params());
    } catch (const Error&) {
      failed[k] = 1;
    }
  });

  InjectivityReport rep;
  rep.pairs_tested = candidates.size();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (failed[k]) {
      rep.chart_failures.push_back({static_cast<int>(candidates[k][0]), static_cast<int>(candidates[k][1])});
      continue;
    }
    if (area[k] > 1e-14) {
      ++rep.overlapping_pairs;
      rep.overlap_area += area[k];
    }
  }
  return rep;
}

/// Sum of the flat image-triangle areas.
inline double image_area(const TriMesh& mesh, const Configuration& config) {
  std::vector<double> a(mesh.triangle_count());
  for (std::size_t t = 0; t < a.size(); ++t) {
    const Mat32 F = deformation_gradient(mesh, config.positions, t);
    a[t] = mesh.ref_area(t) * F.col(0).cross(F.col(1)).norm();
  }
  return pairwise_sum(a);
}

// ---- First variation ------------------------------------------------------

/// psi(p) = beta(p) (v - (v.n) n), with beta = (1 - |p - c|^2 / rho^2)^2
/// inside the ball of radius rho about c and n the extended surface normal.
struct TestField {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  Vec3 direction = Vec3::UnitX();

  Vec3 value(const Surface& s, const Vec3& p) const {
    const double u = 1.0 - (p - center).squaredNorm() / (radius * radius);
    if (u <= 0.0) return Vec3::Zero();
    const Vec3 n = s.extended_normal(p);
    return u * u * (direction - direction.dot(n) * n);
  }

  /// D psi(p), 3x3.
  Mat3 jacobian(const Surface& s, const Vec3& p) const {
    const double u = 1.0 - (p - center).squaredNorm() / (radius * radius);
    if (u <= 0.0) return Mat3::Zero();
    const double beta = u * u;
    const Vec3 grad_beta = 2.0 * u * (-2.0 / (radius * radius)) * (p - center);
    const Vec3 n = s.extended_normal(p);
    const Mat3 Dn = s.extended_normal_jacobian(p);
    const double vn = direction.dot(n);
    const Vec3 vt = direction - vn * n;
    // D[(v.n) n] = n (Dn^T v)^T + (v.n) Dn
    return vt * grad_beta.transpose() - beta * (n * (Dn.transpose() * direction).transpose() + vn * Dn);
  }
};

enum class ResidualQuadrature {
  /// Nodal interpolation of psi o f; the discrete analogue of the variation
  /// f + tau psi(f) and consistent with the nodal energy gradient.
  interpolated,
  /// Analytic D psi at three points per element.
  pointwise,
};

struct ResidualResult {
  int test_field_id = 0;
  TestField field;
  double lagrangian_residual = 0.0;
  double eulerian_residual = 0.0;
  double normalization = 0.0;  // l2 norm of nodal psi values
  bool admissible = false;     // f_tau has J > 0 for tau = +-1e-3

  double normalized() const { return normalization > 0.0 ? std::abs(lagrangian_residual) / normalization : 0.0; }
};

/// Builds the deterministic family: ceil(n/3) cutoffs centred on images of
/// random interior vertices, times 3 random directions.
inline std::vector<TestField> make_test_fields(const TriMesh& mesh, const Configuration& config, int family_size,
                                               std::uint64_t seed) {
  std::vector<int> interior;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
    if (!mesh.is_boundary(static_cast<int>(v))) interior.push_back(static_cast<int>(v));
  if (interior.empty()) throw Error(ErrorKind::InvalidArgument, "mesh has no interior vertices");
  constexpr int kDirections = 3;
  auto rng = substream(seed, 0);
  std::vector<Vec3> dirs;
  for (int d = 0; d < kDirections; ++d) dirs.emplace_back(gaussian(rng), gaussian(rng), gaussian(rng));
  const int cutoffs = (family_size + kDirections - 1) / kDirections;
  std::vector<std::pair<Vec3, double>> balls;
  for (int k = 0; k < cutoffs; ++k) {
    const int v = interior[static_cast<std::size_t>(uniform01(rng) * interior.size()) % interior.size()];
    const Vec3 c = config.positions[v];
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& e : mesh.boundary_edges())
      dist = std::min(dist, detail::point_segment_distance(c, config.positions[e[0]], config.positions[e[1]]));
    balls.emplace_back(c, 0.9 * dist);
  }
  std::vector<TestField> out;
  for (int k = 0; k < family_size; ++k) {
    const auto& [c, rho] = balls[k / kDirections];
    out.push_back({c, rho, dirs[k % kDirections]});
  }
  return out;
}

/// Lagrangian  sum_t |t| S : grad(psi o f)  and Eulerian  sum_t |f(t)| Sigma : D psi
/// for each test field. Both are the same sum under the change of variables
/// on the flat image triangles.
inline ResidualResult evaluate_residual(const IsotropicModel& model, const Surface& surface, const TriMesh& mesh,
                                        const Configuration& config, const TestField& field,
                                        ResidualQuadrature quad = ResidualQuadrature::interpolated) {
  const std::size_t nt = mesh.triangle_count();
  std::vector<Vec3> psi(config.positions.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = field.value(surface, config.positions[i]);

  std::vector<double> lag(nt), eul(nt);
  parallel_for(nt, [&](std::size_t t) {
    const Mat32 F = deformation_gradient(mesh, config.positions, t);
    const StretchPair sp = stretches(F);
    const StressState st = pk1_stress(model, F);
    const double A = mesh.ref_area(t);
    const double Jarea = sp.area_ratio();
    if (quad == ResidualQuadrature::interpolated) {
      const auto& tri = mesh.triangles()[t];
      const auto& g = mesh.shape_gradients(t);
      Mat32 G = Mat32::Zero();
      for (int i = 0; i < 3; ++i) G += psi[tri[i]] * g[i].transpose();
      const Mat23 Fplus = (F.transpose() * F).inverse() * F.transpose();
      lag[t] = A * (st.pk1.cwiseProduct(G)).sum();
      eul[t] = A * Jarea * (st.cauchy.cwiseProduct(G * Fplus)).sum();
    } else {
      const auto& tri = mesh.triangles()[t];
      static const std::array<Vec3, 3> bary = {Vec3(4, 1, 1) / 6.0, Vec3(1, 4, 1) / 6.0, Vec3(1, 1, 4) / 6.0};
      double l = 0.0, e = 0.0;
      for (const auto& w : bary) {
        const Vec3 yq = w[0] * config.positions[tri[0]] + w[1] * config.positions[tri[1]] + w[2] * config.positions[tri[2]];
        const Mat3 D = field.jacobian(surface, yq);
        l += (st.pk1.cwiseProduct(D * F)).sum() / 3.0;
        e += (st.cauchy.cwiseProduct(D)).sum() / 3.0;
      }
      lag[t] = A * l;
      eul[t] = A * Jarea * e;
    }
  });

  ResidualResult r;
  r.field = field;
  r.lagrangian_residual = pairwise_sum(lag);
  r.eulerian_residual = pairwise_sum(eul);
  std::vector<double> sq(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) sq[i] = psi[i].squaredNorm();
  r.normalization = std::sqrt(pairwise_sum(sq));

  r.admissible = true;
  for (double tau : {1e-3, -1e-3}) {
    Configuration moved = config;
    try {
      for (std::size_t i = 0; i < psi.size(); ++i)
        if (psi[i].squaredNorm() > 0.0) moved.positions[i] = surface.project(config.positions[i] + tau * psi[i]);
      for (std::size_t t = 0; t < nt && r.admissible; ++t) {
        const auto& tri = mesh.triangles()[t];
        const Mat32 F = deformation_gradient(mesh, moved.positions, t);
        const Vec3 c = (moved.positions[tri[0]] + moved.positions[tri[1]] + moved.positions[tri[2]]) / 3.0;
        if (!(oriented_area_ratio(surface, F, c) > 0.0)) r.admissible = false;
      }
    } catch (const Error&) {
      r.admissible = false;
    }
  }
  return r;
}

inline std::vector<ResidualResult> first_variation_residual(const IsotropicModel& model, const Surface& surface,
                                                            const TriMesh& mesh, const Configuration& config,
                                                            int family_size = 12, std::uint64_t seed = 0,
                                                            ResidualQuadrature quad = ResidualQuadrature::interpolated) {
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Mat32 F = deformation_gradient(mesh, config.positions, t);
    const Vec3 c = (config.positions[tri[0]] + config.positions[tri[1]] + config.positions[tri[2]]) / 3.0;
    if (!(oriented_area_ratio(surface, F, c) > 0.0))
      throw Error(ErrorKind::NegativeJ, "residual needs a feasible configuration (element " + std::to_string(t) + ")");
  }
  const auto fields = make_test_fields(mesh, config, family_size, seed);
  std::vector<ResidualResult> out;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    out.push_back(evaluate_residual(model, surface, mesh, config, fields[k], quad));
    out.back().test_field_id = static_cast<int>(k);
  }
  return out;
}

}  // namespace membrane
