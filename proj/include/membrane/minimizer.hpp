#pragma once

// Discrete direct method: projected gradient descent on the surface with
// closest-point retraction, Armijo backtracking and step rejection for
// elements that would leave the admissible set.

#include "membrane/discretization.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace membrane {

/// Closed-form map from the reference domain onto the surface; supplies both
/// the Dirichlet data and the initial interior configuration.
using PlacementMap = std::function<Vec3(const Vec2&)>;

enum class BoundaryMapKind { identity, affine, stereographic_cap, torus_band };

inline std::string_view to_string(BoundaryMapKind k) {
  switch (k) {
    case BoundaryMapKind::identity: return "identity";
    case BoundaryMapKind::affine: return "affine";
    case BoundaryMapKind::stereographic_cap: return "stereographic_cap";
    case BoundaryMapKind::torus_band: return "torus_band";
  }
  return "unknown";
}

struct BoundaryMapSpec {
  BoundaryMapKind kind = BoundaryMapKind::identity;
  Mat2 matrix = Mat2::Identity();  // affine
  Vec2 offset = Vec2::Zero();      // affine
  double colatitude = std::numbers::pi / 3.0;  // stereographic_cap: boundary circle
  Vec2 tube_angles{-0.5, 0.5};  // torus_band: range of the tube angle
  Vec2 axis_angles{0.0, 1.0};   // torus_band: range of the angle about the axis

  bool operator==(const BoundaryMapSpec&) const = default;
};

/// Builds the closed-form placement for `spec` on `surface`, scaled to the
/// extent of `mesh`.
inline PlacementMap make_placement(const BoundaryMapSpec& spec, const Surface& surface, const TriMesh& mesh) {
  switch (spec.kind) {
    case BoundaryMapKind::identity:
    case BoundaryMapKind::affine: {
      if (surface.kind() != SurfaceKind::plane)
        throw Error(ErrorKind::InvalidArgument, "identity/affine placements need a plane surface");
      const Chart chart = surface.chart_at(surface.center());
      const Mat2 A = spec.kind == BoundaryMapKind::affine ? spec.matrix : Mat2::Identity();
      const Vec2 b = spec.kind == BoundaryMapKind::affine ? spec.offset : Vec2::Zero();
      return [chart, A, b](const Vec2& x) { return chart.param_map(A * x + b); };
    }
    case BoundaryMapKind::stereographic_cap: {
      if (surface.kind() != SurfaceKind::sphere)
        throw Error(ErrorKind::InvalidArgument, "stereographic_cap needs a sphere surface");
      if (!(spec.colatitude > 0.0 && spec.colatitude < std::numbers::pi))
        throw Error(ErrorKind::InvalidArgument, "cap colatitude must lie in (0, pi)");
      const double extent = mesh.max_radius();
      const double k = std::tan(0.5 * spec.colatitude) / extent;
      const Vec3 c = surface.center();
      const double R = surface.radius();
      const bool swap = surface.orientation_sign() < 0;
      // Inverse stereographic projection from the south pole; |x| = extent
      // lands on the requested colatitude.
      return [c, R, k, swap](const Vec2& x) {
        Vec2 xi = k * x;
        if (swap) xi = Vec2(xi.y(), xi.x());
        const double s = xi.squaredNorm();
        return Vec3(c + R * Vec3(2 * xi.x(), 2 * xi.y(), 1 - s) / (1 + s));
      };
    }
    case BoundaryMapKind::torus_band: {
      if (surface.kind() != SurfaceKind::torus)
        throw Error(ErrorKind::InvalidArgument, "torus_band needs a torus surface");
      Vec2 lo = mesh.vertices().front(), hi = lo;
      for (const auto& v : mesh.vertices()) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
      const Vec3 c = surface.center();
      const double R = surface.radius(), r = surface.minor_radius();
      const Vec2 tube = spec.tube_angles, axis = spec.axis_angles;
      const auto at = [=](double u, double v) {
        const double w = R + r * std::cos(u);
        return Vec3(c + Vec3(w * std::cos(v), w * std::sin(v), -r * std::sin(u)));
      };
      // x1 drives the tube angle and x2 the axial angle; the roles swap when
      // that would reverse the orientation.
      const auto a_u = Vec3(0, 0, -r);
      const auto a_v = Vec3(0, R + r, 0);
      const double orient = (tube.y() - tube.x()) * (axis.y() - axis.x()) *
                            surface.orientation_sign() * a_u.cross(a_v).dot(Vec3::UnitX());
      const bool swap = orient < 0.0;
      return [=](const Vec2& x) {
        Vec2 s = (x - lo).cwiseQuotient(hi - lo);
        if (swap) s = Vec2(s.y(), s.x());
        return at(tube.x() + s.x() * (tube.y() - tube.x()), axis.x() + s.y() * (axis.y() - axis.x()));
      };
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown placement kind");
}

struct MinimizeOptions {
  int max_iter = 5000;
  double grad_tol = -1.0;  // < 0: 1e-7 * |Omega|
  double armijo_c = 1e-4;
  double backtrack_ratio = 0.5;
  double initial_step = 1.0;
  double J_floor = kDefaultJFloor;
  std::uint64_t seed = 0;

  bool operator==(const MinimizeOptions&) const = default;

  void validate() const {
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw Error(ErrorKind::InvalidArgument, "armijo_c must lie in (0,1)");
    if (!(backtrack_ratio > 0.0 && backtrack_ratio < 1.0))
      throw Error(ErrorKind::InvalidArgument, "backtrack_ratio must lie in (0,1)");
    if (!(J_floor > 0.0)) throw Error(ErrorKind::InvalidArgument, "J_floor must be positive");
    if (!(initial_step > 0.0)) throw Error(ErrorKind::InvalidArgument, "initial_step must be positive");
    if (max_iter < 0) throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 0");
  }

  double effective_grad_tol(const TriMesh& mesh) const { return grad_tol > 0.0 ? grad_tol : 1e-7 * mesh.area(); }
};

enum class MinimizeStatus { converged, max_iter, infeasible_start, line_search_stall };

inline std::string_view to_string(MinimizeStatus s) {
  switch (s) {
    case MinimizeStatus::converged: return "converged";
    case MinimizeStatus::max_iter: return "max_iter";
    case MinimizeStatus::infeasible_start: return "infeasible_start";
    case MinimizeStatus::line_search_stall: return "line_search_stall";
  }
  return "unknown";
}

struct IterationRecord {
  int iteration = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double min_J = 0.0;
  double step = 0.0;
};

struct MinimizeReport {
  MinimizeStatus status = MinimizeStatus::max_iter;
  int iterations = 0;
  std::vector<double> energy_history;
  std::vector<IterationRecord> trace;
  double final_grad_norm = 0.0;
  double min_element_J = 0.0;
  double grad_tol = 0.0;
  double wall_time = 0.0;  // seconds
  std::string message;
};

struct MinimizeResult {
  Configuration config;
  MinimizeReport report;
};

/// Nodal values of f0 with feasibility checks.
inline Configuration initialize(const Surface& surface, const TriMesh& mesh, const PlacementMap& f0,
                                double J_floor = kDefaultJFloor) {
  Configuration c;
  c.positions.reserve(mesh.vertex_count());
  for (const auto& x : mesh.vertices()) {
    const Vec3 y = f0(x);
    surface.require_on_surface(y);
    c.positions.push_back(y);
  }
  std::vector<int> bad;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const Mat32 F = deformation_gradient(mesh, c.positions, t);
    const Mat2 C = F.transpose() * F;
    const auto& tri = mesh.triangles()[t];
    const Vec3 centroid = (c.positions[tri[0]] + c.positions[tri[1]] + c.positions[tri[2]]) / 3.0;
    if (!(C.determinant() > 1e-28 * C.trace() * C.trace()) ||
        !(oriented_area_ratio(surface, F, centroid) > J_floor))
      bad.push_back(static_cast<int>(t));
  }
  if (!bad.empty())
    throw Error(ErrorKind::InfeasibleStart,
                std::to_string(bad.size()) + " elements with J <= J_floor: " + element_list(bad));
  return c;
}

namespace detail {

struct Evaluation {
  bool feasible = false;
  double energy = 0.0;
  double min_J = 0.0;
};

inline Evaluation evaluate(const IsotropicModel& model, const Surface& surface, const TriMesh& mesh,
                           const Configuration& c, double J_floor) {
  Evaluation ev;
  std::vector<ElementState> states;
  try {
    states = element_states(model, surface, mesh, c, J_floor);
  } catch (const Error&) {
    return ev;
  }
  std::vector<double> terms(states.size());
  ev.min_J = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < states.size(); ++t) {
    ev.min_J = std::min(ev.min_J, states[t].J);
    if (states[t].degenerate) return ev;
    terms[t] = mesh.ref_area(t) * states[t].W;
  }
  ev.energy = pairwise_sum(terms);
  ev.feasible = std::isfinite(ev.energy);
  return ev;
}

// Tangential part of the gradient at free nodes; zero at boundary nodes.
inline std::vector<Vec3> tangential_gradient(const Surface& surface, const TriMesh& mesh,
                                             const Configuration& c, const std::vector<Vec3>& g) {
  std::vector<Vec3> out(g.size(), Vec3::Zero());
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!mesh.is_boundary(static_cast<int>(i))) {
      const Vec3 n = surface.extended_normal(c.positions[i]);
      out[i] = g[i] - g[i].dot(n) * n;
    }
  return out;
}

inline double squared_norm(const std::vector<Vec3>& v) {
  std::vector<double> s(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i].squaredNorm();
  return pairwise_sum(s);
}

inline double dot(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  std::vector<double> s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i].dot(b[i]);
  return pairwise_sum(s);
}

}  // namespace detail

/// Minimises the total energy from an explicit feasible starting
/// configuration whose boundary nodes hold the Dirichlet data.
inline MinimizeResult minimize_from(const IsotropicModel& model, const Surface& surface, const TriMesh& mesh,
                                    Configuration start, const MinimizeOptions& options) {
  options.validate();
  const auto t0 = std::chrono::steady_clock::now();
  MinimizeResult result;
  MinimizeReport& rep = result.report;
  rep.grad_tol = options.effective_grad_tol(mesh);

  Configuration x = std::move(start);
  auto ev = detail::evaluate(model, surface, mesh, x, options.J_floor);
  if (!ev.feasible) {
    rep.status = MinimizeStatus::infeasible_start;
    rep.message = "starting configuration has elements with J <= J_floor";
    rep.min_element_J = ev.min_J;
    result.config = std::move(x);
    return result;
  }

  auto gT = detail::tangential_gradient(surface, mesh, x, energy_gradient(model, surface, mesh, x));
  double gsq = detail::squared_norm(gT);
  rep.energy_history.push_back(ev.energy);
  rep.trace.push_back({0, ev.energy, std::sqrt(gsq), ev.min_J, 0.0});
  rep.min_element_J = ev.min_J;

  std::vector<Vec3> prev_x, prev_g;
  double alpha_prev = options.initial_step;
  rep.status = MinimizeStatus::max_iter;
  int k = 0;
  for (;; ++k) {
    if (std::sqrt(gsq) <= rep.grad_tol) {
      rep.status = MinimizeStatus::converged;
      break;
    }
    if (k >= options.max_iter) break;

    // Barzilai-Borwein trial step, alternating the long and short variants;
    // Armijo backtracking below keeps the sequence monotone.
    double alpha = options.initial_step;
    if (!prev_x.empty()) {
      std::vector<Vec3> s(x.positions.size()), yv(x.positions.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = x.positions[i] - prev_x[i];
        yv[i] = gT[i] - prev_g[i];
      }
      const double sy = detail::dot(s, yv);
      if (sy > 0.0) {
        alpha = (k % 2) ? detail::squared_norm(s) / sy : sy / detail::squared_norm(yv);
      } else {
        alpha = 2.0 * alpha_prev;
      }
      alpha = std::clamp(alpha, 1e-12, 1e12);
    }

    Configuration trial = x;
    detail::Evaluation tev;
    bool accepted = false;
    while (alpha >= 1e-16) {
      bool ok = true;
      for (std::size_t i = 0; i < x.positions.size() && ok; ++i) {
        if (mesh.is_boundary(static_cast<int>(i))) continue;
        try {
          trial.positions[i] = surface.project(x.positions[i] - alpha * gT[i]);
        } catch (const Error&) {
          ok = false;
        }
      }
      if (ok) {
        tev = detail::evaluate(model, surface, mesh, trial, options.J_floor);
        if (tev.feasible && tev.energy <= ev.energy - options.armijo_c * alpha * gsq) {
          accepted = true;
          break;
        }
      }
      alpha *= options.backtrack_ratio;
    }
    if (!accepted) {
      rep.status = MinimizeStatus::line_search_stall;
      rep.message = "step length underflowed below 1e-16";
      break;
    }

    prev_x = std::move(x.positions);
    prev_g = std::move(gT);
    x = std::move(trial);
    ev = tev;
    alpha_prev = alpha;
    gT = detail::tangential_gradient(surface, mesh, x, energy_gradient(model, surface, mesh, x));
    gsq = detail::squared_norm(gT);
    rep.energy_history.push_back(ev.energy);
    rep.trace.push_back({k + 1, ev.energy, std::sqrt(gsq), ev.min_J, alpha});
    rep.min_element_J = ev.min_J;
  }
  rep.iterations = k;
  rep.final_grad_norm = std::sqrt(gsq);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.config = std::move(x);
  return result;
}

/// initialize followed by minimize_from. Throws InfeasibleStart.
inline MinimizeResult minimize(const IsotropicModel& model, const Surface& surface, const TriMesh& mesh,
                               const PlacementMap& f0, const MinimizeOptions& options) {
  return minimize_from(model, surface, mesh, initialize(surface, mesh, f0, options.J_floor), options);
}

}  // namespace membrane
