#pragma once

// Piecewise-linear configurations on the target surface: element kinematics,
// total energy and its nodal gradient.

#include "membrane/constitutive.hpp"
#include "membrane/geometry.hpp"
#include "membrane/mesh.hpp"
#include "membrane/parallel.hpp"

#include <limits>
#include <span>
#include <vector>

namespace membrane {

/// Nodal images of the reference vertices.
struct Configuration {
  std::vector<Vec3> positions;
};

struct ElementState {
  Mat32 F = Mat32::Zero();
  double J = 0.0;  // oriented area ratio n . (F e1 x F e2)
  double W = std::numeric_limits<double>::quiet_NaN();
  Vec3 centroid_image = Vec3::Zero();
  bool degenerate = false;  // J <= J_floor
};

inline constexpr double kDefaultJFloor = 1e-8;

/// F = sum_i y_i (x) g_i for the linear interpolant on triangle t.
inline Mat32 deformation_gradient(const TriMesh& mesh, std::span<const Vec3> y, std::size_t t) {
  const auto& tri = mesh.triangles()[t];
  const auto& g = mesh.shape_gradients(t);
  Mat32 F = Mat32::Zero();
  for (int i = 0; i < 3; ++i) F += y[tri[i]] * g[i].transpose();
  return F;
}

/// Oriented area ratio with the normal evaluated at the projected centroid.
inline double oriented_area_ratio(const Surface& surface, const Mat32& F, const Vec3& centroid) {
  Vec3 n;
  try {
    n = surface.extended_normal(surface.project(centroid));
  } catch (const Error&) {
    n = surface.extended_normal(centroid);
  }
  return n.dot(F.col(0).cross(F.col(1)));
}

/// Kinematics and energy density of one element. Throws DegenerateElement
/// when det(F^T F) vanishes; J <= J_floor is flagged, not thrown.
inline ElementState element_gradient(const IsotropicModel& model, const Surface& surface,
                                     const TriMesh& mesh, const Configuration& config, std::size_t t,
                                     double J_floor = kDefaultJFloor) {
  const auto& tri = mesh.triangles()[t];
  ElementState e;
  e.F = deformation_gradient(mesh, config.positions, t);
  e.centroid_image = (config.positions[tri[0]] + config.positions[tri[1]] + config.positions[tri[2]]) / 3.0;
  const Mat2 C = e.F.transpose() * e.F;
  const double tr = C.trace();
  if (!(C.determinant() > 1e-28 * tr * tr))
    throw Error(ErrorKind::DegenerateElement, "element " + std::to_string(t) + " is degenerate");
  e.J = oriented_area_ratio(surface, e.F, e.centroid_image);
  e.degenerate = !(e.J > J_floor);
  if (e.J > 0.0) e.W = energy_density(model, e.F);
  return e;
}

/// All element states, evaluated in parallel.
inline std::vector<ElementState> element_states(const IsotropicModel& model, const Surface& surface,
                                                const TriMesh& mesh, const Configuration& config,
                                                double J_floor = kDefaultJFloor) {
  std::vector<ElementState> out(mesh.triangle_count());
  std::vector<std::string> failures(mesh.triangle_count());
  parallel_for(mesh.triangle_count(), [&](std::size_t t) {
    try {
      out[t] = element_gradient(model, surface, mesh, config, t, J_floor);
    } catch (const Error& e) {
      failures[t] = e.what();
    }
  });
  for (const auto& f : failures)
    if (!f.empty()) throw Error(ErrorKind::DegenerateElement, f);
  return out;
}

inline std::string element_list(const std::vector<int>& ids) {
  std::string s;
  for (std::size_t k = 0; k < ids.size() && k < 20; ++k) s += (k ? "," : "") + std::to_string(ids[k]);
  if (ids.size() > 20) s += ",...";
  return s;
}

/// E = sum_t |t| W(F_t). Throws NegativeJ listing the offending elements.
inline double total_energy(const IsotropicModel& model, const Surface& surface, const TriMesh& mesh,
                           const Configuration& config) {
  const auto states = element_states(model, surface, mesh, config);
  std::vector<int> bad;
  std::vector<double> terms(states.size());
  for (std::size_t t = 0; t < states.size(); ++t) {
    if (!(states[t].J > 0.0)) bad.push_back(static_cast<int>(t));
    terms[t] = mesh.ref_area(t) * states[t].W;
  }
  if (!bad.empty()) throw Error(ErrorKind::NegativeJ, "elements with J <= 0: " + element_list(bad));
  return pairwise_sum(terms);
}

/// dE/dy_i = sum_t |t| S_t g_i. W depends on F alone when J > 0, so the
/// centroid normal contributes nothing to the derivative.
inline std::vector<Vec3> energy_gradient(const IsotropicModel& model, const Surface& surface,
                                         const TriMesh& mesh, const Configuration& config) {
  const std::size_t nt = mesh.triangle_count();
  std::vector<std::array<Vec3, 3>> local(nt);
  std::vector<char> bad(nt, 0);
  parallel_for(nt, [&](std::size_t t) {
    const Mat32 F = deformation_gradient(mesh, config.positions, t);
    const auto& tri = mesh.triangles()[t];
    const Vec3 c = (config.positions[tri[0]] + config.positions[tri[1]] + config.positions[tri[2]]) / 3.0;
    try {
      if (!(oriented_area_ratio(surface, F, c) > 0.0)) {
        bad[t] = 1;
        return;
      }
      const Mat32 S = pk1_stress(model, F).pk1;
      const auto& g = mesh.shape_gradients(t);
      for (int i = 0; i < 3; ++i) local[t][i] = mesh.ref_area(t) * (S * g[i]);
    } catch (const Error&) {
      bad[t] = 1;
    }
  });
  std::vector<int> ids;
  for (std::size_t t = 0; t < nt; ++t)
    if (bad[t]) ids.push_back(static_cast<int>(t));
  if (!ids.empty()) throw Error(ErrorKind::NegativeJ, "elements with J <= 0: " + element_list(ids));
  std::vector<Vec3> grad(mesh.vertex_count(), Vec3::Zero());
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i) grad[tri[i]] += local[t][i];
  }
  return grad;
}

}  // namespace membrane
