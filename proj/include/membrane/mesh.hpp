#pragma once

// Reference triangulations of the planar domain and a Wavefront-style
// text format for reference and deformed meshes.

#include "membrane/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace membrane {

using Triangle = std::array<int, 3>;

/// Counterclockwise triangulation of a planar domain with per-element
/// reference areas and P1 shape-function gradients.
class TriMesh {
 public:
  static constexpr double kAreaTol = 1e-14;

  TriMesh() = default;

  TriMesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles)
      : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    const int nv = static_cast<int>(vertices_.size());
    areas_.reserve(triangles_.size());
    gradients_.reserve(triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      const auto& tri = triangles_[t];
      for (int i : tri)
        if (i < 0 || i >= nv) throw Error(ErrorKind::InvalidArgument, "triangle index out of range");
      const Vec2& x0 = vertices_[tri[0]];
      const Vec2& x1 = vertices_[tri[1]];
      const Vec2& x2 = vertices_[tri[2]];
      const double twice = (x1 - x0).x() * (x2 - x0).y() - (x1 - x0).y() * (x2 - x0).x();
      if (!(0.5 * twice >= kAreaTol))
        throw Error(ErrorKind::InvalidArgument,
                    "triangle " + std::to_string(t) + " has non-positive reference area");
      areas_.push_back(0.5 * twice);
      std::array<Vec2, 3> g;
      for (int i = 0; i < 3; ++i) {
        const Vec2& a = vertices_[tri[(i + 1) % 3]];
        const Vec2& b = vertices_[tri[(i + 2) % 3]];
        g[i] = Vec2(a.y() - b.y(), b.x() - a.x()) / twice;
      }
      gradients_.push_back(g);
    }
    find_boundary();
  }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  double ref_area(std::size_t t) const { return areas_[t]; }
  const std::array<Vec2, 3>& shape_gradients(std::size_t t) const { return gradients_[t]; }

  double area() const {
    double a = 0.0;
    for (double x : areas_) a += x;
    return a;
  }

  const std::vector<int>& boundary_vertices() const { return boundary_vertices_; }
  bool is_boundary(int v) const { return on_boundary_[v] != 0; }

  /// Boundary edges oriented as they appear in their (counterclockwise) triangle.
  const std::vector<std::array<int, 2>>& boundary_edges() const { return boundary_edges_; }

  std::size_t edge_count() const { return edge_count_; }

  /// Triangles sharing an edge with t.
  bool share_edge(std::size_t s, std::size_t t) const {
    int common = 0;
    for (int a : triangles_[s])
      for (int b : triangles_[t]) common += (a == b);
    return common >= 2;
  }

  /// Longest reference edge.
  double max_edge_length() const {
    double h = 0.0;
    for (const auto& tri : triangles_)
      for (int i = 0; i < 3; ++i)
        h = std::max(h, (vertices_[tri[i]] - vertices_[tri[(i + 1) % 3]]).norm());
    return h;
  }

  /// Largest |x| over the vertices.
  double max_radius() const {
    double r = 0.0;
    for (const auto& v : vertices_) r = std::max(r, v.norm());
    return r;
  }

 private:
  void find_boundary() {
    std::map<std::pair<int, int>, std::pair<int, std::array<int, 2>>> edges;
    for (const auto& tri : triangles_) {
      for (int i = 0; i < 3; ++i) {
        const int a = tri[i], b = tri[(i + 1) % 3];
        auto& e = edges[{std::min(a, b), std::max(a, b)}];
        ++e.first;
        e.second = {a, b};
      }
    }
    edge_count_ = edges.size();
    on_boundary_.assign(vertices_.size(), 0);
    for (const auto& [key, val] : edges) {
      if (val.first > 2) throw Error(ErrorKind::InvalidArgument, "non-manifold edge in mesh");
      if (val.first == 1) {
        boundary_edges_.push_back(val.second);
        on_boundary_[key.first] = on_boundary_[key.second] = 1;
      }
    }
    for (std::size_t v = 0; v < vertices_.size(); ++v)
      if (on_boundary_[v]) boundary_vertices_.push_back(static_cast<int>(v));
  }

  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<double> areas_;
  std::vector<std::array<Vec2, 3>> gradients_;
  std::vector<int> boundary_vertices_;
  std::vector<char> on_boundary_;
  std::vector<std::array<int, 2>> boundary_edges_;
  std::size_t edge_count_ = 0;
};

enum class DomainKind { unit_square, disk, annulus };

inline std::string_view to_string(DomainKind k) {
  switch (k) {
    case DomainKind::unit_square: return "unit_square";
    case DomainKind::disk: return "disk";
    case DomainKind::annulus: return "annulus";
  }
  return "unknown";
}

struct DomainSpec {
  DomainKind kind = DomainKind::unit_square;
  double resolution = 0.1;  // target edge length
  double radius = 1.0;        // disk
  double inner_radius = 0.5;  // annulus
  double outer_radius = 1.0;  // annulus

  bool operator==(const DomainSpec&) const = default;
};

namespace detail {

// Vertex count on a circle of radius rho: edge length about h, and for
// boundary circles a chord sagitta of at most h^2/8.
inline int ring_count(double rho, double h, bool boundary) {
  int n = std::max(6, static_cast<int>(std::ceil(2.0 * std::numbers::pi * rho / h - 1e-9)));
  if (boundary) {
    const double c = 1.0 - h * h / (8.0 * rho);
    if (c > -1.0) {
      const int need = static_cast<int>(std::ceil(std::numbers::pi / std::acos(c) - 1e-9));
      n = std::max(n, need);
    }
  }
  return n;
}

// Triangulates the band between two concentric rings by merging their
// vertices in angular order.
inline void stitch_rings(const std::vector<int>& inner, const std::vector<double>& inner_angles,
                         const std::vector<int>& outer, const std::vector<double>& outer_angles,
                         std::vector<Triangle>& out) {
  const std::size_t na = inner.size(), nb = outer.size();
  std::size_t i = 0, j = 0;
  const auto angle = [](const std::vector<double>& a, std::size_t k) {
    const std::size_t n = a.size();
    return a[k % n] + 2.0 * std::numbers::pi * static_cast<double>(k / n);
  };
  while (i < na || j < nb) {
    const bool advance_inner = j >= nb || (i < na && angle(inner_angles, i + 1) < angle(outer_angles, j + 1));
    if (advance_inner) {
      out.push_back({inner[i % na], outer[j % nb], inner[(i + 1) % na]});
      ++i;
    } else {
      out.push_back({inner[i % na], outer[j % nb], outer[(j + 1) % nb]});
      ++j;
    }
  }
}

}  // namespace detail

inline TriMesh build_mesh(const DomainSpec& d) {
  if (!(d.resolution > 0.0)) throw Error(ErrorKind::InvalidArgument, "resolution must be positive");
  std::vector<Vec2> verts;
  std::vector<Triangle> tris;
  const double h = d.resolution;

  switch (d.kind) {
    case DomainKind::unit_square: {
      const int n = std::max(1, static_cast<int>(std::lround(1.0 / h)));
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) verts.emplace_back(double(i) / n, double(j) / n);
      const auto id = [n](int i, int j) { return j * (n + 1) + i; };
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
          tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
      }
      break;
    }
    case DomainKind::disk:
    case DomainKind::annulus: {
      const bool disk = d.kind == DomainKind::disk;
      const double r0 = disk ? 0.0 : d.inner_radius;
      const double r1 = disk ? d.radius : d.outer_radius;
      if (!(r1 > r0) || r0 < 0.0) throw Error(ErrorKind::InvalidArgument, "invalid domain radii");
      const int m = std::max(1, static_cast<int>(std::ceil((r1 - r0) / h - 1e-9)));
      std::vector<int> prev;
      std::vector<double> prev_angles;
      int first_ring = 0;
      if (disk) {
        verts.emplace_back(0.0, 0.0);
        first_ring = 1;
      }
      for (int k = first_ring; k <= m; ++k) {
        const double rho = r0 + (r1 - r0) * k / m;
        const bool boundary = k == m || (!disk && k == 0);
        const int n = detail::ring_count(rho, h, boundary);
        std::vector<int> ring;
        std::vector<double> angles;
        // Stagger alternate rings by half a step.
        const double offset = (k % 2) ? 0.0 : std::numbers::pi / n;
        for (int s = 0; s < n; ++s) {
          const double a = offset + 2.0 * std::numbers::pi * s / n;
          ring.push_back(static_cast<int>(verts.size()));
          angles.push_back(a);
          verts.emplace_back(rho * std::cos(a), rho * std::sin(a));
        }
        if (disk && k == 1) {
          for (int s = 0; s < n; ++s) tris.push_back({0, ring[s], ring[(s + 1) % n]});
        } else if (!prev.empty()) {
          detail::stitch_rings(prev, prev_angles, ring, angles, tris);
        }
        prev = std::move(ring);
        prev_angles = std::move(angles);
      }
      break;
    }
  }
  return TriMesh(std::move(verts), std::move(tris));
}

// ---- Wavefront-style text ------------------------------------------------

/// Writes v/f records (1-based indices), preceded by `# ` comment lines.
inline void write_obj(std::ostream& os, const std::vector<Vec3>& positions,
                      const std::vector<Triangle>& triangles,
                      const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) os << "# " << c << '\n';
  char buf[128];
  for (const auto& p : positions) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    os << buf;
  }
  for (const auto& t : triangles) os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline void write_obj(const std::string& path, const std::vector<Vec3>& positions,
                      const std::vector<Triangle>& triangles,
                      const std::vector<std::string>& comments = {}) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  write_obj(os, positions, triangles, comments);
}

struct ObjData {
  std::vector<Vec3> positions;
  std::vector<Triangle> triangles;
};

/// Reads v and f records; other records and comments are ignored. Face
/// entries of the form i/j/k use the vertex index only.
inline ObjData read_obj(std::istream& is) {
  ObjData data;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z()))
        throw Error(ErrorKind::IoError, "line " + std::to_string(lineno) + ": malformed vertex");
      data.positions.push_back(p);
    } else if (tag == "f") {
      Triangle t;
      for (int k = 0; k < 3; ++k) {
        std::string tok;
        if (!(ls >> tok))
          throw Error(ErrorKind::IoError, "line " + std::to_string(lineno) + ": face needs 3 vertices");
        t[k] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
      }
      std::string extra;
      if (ls >> extra)
        throw Error(ErrorKind::IoError, "line " + std::to_string(lineno) + ": only triangles are supported");
      data.triangles.push_back(t);
    }
  }
  return data;
}

inline ObjData read_obj(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::IoError, "cannot open " + path);
  return read_obj(is);
}

/// Reference mesh from v/f records; z coordinates are dropped.
inline TriMesh mesh_from_obj(const ObjData& data) {
  std::vector<Vec2> v;
  v.reserve(data.positions.size());
  for (const auto& p : data.positions) v.emplace_back(p.x(), p.y());
  return TriMesh(std::move(v), data.triangles);
}

inline void write_reference_obj(std::ostream& os, const TriMesh& mesh,
                                const std::vector<std::string>& comments = {}) {
  std::vector<Vec3> p;
  p.reserve(mesh.vertex_count());
  for (const auto& v : mesh.vertices()) p.emplace_back(v.x(), v.y(), 0.0);
  write_obj(os, p, mesh.triangles(), comments);
}

}  // namespace membrane
