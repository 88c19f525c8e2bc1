#include "membrane/mesh.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

using namespace membrane;

namespace {

int euler_characteristic(const TriMesh& m) {
  return static_cast<int>(m.vertex_count()) - static_cast<int>(m.edge_count()) + static_cast<int>(m.triangle_count());
}

void expect_valid(const TriMesh& m) {
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    EXPECT_GT(m.ref_area(t), 0.0);
    const auto& g = m.shape_gradients(t);
    EXPECT_LE((g[0] + g[1] + g[2]).norm(), 1e-12 * g[0].norm());
    // g_i . (x_j - x_k) reproduces the nodal basis.
    const auto& tri = m.triangles()[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double expect = (i == j ? 1.0 : 0.0) - (i == 0 ? 1.0 : 0.0);
        EXPECT_NEAR(g[i].dot(m.vertices()[tri[j]] - m.vertices()[tri[0]]), expect, 1e-12);
      }
  }
}

}  // namespace

TEST(BuildMesh, MinimalSquare) {
  const TriMesh m = build_mesh({DomainKind::unit_square, 1.0});
  EXPECT_EQ(m.triangle_count(), 2u);
  EXPECT_EQ(m.vertex_count(), 4u);
  EXPECT_EQ(m.boundary_vertices().size(), 4u);
  EXPECT_NEAR(m.area(), 1.0, 1e-15);
  expect_valid(m);
}

TEST(BuildMesh, DiskEulerAndArea) {
  const TriMesh m = build_mesh({DomainKind::disk, 0.2, 1.0});
  expect_valid(m);
  EXPECT_EQ(euler_characteristic(m), 1);
  // Inscribed regular n-gon.
  const double n = static_cast<double>(m.boundary_vertices().size());
  EXPECT_NEAR(m.area(), 0.5 * n * std::sin(2.0 * std::numbers::pi / n), 1e-12);
  EXPECT_LE(m.max_edge_length(), 0.2 * 1.6);
}

TEST(BuildMesh, AnnulusEuler) {
  DomainSpec d{DomainKind::annulus, 0.1};
  d.inner_radius = 0.5;
  d.outer_radius = 1.0;
  const TriMesh m = build_mesh(d);
  expect_valid(m);
  EXPECT_EQ(euler_characteristic(m), 0);
}

TEST(BuildMesh, BoundaryCloseToCircle) {
  for (double h : {0.2, 0.1, 0.05}) {
    const TriMesh m = build_mesh({DomainKind::disk, h, 1.0});
    for (int v : m.boundary_vertices()) EXPECT_NEAR(m.vertices()[v].norm(), 1.0, 1e-14);
    // Hausdorff distance of a polygon inscribed in the unit circle is the
    // largest sagitta 1 - cos(theta/2).
    for (const auto& e : m.boundary_edges()) {
      const double chord = (m.vertices()[e[0]] - m.vertices()[e[1]]).norm();
      const double sagitta = 1.0 - std::sqrt(1.0 - chord * chord / 4.0);
      EXPECT_LE(sagitta, h * h / 8.0);
    }
  }
}

TEST(BuildMesh, BoundaryEdgesAreOrientedLoops) {
  const TriMesh m = build_mesh({DomainKind::disk, 0.1, 1.0});
  // Outward normals of counterclockwise boundary edges point away from the centre.
  for (const auto& e : m.boundary_edges()) {
    const Vec2 a = m.vertices()[e[0]], b = m.vertices()[e[1]];
    const Vec2 outward(b.y() - a.y(), a.x() - b.x());
    EXPECT_GT(outward.dot(a + b), 0.0);
  }
}

TEST(TriMesh, RejectsDegenerateTriangle) {
  try {
    TriMesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(TriMesh, ShareEdge) {
  const TriMesh m = build_mesh({DomainKind::unit_square, 1.0});
  EXPECT_TRUE(m.share_edge(0, 1));
}

TEST(Obj, RoundTrip) {
  const TriMesh m = build_mesh({DomainKind::disk, 0.3, 1.0});
  std::stringstream ss;
  write_reference_obj(ss, m, {"reference disk"});
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# reference disk\n", 0), 0u);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  const TriMesh back = mesh_from_obj(read_obj(ss));
  ASSERT_EQ(back.vertex_count(), m.vertex_count());
  ASSERT_EQ(back.triangles(), m.triangles());
  for (std::size_t v = 0; v < m.vertex_count(); ++v) EXPECT_EQ(back.vertices()[v], m.vertices()[v]);
}

TEST(Obj, MalformedLineIsReported) {
  std::istringstream is("v 0 0 0\nv 1 0 0\nv 0 1\nf 1 2 3\n");
  try {
    read_obj(is);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Obj, AcceptsSlashFaces) {
  std::istringstream is("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nf 1/1 2/1 3/1\n");
  const auto d = read_obj(is);
  ASSERT_EQ(d.triangles.size(), 1u);
  EXPECT_EQ(d.triangles[0], (Triangle{0, 1, 2}));
}
