#include "membrane/geometry.hpp"
#include "membrane/parallel.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace membrane;

namespace {

std::vector<Surface> builtin_surfaces() {
  return {Surface::plane(Vec3(0, 0, 0.5), Vec3(1, 1, 2)),
          Surface::sphere(Vec3(0.1, -0.2, 0.3), 1.5),
          Surface::torus(Vec3::Zero(), 2.0, 0.5),
          Surface::ellipsoid(Vec3::Zero(), Vec3(1.0, 1.5, 0.7)),
          Surface::graph({0.1, 0.2, -0.1, 0.3, 0.1, -0.2})};
}

// Random point within `spread` of the surface whose projection is well defined.
Vec3 near_surface(const Surface& s, std::mt19937_64& rng, double spread) {
  for (;;) {
    const Vec3 p(uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3));
    try {
      const Vec3 y = s.project(p);
      const Vec3 q = y + uniform(rng, -spread, spread) * s.normal(y);
      s.project(q);
      return q;
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST(Normal, Examples) {
  EXPECT_NEAR((Surface::sphere(Vec3::Zero(), 1.0).normal(Vec3(0, 0, 1)) - Vec3(0, 0, 1)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((Surface::plane().normal(Vec3(3, -2, 0)) - Vec3(0, 0, 1)).norm(), 0.0, 1e-15);
  const Surface torus = Surface::torus(Vec3::Zero(), 2.0, 0.5);
  EXPECT_NEAR((torus.normal(Vec3(2.5, 0, 0)) - Vec3(1, 0, 0)).norm(), 0.0, 1e-14);
}

TEST(Normal, TorusMatchesLevelSetDifferences) {
  const Surface torus = Surface::torus(Vec3::Zero(), 2.0, 0.5);
  const Vec3 y(2.5, 0, 0);
  auto G = [](const Vec3& p) {
    const double rho = std::hypot(p.x(), p.y()) - 2.0;
    return rho * rho + p.z() * p.z() - 0.25;
  };
  Vec3 g;
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    g[i] = (G(y + e) - G(y - e)) / (2 * h);
  }
  EXPECT_NEAR((torus.normal(y) - g.normalized()).norm(), 0.0, 1e-8);
}

TEST(Normal, OffSurfaceThrows) {
  const Surface s = Surface::sphere(Vec3::Zero(), 1.0);
  try {
    s.normal(Vec3(0, 0, 1.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OffSurface);
  }
}

TEST(Normal, UnitLengthAndLipschitz) {
  for (const auto& s : builtin_surfaces()) {
    auto rng = substream(1, static_cast<int>(s.kind()));
    for (int i = 0; i < 200; ++i) {
      const Vec3 y = near_surface(s, rng, 0.0);
      const Vec3 n = s.normal(y);
      EXPECT_NEAR(n.norm(), 1.0, 1e-12);
      const Vec3 t = s.tangent_project(y, Vec3(0.3, -0.2, 0.1));
      if (t.norm() < 1e-3) continue;
      const double h = 1e-4;
      const Vec3 y2 = s.project(y + h * t.normalized());
      // Curvature bound of the builtin shapes is below 1/0.2.
      EXPECT_LE((s.normal(y2) - n).norm(), 5.0 * (y2 - y).norm() + 1e-12) << to_string(s.kind());
    }
  }
}

TEST(Normal, OrientationSignFlipsField) {
  const Surface s = Surface::torus(Vec3::Zero(), 2.0, 0.5);
  const Vec3 y(2.5, 0, 0);
  EXPECT_NEAR((s.reoriented().normal(y) + s.normal(y)).norm(), 0.0, 1e-15);
  EXPECT_EQ(Surface::sphere(Vec3::Zero(), 1, -1).normal(Vec3(0, 0, 1)).z(), -1.0);
}

TEST(Project, Examples) {
  EXPECT_NEAR((Surface::sphere(Vec3::Zero(), 1.0).project(Vec3(0, 0, 2)) - Vec3(0, 0, 1)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((Surface::plane().project(Vec3(1, 2, 3)) - Vec3(1, 2, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((Surface::torus(Vec3::Zero(), 2.0, 0.5).project(Vec3(3, 0, 0)) - Vec3(2.5, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(Project, MedialAxisIsAmbiguous) {
  auto kind_of = [](const Surface& s, const Vec3& p) {
    try {
      s.project(p);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  EXPECT_EQ(kind_of(Surface::sphere(Vec3::Zero(), 1.0), Vec3(0, 0, 1e-5)), ErrorKind::AmbiguousProjection);
  EXPECT_EQ(kind_of(Surface::torus(Vec3::Zero(), 2.0, 0.5), Vec3(0, 2.0, 1e-5)), ErrorKind::AmbiguousProjection);
  EXPECT_EQ(kind_of(Surface::torus(Vec3::Zero(), 2.0, 0.5), Vec3(0, 0, 0.3)), ErrorKind::AmbiguousProjection);
}

TEST(Project, IdempotentAndOnSurface) {
  for (const auto& s : builtin_surfaces()) {
    auto rng = substream(2, static_cast<int>(s.kind()));
    for (int i = 0; i < 500; ++i) {
      const Vec3 p = near_surface(s, rng, 0.1);
      const Vec3 y = s.project(p);
      EXPECT_TRUE(s.on_surface(y)) << to_string(s.kind());
      EXPECT_LE((s.project(y) - y).norm(), 1e-10);
    }
  }
}

TEST(Project, NormalParallelToResidual) {
  for (const auto& s : {Surface::plane(Vec3(0, 0, 0.5), Vec3(1, 1, 2)), Surface::sphere(Vec3::Zero(), 1.5),
                        Surface::torus(Vec3::Zero(), 2.0, 0.5)}) {
    auto rng = substream(3, static_cast<int>(s.kind()));
    for (int i = 0; i < 500; ++i) {
      const Vec3 p = near_surface(s, rng, 0.2);
      const Vec3 y = s.project(p);
      const Vec3 d = p - y;
      if (d.norm() < 1e-6) continue;
      EXPECT_LE(d.normalized().cross(s.normal(y)).norm(), 1e-8) << to_string(s.kind());
    }
  }
}

TEST(Project, SampledOptimality) {
  for (const auto& s : builtin_surfaces()) {
    auto rng = substream(4, static_cast<int>(s.kind()));
    std::vector<Vec3> zs;
    for (int i = 0; i < 100; ++i) zs.push_back(near_surface(s, rng, 0.0));
    for (int i = 0; i < 10000; ++i) {
      const Vec3 p = near_surface(s, rng, 0.2);
      const double d = (s.project(p) - p).norm();
      for (const auto& z : zs) ASSERT_LE(d, (z - p).norm() + 1e-12) << to_string(s.kind());
    }
  }
}

TEST(TangentProject, Examples) {
  const Surface sphere = Surface::sphere(Vec3::Zero(), 1.0);
  EXPECT_NEAR((sphere.tangent_project(Vec3(0, 0, 1), Vec3(1, 0, 5)) - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(Surface::plane().tangent_project(Vec3(4, 1, 0), Vec3(2, -3, 7)).z(), 0.0, 1e-15);
  for (const auto& s : builtin_surfaces()) {
    auto rng = substream(5, static_cast<int>(s.kind()));
    const Vec3 y = near_surface(s, rng, 0.0);
    EXPECT_NEAR(s.tangent_project(y, s.normal(y)).norm(), 0.0, 1e-12);
    const Vec3 t = s.tangent_project(y, Vec3(0.4, 1.1, -2.0));
    EXPECT_NEAR(t.dot(s.normal(y)), 0.0, 1e-12);
  }
}

TEST(Chart, PlaneIsIdentity) {
  const Chart c = Surface::plane().chart_at(Vec3(0.2, 0.3, 0));
  EXPECT_EQ(c.kind(), ChartKind::planar);
  const Vec2 q(0.7, -0.4);
  EXPECT_NEAR((c.param_map(q) - Vec3(0.7, -0.4, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((c.metric(q) - Mat2::Identity()).norm(), 0.0, 1e-15);
  EXPECT_NEAR(c.sqrt_a(q), 1.0, 1e-15);
}

TEST(Chart, SphereAreaElementAtQuarterPi) {
  const Chart c = Surface::sphere(Vec3::Zero(), 1.0).chart_at(Vec3(0, 0, 1));
  const Vec2 q0 = c.center_params();
  // Moving pi/4 from the chart centre along the colatitude direction lands at
  // colatitude pi/4 of the rotated polar frame; along the other direction the
  // area element stays 1.
  const double s1 = c.sqrt_a(q0 + Vec2(std::numbers::pi / 4, 0));
  const double s2 = c.sqrt_a(q0 + Vec2(0, std::numbers::pi / 4));
  EXPECT_NEAR(std::min(s1, s2), std::sin(std::numbers::pi / 4), 1e-12);
  EXPECT_NEAR(std::max(s1, s2), 1.0, 1e-12);
}

TEST(Chart, TorusMetricAtOuterEquator) {
  const Chart c = Surface::torus(Vec3::Zero(), 2.0, 0.5).chart_at(Vec3(2.5, 0, 0));
  const Mat2 a = c.metric(c.center_params());
  const Vec2 diag(a(0, 0), a(1, 1));
  // The chart may order the parameters to match the orientation.
  EXPECT_NEAR(diag.minCoeff(), 0.25, 1e-12);
  EXPECT_NEAR(diag.maxCoeff(), 6.25, 1e-12);
  EXPECT_NEAR(a(0, 1), 0.0, 1e-12);
}

TEST(Chart, BasisMatchesDifferencesAndDuality) {
  for (const auto& s : builtin_surfaces()) {
    auto rng = substream(6, static_cast<int>(s.kind()));
    for (int i = 0; i < 50; ++i) {
      const Vec3 y = near_surface(s, rng, 0.0);
      const Chart c = s.chart_at(y);
      const Vec2 q = c.inverse_map(y);
      EXPECT_LE((c.param_map(q) - y).norm(), 1e-9);
      const Mat32 A = c.covariant_basis(q);
      const double h = 1e-6;
      for (int k = 0; k < 2; ++k) {
        Vec2 e = Vec2::Zero();
        e[k] = h;
        const Vec3 fd = (c.param_map(q + e) - c.param_map(q - e)) / (2 * h);
        EXPECT_LE((fd - A.col(k)).norm(), 1e-7 * (1 + A.col(k).norm())) << to_string(s.kind());
      }
      const Mat2 a = c.metric(q);
      EXPECT_GT(a.determinant(), 0.0);
      EXPECT_NEAR(a(0, 1), a(1, 0), 1e-15);
      EXPECT_NEAR((c.contravariant_basis(q).transpose() * A - Mat2::Identity()).norm(), 0.0, 1e-10);
      // Charts are oriented: a1 x a2 points along n.
      EXPECT_GT(A.col(0).cross(A.col(1)).dot(s.normal(y)), 0.0) << to_string(s.kind());
    }
  }
}

TEST(Chart, AreaRatioIsChartIndependent) {
  // J = sqrt(a) det M for the map x -> (cos-sin bump) on the sphere, computed
  // in charts centred at two nearby points.
  const Surface s = Surface::sphere(Vec3::Zero(), 1.0);
  const Vec3 y = s.project(Vec3(0.3, 0.2, 1.0));
  const Chart c1 = s.chart_at(y);
  const Chart c2 = s.chart_at(s.project(Vec3(0.4, 0.1, 1.0)));
  // Test map: a smooth local diffeomorphism of the sphere near y.
  auto f = [&](const Vec3& p) { return s.project(p + 0.1 * Vec3(std::sin(p.y()), p.x() * p.z(), 0.0)); };
  auto area_ratio = [&](const Chart& c) {
    const Vec2 q = c.inverse_map(y);
    const Vec2 fq = c.inverse_map(f(y));
    Mat2 M;
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
      Vec2 e = Vec2::Zero();
      e[k] = h;
      M.col(k) = (c.inverse_map(f(c.param_map(q + e))) - c.inverse_map(f(c.param_map(q - e)))) / (2 * h);
    }
    return c.sqrt_a(fq) * M.determinant() / c.sqrt_a(q);
  };
  EXPECT_NEAR(area_ratio(c1), area_ratio(c2), 1e-8);
}
