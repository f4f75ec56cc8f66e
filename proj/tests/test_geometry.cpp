#include "kgwell/error.hpp"
#include "kgwell/geometry.hpp"
#include "kgwell/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace kgwell;

TEST(IntervalMesh, TwoElements) {
  const Mesh m = build_interval_mesh(0.0, 1.0, 2);
  ASSERT_EQ(m.vertex_count(), 3);
  EXPECT_DOUBLE_EQ(m.vertex(1).x(), 0.5);
  ASSERT_EQ(m.facets().size(), 2u);
  for (const auto& f : m.facets()) {
    const double x = m.vertex(f.vertices[0]).x();
    EXPECT_DOUBLE_EQ(f.normal.x(), x == 0.0 ? -1.0 : 1.0);
  }
}

TEST(IntervalMesh, SingleElementAndSymmetricInterval) {
  EXPECT_EQ(build_interval_mesh(0.0, 1.0, 1).vertex_count(), 2);
  const Mesh m = build_interval_mesh(-1.0, 1.0, 4);
  const double expected[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(m.vertex(i).x(), expected[i]);
}

TEST(IntervalMesh, RejectsBadInput) {
  EXPECT_THROW(build_interval_mesh(1.0, 1.0, 3), InvalidInput);
  EXPECT_THROW(build_interval_mesh(0.0, 1.0, 0), InvalidInput);
}

TEST(RectangleMesh, Counts) {
  const Mesh a = build_rectangle_mesh({0, 0}, {1, 1}, 1, 1);
  EXPECT_EQ(a.element_count(), 2);
  EXPECT_EQ(a.facets().size(), 4u);
  const Mesh b = build_rectangle_mesh({0, 0}, {1, 1}, 2, 2);
  EXPECT_EQ(b.element_count(), 8);
  EXPECT_EQ(b.facets().size(), 8u);
  EXPECT_THROW(build_rectangle_mesh({0, 0}, {0, 1}, 2, 2), InvalidInput);
}

TEST(RectangleMesh, PerimeterAndNormals) {
  for (Index n : {1, 3, 7}) {
    const Mesh m = build_rectangle_mesh({0, 0}, {1, 1}, n, n + 2);
    double perimeter = 0.0;
    for (const auto& f : m.facets()) {
      perimeter += f.measure;
      EXPECT_NEAR(f.normal.norm(), 1.0, 1e-12);
    }
    EXPECT_NEAR(perimeter, 4.0, 1e-12);
    EXPECT_NO_THROW(m.validate());
  }
}

TEST(Classify, UnitInterval) {
  const Mesh m = build_interval_mesh(0.0, 1.0, 10);
  const BoundaryPartition p = classify_boundary(m, Point(0.0, 0.0));
  EXPECT_EQ(p.gamma1_count(), 1u);
  for (std::size_t i = 0; i < m.facets().size(); ++i) {
    const double x = m.vertex(m.facets()[i].vertices[0]).x();
    EXPECT_EQ(p.is_gamma1(i), x == 1.0);
  }
  const auto g = geometry_constants(p);
  EXPECT_DOUBLE_EQ(g.R, 1.0);
  EXPECT_DOUBLE_EQ(g.m0, 1.0);
}

TEST(Classify, IntervalOfLengthTwo) {
  const auto g = geometry_constants(classify_boundary(build_interval_mesh(0.0, 2.0, 8), Point::Zero()));
  EXPECT_DOUBLE_EQ(g.R, 2.0);
  EXPECT_DOUBLE_EQ(g.m0, 2.0);
}

TEST(Classify, UnitSquareOffsetStar) {
  const Mesh m = build_rectangle_mesh({0, 0}, {1, 1}, 4, 4);
  const BoundaryPartition p = classify_boundary(m, Point(-0.1, -0.1));
  for (std::size_t i = 0; i < m.facets().size(); ++i) {
    const Point& nu = m.facets()[i].normal;
    EXPECT_EQ(p.is_gamma1(i), nu.x() > 0.5 || nu.y() > 0.5);
  }
  // R over the four corners by hand: farthest corner (1, 1) from (-0.1, -0.1).
  EXPECT_NEAR(p.R, std::hypot(1.1, 1.1), 1e-14);
  EXPECT_NEAR(p.R, 1.5556, 1e-4);
  EXPECT_NEAR(p.m0, 1.1, 1e-14);
  EXPECT_FALSE(p.warnings.empty());
}

TEST(Classify, MixedFacetAndEmptyGamma1) {
  // Straight edges have constant m.nu, so tilt the top edge's normal the way
  // an imported approximation of a curved boundary might.
  const Mesh square = build_rectangle_mesh({0, 0}, {1, 1}, 1, 1);
  auto facets = square.facets();
  for (auto& f : facets) {
    if (f.normal.y() > 0.5) f.normal = Point(std::sin(0.3), std::cos(0.3));
  }
  const Mesh tilted(2, square.vertices(), square.elements(), facets);
  EXPECT_THROW(classify_boundary(tilted, Point(0.5, 1.0)), MixedFacetError);

  // The divergence theorem forces some m.nu > 0 on a consistent mesh; inward
  // normals leave Gamma1 empty.
  const Mesh line = build_interval_mesh(0.0, 1.0, 4);
  auto ends = line.facets();
  for (auto& f : ends) f.normal = -f.normal;
  const Mesh inward(1, line.vertices(), line.elements(), ends);
  EXPECT_THROW(classify_boundary(inward, Point(0.5, 0.0)), EmptyGamma1Error);
}

TEST(Classify, Gamma1QuadraturePointsAboveM0) {
  const Mesh m = build_rectangle_mesh({0, 0}, {2, 1}, 6, 3);
  const Point x0(-0.3, -0.2);
  const BoundaryPartition p = classify_boundary(m, x0);
  for (std::size_t i = 0; i < m.facets().size(); ++i) {
    if (!p.is_gamma1(i)) continue;
    for (const Point& x : facet_sample_points(m, m.facets()[i])) {
      EXPECT_GE(multiplier_field(x, x0).dot(m.facets()[i].normal), p.m0 - 1e-14);
    }
  }
  EXPECT_GE(p.R, p.m0);
}

TEST(Classify, DilationScalesRAndM0) {
  const Mesh m = build_rectangle_mesh({0, 0}, {1, 1}, 3, 3);
  const Point x0(-0.1, -0.2);
  const BoundaryPartition p = classify_boundary(m, x0);
  for (double s : {0.5, 3.0}) {
    const BoundaryPartition q = classify_boundary(m.scaled(s), s * x0);
    EXPECT_NEAR(q.R, s * p.R, 1e-13);
    EXPECT_NEAR(q.m0, s * p.m0, 1e-13);
  }
}

TEST(Classify, Idempotent) {
  const Mesh m = build_rectangle_mesh({0, 0}, {1, 1}, 3, 3);
  const BoundaryPartition p = classify_boundary(m, Point(-0.1, -0.1));
  const BoundaryPartition q = classify_boundary(m, p.x0);
  EXPECT_EQ(p.labels, q.labels);
  EXPECT_EQ(p.R, q.R);
  EXPECT_EQ(p.m0, q.m0);
}

TEST(MeshIo, RoundTrip) {
  const Mesh m = build_rectangle_mesh({0, 0}, {1, 2}, 2, 3);
  const BoundaryPartition p = classify_boundary(m, Point(-0.1, -0.1));
  std::stringstream ss;
  write_mesh(ss, m, &p.labels);
  const MeshFile back = read_mesh(ss);
  ASSERT_EQ(back.mesh.vertex_count(), m.vertex_count());
  ASSERT_EQ(back.mesh.element_count(), m.element_count());
  ASSERT_TRUE(back.labels.has_value());
  EXPECT_EQ(*back.labels, p.labels);
  for (Index i = 0; i < m.vertex_count(); ++i) EXPECT_EQ(back.mesh.vertex(i), m.vertex(i));
}
