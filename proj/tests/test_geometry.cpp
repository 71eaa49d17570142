#include <gtest/gtest.h>

#include <cmath>

#include "qregion/geometry.hpp"

using namespace qregion;

namespace {

double weight_sum(const std::vector<QuadratureNode>& nodes) {
  double s = 0.0;
  for (const auto& n : nodes) s += n.weight;
  return s;
}

}  // namespace

TEST(Area, Primitives) {
  EXPECT_DOUBLE_EQ(region_area(rectangle(0, 0, 2, 3)), 6.0);
  EXPECT_NEAR(region_area(canonical_polygon(std::sqrt(3.0) / 2, 6)), 3.0 * std::sqrt(3.0) / 2, 1e-14);
  EXPECT_NEAR(region_area(disk({1, 1}, 2)), std::numbers::pi, 1e-15);
  EXPECT_NEAR(region_area(polygon_triangle(1.0, 4)), 1.0, 1e-15);
  EXPECT_NEAR(region_area(disk_cluster(0, 1, 2)), 9 * std::numbers::pi / 4, 1e-14);
  EXPECT_EQ(region_area(segment(1, 0)), 0.0);
  EXPECT_EQ(region_area(line(0, 0)), 0.0);
}

TEST(Area, InvariantUnderRigidMotions) {
  const Region r = rectangle(0.2, -0.1, 1.5, 0.7);
  EXPECT_DOUBLE_EQ(region_area(displaced({3, -2}, r)), region_area(r));
  EXPECT_DOUBLE_EQ(region_area(rotated(0.8, r)), region_area(r));
  EXPECT_DOUBLE_EQ(region_area(reflected_origin(r)), region_area(r));
}

TEST(Area, UnionRequiresDisjointFlag) {
  EXPECT_DOUBLE_EQ(region_area(region_union({rectangle(0, 0, 1, 1), rectangle(1, 0, 1, 1)})), 2.0);
  EXPECT_THROW(region_area(region_union({rectangle(0, 0, 1, 1), rectangle(0.5, 0, 1, 1)}, false)), InvalidArgument);
}

TEST(Factories, RejectInvalid) {
  EXPECT_THROW(rectangle(0, 0, -1, 1), InvalidArgument);
  EXPECT_THROW(rectangle(0, 0, 1, std::nan("")), InvalidArgument);
  EXPECT_THROW(canonical_polygon(1, 2), InvalidArgument);
  EXPECT_THROW(disk({0, 0}, 0), InvalidArgument);
  EXPECT_THROW(segment(0, 1), InvalidArgument);
  EXPECT_THROW(disk_cluster(0, 1, -1), InvalidArgument);
  EXPECT_THROW(region_union({}), InvalidArgument);
}

TEST(Contains, Examples) {
  EXPECT_TRUE(region_contains(rectangle(0, 0, 1, 1), {0.5, 0.5}));
  EXPECT_TRUE(region_contains(rectangle(0, 0, 1, 1), {1.0, 0.0}));
  EXPECT_FALSE(region_contains(disk({0, 0}, 2), {1.0001, 0}));
  EXPECT_TRUE(region_contains(disk({0, 0}, 2), {1.0, 0}));
  // quarter turn maps [0,1]x[0,2] onto [-2,0]x[0,1]
  EXPECT_TRUE(region_contains(rotated(std::numbers::pi / 2, rectangle(0, 0, 1, 2)), {-1.5, 0.5}));
  EXPECT_FALSE(region_contains(rotated(std::numbers::pi / 2, rectangle(0, 0, 1, 2)), {0.5, 1.5}));
  EXPECT_TRUE(region_contains(reflected_origin(rectangle(0, 0, 1, 1)), {-0.5, -0.5}));
  EXPECT_TRUE(region_contains(displaced({2, 3}, rectangle(0, 0, 1, 1)), {2.5, 3.5}));
  EXPECT_TRUE(region_contains(segment(2, 0), {0, 0.9}));
  EXPECT_FALSE(region_contains(segment(2, 0), {0.1, 0.0}));
  EXPECT_TRUE(region_contains(line(std::numbers::pi / 4, 0), {1, -1}));
  EXPECT_TRUE(region_contains(point_origin(), {0, 0}));
}

TEST(Contains, PolygonMatchesTriangleUnion) {
  const double a = std::sqrt(3.0) / 2;
  const Region hex = canonical_polygon(a, 6);
  std::vector<Region> tris;
  for (int j = 0; j < 6; ++j) tris.push_back(rotated(2 * std::numbers::pi * j / 6, polygon_triangle(a, 6)));
  const Region u = region_union(tris);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> x(-1.2, 1.2);
  for (int i = 0; i < 2000; ++i) {
    const Point pt{x(rng), x(rng)};
    EXPECT_EQ(region_contains(hex, pt), region_contains(u, pt)) << pt.q << "," << pt.p;
  }
}

TEST(Quadrature, WeightsSumToArea) {
  const QuadratureSpec spec{16};
  for (const Region& r : {rectangle(0, 0, 2, 3), disk({0.3, -0.2}, 1.7), polygon_triangle(0.9, 5),
                          canonical_polygon(std::sqrt(3.0) / 2, 6), disk_cluster(0, 1, 1),
                          rotated(0.3, displaced({1, 1}, rectangle(0, 0, 1, 2)))}) {
    const auto nodes = quadrature_nodes(r, spec);
    EXPECT_NEAR(weight_sum(nodes), region_area(r), 1e-12 * region_area(r)) << describe(r);
    for (const auto& n : nodes) EXPECT_TRUE(region_contains(r, n.point)) << describe(r);
  }
}

TEST(Quadrature, DiskRadii) {
  const auto nodes = quadrature_nodes(disk({0, 0}, 3), QuadratureSpec{12});
  for (const auto& n : nodes) EXPECT_LE(std::hypot(n.point.q, n.point.p), 1.5);
}

TEST(Quadrature, TriangleAreaClosedForm) {
  for (int m : {3, 4, 6, 9}) {
    const double a = 0.7;
    const auto nodes = quadrature_nodes(polygon_triangle(a, m), QuadratureSpec{8});
    EXPECT_NEAR(weight_sum(nodes), a * a * std::tan(std::numbers::pi / m), 1e-12);
  }
}

TEST(Quadrature, PolynomialExactnessOnRectangle) {
  // degree 2*order-1 per axis is integrated exactly
  const int order = 6;
  const Rectangle r{-0.3, 0.4, 1.3, 0.9};
  const auto nodes = quadrature_nodes(Region(r), QuadratureSpec{order});
  auto prim = [](double x, int k) { return std::pow(x, k + 1) / (k + 1); };
  for (int i : {0, 3, 11})
    for (int j : {1, 7, 11}) {
      double s = 0.0;
      for (const auto& n : nodes) s += n.weight * std::pow(n.point.q, i) * std::pow(n.point.p, j);
      const double exact = (prim(r.x0 + r.A, i) - prim(r.x0, i)) * (prim(r.k0 + r.B, j) - prim(r.k0, j));
      EXPECT_NEAR(s, exact, 1e-12 * std::max(1.0, std::abs(exact)));
    }
}

TEST(Quadrature, RejectsInfiniteOrSingular) {
  EXPECT_THROW(quadrature_nodes(line(0, 1), {}), InvalidArgument);
  EXPECT_THROW(quadrature_nodes(point_origin(), {}), InvalidArgument);
  EXPECT_THROW(quadrature_nodes(rectangle(0, 0, 1, 1), QuadratureSpec{2}), InvalidArgument);
}

TEST(Quadrature, SegmentArcLength) {
  const auto nodes = quadrature_nodes(segment(1.5, 0.4, {0.2, 0.1}), QuadratureSpec{10});
  EXPECT_NEAR(weight_sum(nodes), 1.5, 1e-14);
  for (const auto& n : nodes) EXPECT_EQ(n.measure, Measure::arc_length);
}

TEST(Decompose, LinesTrackRigidMaps) {
  // line q = 1 rotated by pi/2 becomes p = 1; then shifted by (0, 2): p = 3
  const Region r = displaced({0, 2}, rotated(std::numbers::pi / 2, line(0, 1)));
  auto [nodes, atoms] = decompose_region(r, 8);
  ASSERT_EQ(atoms.lines.size(), 1u);
  EXPECT_NEAR(atoms.lines[0].theta, std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(atoms.lines[0].offset, 3.0, 1e-14);
  EXPECT_TRUE(region_contains(r, {5.0, 3.0}));
}

TEST(Overlap, MonteCarloDetectsOverlap) {
  const Region disjoint = region_union({rectangle(0, 0, 1, 1), rectangle(1, 0, 1, 1)});
  const Region overlap = region_union({rectangle(0, 0, 1, 1), rectangle(0.5, 0, 1, 1)}, false);
  EXPECT_LT(estimate_overlap_area(*disjoint.get_if<Union>(), 100000, 5), 1e-3);
  EXPECT_NEAR(estimate_overlap_area(*overlap.get_if<Union>(), 100000, 5), 0.5, 0.02);
}

TEST(Overlap, HexagonTrianglesAreDisjoint) {
  const double a = std::sqrt(3.0) / 2;
  std::vector<Region> tris;
  for (int j = 0; j < 6; ++j) tris.push_back(polygon_triangle(a, 6, 2 * std::numbers::pi * j / 6));
  const Region u = region_union(tris);
  EXPECT_LT(estimate_overlap_area(*u.get_if<Union>(), 200000, 9), 1e-3);
}

TEST(Describe, Readable) {
  EXPECT_EQ(describe(rectangle(0, 0, 1, 2)), "rect(0,0,1,2)");
  EXPECT_EQ(describe(reflected_origin(point_origin())), "refl(point)");
}

TEST(Outline, PointsLieOnRegions) {
  for (const Region& r : {rectangle(0, 0, 1, 2), disk({0.5, -1}, 1.0), polygon_triangle(0.8, 6, 0.4),
                          canonical_polygon(1.0, 5), disk_cluster(0, 1, 1), displaced({1, 2}, rotated(0.3, rectangle(0, 0, 1, 1))),
                          reflected_origin(polygon_triangle(0.8, 6)), segment(1.5, 0.3, {0.1, 0.2}), line(0.4, 1.0)}) {
    const auto lines = region_outline(r, 32);
    ASSERT_FALSE(lines.empty()) << describe(r);
    for (const auto& l : lines) {
      ASSERT_GE(l.size(), 2u);
      for (const Point& x : l) EXPECT_TRUE(region_contains(r, x)) << describe(r) << " " << x.q << "," << x.p;
    }
  }
  const auto cluster = region_outline(disk_cluster(0, 1, 3), 16);
  EXPECT_EQ(cluster.size(), 16u);
  EXPECT_EQ(cluster[0].front(), cluster[0].back());
  EXPECT_EQ(region_outline(point_origin()).size(), 1u);
}
