#pragma once

// Phase-space region algebra: primitives, rigid transforms, disjoint unions,
// exact areas, membership and quadrature nodes.
//
// Conventions:
//  * Rotated{phi} turns its inner region counter-clockwise by phi about the
//    origin; that matches conjugation by R(phi) = exp(i phi N).
//  * Segment{L, theta, c} runs along (-sin theta, cos theta) through c. Its
//    operator is the function sin(Q_theta L)/Q_theta of the quadrature
//    Q_theta, so theta = 0 is the segment on the momentum axis.
//  * Line{theta, offset} is the set q cos(theta) + p sin(theta) = offset.
//  * IsoTriangle has its apex at the origin and its axis along `orientation`;
//    the base is at distance `apothem`. CanonicalPolygon{a, M} is the union of
//    the M triangles at orientations 2 pi j / M.
//  * DiskCluster{c, d, m} is the square lattice of (m+1)^2 disks of diameter
//    d centred at (c + i d, c + j d), 0 <= i, j <= m.
//  * Boundary points count as inside.

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "qregion/errors.hpp"
#include "qregion/special.hpp"

namespace qregion {

struct Point {
  double q = 0.0;
  double p = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

class Region;
using RegionPtr = std::shared_ptr<const Region>;

struct PointOrigin {};
struct Segment {
  double length;
  double theta;
  Point center;
};
struct Line {
  double theta;
  double offset;
};
struct Rectangle {
  double x0, k0, A, B;
};
struct Disk {
  Point center;
  double diameter;
};
struct IsoTriangle {
  double apothem;
  double apex;
  double orientation;
};
struct CanonicalPolygon {
  double apothem;
  int sides;
};
struct DiskCluster {
  double c;
  double d;
  int m;
};
struct Rotated {
  double phi;
  RegionPtr inner;
};
struct ReflectedOrigin {
  RegionPtr inner;
};
struct Displaced {
  Point shift;
  RegionPtr inner;
};
struct Union {
  std::vector<RegionPtr> members;
  bool disjoint;
};

class Region {
 public:
  using Variant = std::variant<PointOrigin, Segment, Line, Rectangle, Disk, IsoTriangle, CanonicalPolygon,
                               DiskCluster, Rotated, ReflectedOrigin, Displaced, Union>;

  Region() : v_(PointOrigin{}) {}
  template <class T>
  Region(T primitive) : v_(std::move(primitive)) {}

  const Variant& variant() const { return v_; }
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

 private:
  Variant v_;
};

namespace detail {
inline void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) throw InvalidArgument(std::string(what) + " must be positive and finite");
}
inline void require_finite_value(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite");
}
}  // namespace detail

// Validating factories.

inline Region point_origin() { return Region(PointOrigin{}); }

inline Region segment(double length, double theta, Point center = {}) {
  detail::require_positive(length, "segment length");
  detail::require_finite_value(theta, "segment angle");
  detail::require_finite_value(center.q, "segment centre");
  detail::require_finite_value(center.p, "segment centre");
  return Region(Segment{length, theta, center});
}

inline Region line(double theta, double offset) {
  detail::require_finite_value(theta, "line angle");
  detail::require_finite_value(offset, "line offset");
  return Region(Line{theta, offset});
}

inline Region rectangle(double x0, double k0, double A, double B) {
  detail::require_finite_value(x0, "rectangle corner");
  detail::require_finite_value(k0, "rectangle corner");
  detail::require_positive(A, "rectangle width");
  detail::require_positive(B, "rectangle height");
  return Region(Rectangle{x0, k0, A, B});
}

inline Region disk(Point center, double diameter) {
  detail::require_finite_value(center.q, "disk centre");
  detail::require_finite_value(center.p, "disk centre");
  detail::require_positive(diameter, "disk diameter");
  return Region(Disk{center, diameter});
}

inline Region iso_triangle(double apothem, double apex, double orientation = 0.0) {
  detail::require_positive(apothem, "triangle apothem");
  detail::require_positive(apex, "triangle apex angle");
  if (apex >= std::numbers::pi) throw InvalidArgument("triangle apex angle must be below pi");
  detail::require_finite_value(orientation, "triangle orientation");
  return Region(IsoTriangle{apothem, apex, orientation});
}

/// Triangle [a, 2 pi / M] of a canonical M-gon.
inline Region polygon_triangle(double apothem, int sides, double orientation = 0.0) {
  if (sides < 3) throw InvalidArgument("polygon needs at least 3 sides");
  return iso_triangle(apothem, 2.0 * std::numbers::pi / sides, orientation);
}

inline Region canonical_polygon(double apothem, int sides) {
  detail::require_positive(apothem, "polygon apothem");
  if (sides < 3) throw InvalidArgument("polygon needs at least 3 sides");
  return Region(CanonicalPolygon{apothem, sides});
}

inline Region disk_cluster(double c, double d, int m) {
  detail::require_finite_value(c, "cluster origin");
  detail::require_positive(d, "cluster disk diameter");
  if (m < 0) throw InvalidArgument("cluster size must be non-negative");
  return Region(DiskCluster{c, d, m});
}

inline Region rotated(double phi, Region inner) {
  detail::require_finite_value(phi, "rotation angle");
  return Region(Rotated{phi, std::make_shared<const Region>(std::move(inner))});
}

inline Region reflected_origin(Region inner) {
  return Region(ReflectedOrigin{std::make_shared<const Region>(std::move(inner))});
}

inline Region displaced(Point shift, Region inner) {
  detail::require_finite_value(shift.q, "displacement");
  detail::require_finite_value(shift.p, "displacement");
  return Region(Displaced{shift, std::make_shared<const Region>(std::move(inner))});
}

/// Union of regions. Only declared-disjoint unions have an area and an
/// operator; overlap is not resolved (no inclusion-exclusion).
inline Region region_union(std::vector<Region> members, bool disjoint = true) {
  if (members.empty()) throw InvalidArgument("union needs at least one member");
  Union u{{}, disjoint};
  for (auto& m : members) u.members.push_back(std::make_shared<const Region>(std::move(m)));
  return Region(std::move(u));
}

// ---------------------------------------------------------------------------
// Rigid maps x -> R(phi) x + shift

struct RigidMap {
  double phi = 0.0;
  Point shift{};

  Point apply(Point x) const {
    const double c = std::cos(phi), s = std::sin(phi);
    return {c * x.q - s * x.p + shift.q, s * x.q + c * x.p + shift.p};
  }
  Point apply_inverse(Point y) const {
    const double c = std::cos(phi), s = std::sin(phi);
    const double u = y.q - shift.q, v = y.p - shift.p;
    return {c * u + s * v, -s * u + c * v};
  }
  /// this o inner
  RigidMap after(const RigidMap& inner) const {
    return {phi + inner.phi, apply(inner.shift)};
  }
};

// ---------------------------------------------------------------------------
// Area and membership

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

/// Exact two-dimensional area. Points, segments and lines have area zero.
inline double region_area(const Region& r) {
  return std::visit(
      Overloaded{
          [](const PointOrigin&) { return 0.0; },
          [](const Segment&) { return 0.0; },
          [](const Line&) { return 0.0; },
          [](const Rectangle& x) { return x.A * x.B; },
          [](const Disk& x) { return std::numbers::pi * x.diameter * x.diameter / 4.0; },
          [](const IsoTriangle& x) { return x.apothem * x.apothem * std::tan(0.5 * x.apex); },
          [](const CanonicalPolygon& x) {
            return x.sides * x.apothem * x.apothem * std::tan(std::numbers::pi / x.sides);
          },
          [](const DiskCluster& x) { return (x.m + 1.0) * (x.m + 1.0) * std::numbers::pi * x.d * x.d / 4.0; },
          [](const Rotated& x) { return region_area(*x.inner); },
          [](const ReflectedOrigin& x) { return region_area(*x.inner); },
          [](const Displaced& x) { return region_area(*x.inner); },
          [](const Union& x) {
            if (!x.disjoint) throw InvalidArgument("area of a union that is not declared disjoint");
            double a = 0.0;
            for (const auto& m : x.members) a += region_area(*m);
            return a;
          },
      },
      r.variant());
}

/// Membership with boundary counted as inside (absolute slack 1e-12).
inline bool region_contains(const Region& r, Point x) {
  constexpr double eps = 1e-12;
  return std::visit(
      Overloaded{
          [&](const PointOrigin&) { return std::hypot(x.q, x.p) <= eps; },
          [&](const Segment& s) {
            const double u = x.q - s.center.q, v = x.p - s.center.p;
            const double along = -std::sin(s.theta) * u + std::cos(s.theta) * v;
            const double across = std::cos(s.theta) * u + std::sin(s.theta) * v;
            return std::abs(across) <= eps && std::abs(along) <= 0.5 * s.length + eps;
          },
          [&](const Line& l) { return std::abs(x.q * std::cos(l.theta) + x.p * std::sin(l.theta) - l.offset) <= eps; },
          [&](const Rectangle& b) {
            return x.q >= b.x0 - eps && x.q <= b.x0 + b.A + eps && x.p >= b.k0 - eps && x.p <= b.k0 + b.B + eps;
          },
          [&](const Disk& dk) { return std::hypot(x.q - dk.center.q, x.p - dk.center.p) <= 0.5 * dk.diameter + eps; },
          [&](const IsoTriangle& t) {
            const double c = std::cos(t.orientation), s = std::sin(t.orientation);
            const double u = c * x.q + s * x.p, v = -s * x.q + c * x.p;
            return u <= t.apothem + eps && std::abs(v) <= u * std::tan(0.5 * t.apex) + eps;
          },
          [&](const CanonicalPolygon& g) {
            for (int j = 0; j < g.sides; ++j) {
              const double a = 2.0 * std::numbers::pi * j / g.sides;
              if (x.q * std::cos(a) + x.p * std::sin(a) > g.apothem + eps) return false;
            }
            return true;
          },
          [&](const DiskCluster& c) {
            for (int i = 0; i <= c.m; ++i)
              for (int j = 0; j <= c.m; ++j)
                if (std::hypot(x.q - (c.c + i * c.d), x.p - (c.c + j * c.d)) <= 0.5 * c.d + eps) return true;
            return false;
          },
          [&](const Rotated& r2) { return region_contains(*r2.inner, RigidMap{r2.phi, {}}.apply_inverse(x)); },
          [&](const ReflectedOrigin& r2) { return region_contains(*r2.inner, Point{-x.q, -x.p}); },
          [&](const Displaced& r2) {
            return region_contains(*r2.inner, Point{x.q - r2.shift.q, x.p - r2.shift.p});
          },
          [&](const Union& u) {
            for (const auto& m : u.members)
              if (region_contains(*m, x)) return true;
            return false;
          },
      },
      r.variant());
}

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureSpec {
  int order = 64;          // nodes per axis
  bool adaptive = true;    // double the order until the operator settles
  int max_order = 256;
  double adapt_tol = 1e-6; // Frobenius change between successive orders
  int threads = 1;

  void validate() const {
    if (order < 4) throw InvalidArgument("quadrature order must be at least 4");
    if (max_order < order) throw InvalidArgument("max quadrature order below order");
  }
};

enum class Measure { area, arc_length };

struct QuadratureNode {
  Point point;
  double weight;
  Measure measure;
};

/// Singular parts handled by closed forms rather than quadrature.
struct SingularAtoms {
  std::vector<Line> lines;
  std::vector<Point> points;
};

namespace detail {

inline void rect_nodes(const Rectangle& b, int order, const RigidMap& map, std::vector<QuadratureNode>& out) {
  const GaussRule gq = gauss_legendre(order, b.x0, b.x0 + b.A);
  const GaussRule gp = gauss_legendre(order, b.k0, b.k0 + b.B);
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j)
      out.push_back({map.apply({gq.nodes[i], gp.nodes[j]}), gq.weights[i] * gp.weights[j], Measure::area});
}

// Collapsed tensor rule: (s, t) in [0,1]^2 -> s (B1 + t (B2 - B1)), Jacobian s * 2 area.
inline void triangle_nodes(const IsoTriangle& t, int order, const RigidMap& map, std::vector<QuadratureNode>& out) {
  const GaussRule g = gauss_legendre(order, 0.0, 1.0);
  const double h = std::tan(0.5 * t.apex);
  const double twice_area = 2.0 * t.apothem * t.apothem * h;
  const RigidMap local = map.after(RigidMap{t.orientation, {}});
  for (int i = 0; i < order; ++i) {
    const double s = g.nodes[i];
    for (int j = 0; j < order; ++j) {
      const double v = -h + 2.0 * h * g.nodes[j];
      const Point x{s * t.apothem, s * t.apothem * v};
      out.push_back({local.apply(x), g.weights[i] * g.weights[j] * s * twice_area, Measure::area});
    }
  }
}

// Gauss-Legendre in radius, periodic trapezoid in angle (exact for the
// trigonometric dependence e^{ik phi} with |k| < order).
inline void disk_nodes(Point center, double diameter, int order, const RigidMap& map,
                       std::vector<QuadratureNode>& out) {
  const double radius = 0.5 * diameter;
  const GaussRule g = gauss_legendre(order, 0.0, radius);
  const double dphi = 2.0 * std::numbers::pi / order;
  for (int i = 0; i < order; ++i) {
    const double r = g.nodes[i];
    for (int j = 0; j < order; ++j) {
      const double a = (j + 0.5) * dphi;
      out.push_back({map.apply({center.q + r * std::cos(a), center.p + r * std::sin(a)}), g.weights[i] * r * dphi,
                     Measure::area});
    }
  }
}

inline void decompose(const Region& r, int order, const RigidMap& map, std::vector<QuadratureNode>& nodes,
                      SingularAtoms& atoms) {
  std::visit(Overloaded{
                 [&](const PointOrigin&) { atoms.points.push_back(map.apply({0.0, 0.0})); },
                 [&](const Segment& s) {
                   const GaussRule g = gauss_legendre(order, -0.5 * s.length, 0.5 * s.length);
                   for (int i = 0; i < order; ++i) {
                     const Point x{s.center.q - g.nodes[i] * std::sin(s.theta), s.center.p + g.nodes[i] * std::cos(s.theta)};
                     nodes.push_back({map.apply(x), g.weights[i], Measure::arc_length});
                   }
                 },
                 [&](const Line& l) {
                   const double th = l.theta + map.phi;
                   atoms.lines.push_back({th, l.offset + map.shift.q * std::cos(th) + map.shift.p * std::sin(th)});
                 },
                 [&](const Rectangle& b) { rect_nodes(b, order, map, nodes); },
                 [&](const Disk& dk) { disk_nodes(dk.center, dk.diameter, order, map, nodes); },
                 [&](const IsoTriangle& t) { triangle_nodes(t, order, map, nodes); },
                 [&](const CanonicalPolygon& g) {
                   for (int j = 0; j < g.sides; ++j) {
                     const IsoTriangle t{g.apothem, 2.0 * std::numbers::pi / g.sides, 2.0 * std::numbers::pi * j / g.sides};
                     triangle_nodes(t, order, map, nodes);
                   }
                 },
                 [&](const DiskCluster& c) {
                   for (int i = 0; i <= c.m; ++i)
                     for (int j = 0; j <= c.m; ++j) disk_nodes({c.c + i * c.d, c.c + j * c.d}, c.d, order, map, nodes);
                 },
                 [&](const Rotated& x) { decompose(*x.inner, order, map.after(RigidMap{x.phi, {}}), nodes, atoms); },
                 [&](const ReflectedOrigin& x) {
                   decompose(*x.inner, order, map.after(RigidMap{std::numbers::pi, {}}), nodes, atoms);
                 },
                 [&](const Displaced& x) { decompose(*x.inner, order, map.after(RigidMap{0.0, x.shift}), nodes, atoms); },
                 [&](const Union& u) {
                   if (!u.disjoint) throw InvalidArgument("union is not declared disjoint");
                   for (const auto& m : u.members) decompose(*m, order, map, nodes, atoms);
                 },
             },
             r.variant());
}

}  // namespace detail

/// Splits a region into quadrature nodes (area and arc-length parts) and the
/// lines/points that have closed-form operators.
inline std::pair<std::vector<QuadratureNode>, SingularAtoms> decompose_region(const Region& r, int order) {
  if (order < 4) throw InvalidArgument("quadrature order must be at least 4");
  std::vector<QuadratureNode> nodes;
  SingularAtoms atoms;
  detail::decompose(r, order, RigidMap{}, nodes, atoms);
  return {std::move(nodes), std::move(atoms)};
}

/// Quadrature nodes for a region of finite measure. Area weights sum to the
/// area; segment weights (arc-length measure) sum to the length.
inline std::vector<QuadratureNode> quadrature_nodes(const Region& r, const QuadratureSpec& spec) {
  spec.validate();
  auto [nodes, atoms] = decompose_region(r, spec.order);
  if (!atoms.lines.empty()) throw InvalidArgument("quadrature_nodes: region contains a line (infinite extent)");
  if (!atoms.points.empty()) throw InvalidArgument("quadrature_nodes: region contains an isolated point");
  return nodes;
}

// ---------------------------------------------------------------------------
// Bounding boxes and overlap estimation

struct Box {
  double qmin, qmax, pmin, pmax;
  bool empty = false;
  double area() const { return empty ? 0.0 : (qmax - qmin) * (pmax - pmin); }
};

inline Box bounding_box(const Region& r) {
  auto transformed = [](const Box& b, const RigidMap& m) {
    if (b.empty) return b;
    Box out{1e300, -1e300, 1e300, -1e300};
    for (Point c : {Point{b.qmin, b.pmin}, Point{b.qmin, b.pmax}, Point{b.qmax, b.pmin}, Point{b.qmax, b.pmax}}) {
      const Point y = m.apply(c);
      out.qmin = std::min(out.qmin, y.q);
      out.qmax = std::max(out.qmax, y.q);
      out.pmin = std::min(out.pmin, y.p);
      out.pmax = std::max(out.pmax, y.p);
    }
    return out;
  };
  return std::visit(
      Overloaded{
          [](const PointOrigin&) { return Box{0, 0, 0, 0, true}; },
          [](const Segment&) { return Box{0, 0, 0, 0, true}; },
          [](const Line&) { return Box{0, 0, 0, 0, true}; },
          [](const Rectangle& b) { return Box{b.x0, b.x0 + b.A, b.k0, b.k0 + b.B}; },
          [](const Disk& d) {
            const double r = 0.5 * d.diameter;
            return Box{d.center.q - r, d.center.q + r, d.center.p - r, d.center.p + r};
          },
          [](const IsoTriangle& t) {
            const double r = t.apothem / std::cos(0.5 * t.apex);
            return Box{-r, r, -r, r};
          },
          [](const CanonicalPolygon& g) {
            const double r = g.apothem / std::cos(std::numbers::pi / g.sides);
            return Box{-r, r, -r, r};
          },
          [](const DiskCluster& c) {
            const double r = 0.5 * c.d;
            return Box{c.c - r, c.c + c.m * c.d + r, c.c - r, c.c + c.m * c.d + r};
          },
          [&](const Rotated& x) { return transformed(bounding_box(*x.inner), RigidMap{x.phi, {}}); },
          [&](const ReflectedOrigin& x) { return transformed(bounding_box(*x.inner), RigidMap{std::numbers::pi, {}}); },
          [&](const Displaced& x) { return transformed(bounding_box(*x.inner), RigidMap{0.0, x.shift}); },
          [](const Union& u) {
            Box out{1e300, -1e300, 1e300, -1e300, true};
            for (const auto& m : u.members) {
              const Box b = bounding_box(*m);
              if (b.empty) continue;
              out.empty = false;
              out.qmin = std::min(out.qmin, b.qmin);
              out.qmax = std::max(out.qmax, b.qmax);
              out.pmin = std::min(out.pmin, b.pmin);
              out.pmax = std::max(out.pmax, b.pmax);
            }
            return out;
          },
      },
      r.variant());
}

/// Monte Carlo estimate of the total area covered by two or more members of
/// a union (zero-area members are ignored).
inline double estimate_overlap_area(const Union& u, int samples = 200000, unsigned long long seed = 1) {
  std::vector<const Region*> solid;
  Box box{1e300, -1e300, 1e300, -1e300, true};
  for (const auto& m : u.members) {
    const Box b = bounding_box(*m);
    if (b.empty) continue;
    solid.push_back(m.get());
    box.empty = false;
    box.qmin = std::min(box.qmin, b.qmin);
    box.qmax = std::max(box.qmax, b.qmax);
    box.pmin = std::min(box.pmin, b.pmin);
    box.pmax = std::max(box.pmax, b.pmax);
  }
  if (solid.size() < 2) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uq(box.qmin, box.qmax), up(box.pmin, box.pmax);
  long hits = 0;
  for (int s = 0; s < samples; ++s) {
    const Point x{uq(rng), up(rng)};
    int inside = 0;
    for (const Region* m : solid)
      if (region_contains(*m, x) && ++inside >= 2) break;
    if (inside >= 2) ++hits;
  }
  return box.area() * double(hits) / samples;
}

/// Boundary polylines for plotting. Closed curves repeat their first point;
/// a point is a single-vertex polyline and a line is clipped to |t| <= reach.
inline std::vector<std::vector<Point>> region_outline(const Region& r, int samples = 64, double reach = 10.0) {
  using Polylines = std::vector<std::vector<Point>>;
  auto circle = [samples](Point c, double radius) {
    std::vector<Point> pts;
    for (int k = 0; k <= samples; ++k) {
      const double a = 2.0 * std::numbers::pi * (k % samples) / samples;
      pts.push_back({c.q + radius * std::cos(a), c.p + radius * std::sin(a)});
    }
    return pts;
  };
  auto transformed = [](Polylines lines, const RigidMap& m) {
    for (auto& l : lines)
      for (auto& x : l) x = m.apply(x);
    return lines;
  };
  return std::visit(
      Overloaded{
          [](const PointOrigin&) { return Polylines{{Point{}}}; },
          [](const Segment& s) {
            // runs along (-sin, cos), where the rotated quadrature is zero
            const double c = std::cos(s.theta), n = std::sin(s.theta), h = 0.5 * s.length;
            return Polylines{{{s.center.q + h * n, s.center.p - h * c}, {s.center.q - h * n, s.center.p + h * c}}};
          },
          [reach](const Line& l) {
            // {x : x . (cos, sin) = offset}
            const double c = std::cos(l.theta), n = std::sin(l.theta);
            const Point foot{l.offset * c, l.offset * n};
            return Polylines{{{foot.q + reach * n, foot.p - reach * c}, {foot.q - reach * n, foot.p + reach * c}}};
          },
          [](const Rectangle& b) {
            return Polylines{{{b.x0, b.k0}, {b.x0 + b.A, b.k0}, {b.x0 + b.A, b.k0 + b.B}, {b.x0, b.k0 + b.B}, {b.x0, b.k0}}};
          },
          [&](const Disk& d) { return Polylines{circle(d.center, 0.5 * d.diameter)}; },
          [&](const IsoTriangle& t) {
            const double h = t.apothem * std::tan(0.5 * t.apex);
            return transformed(Polylines{{{0, 0}, {t.apothem, -h}, {t.apothem, h}, {0, 0}}}, RigidMap{t.orientation, {}});
          },
          [](const CanonicalPolygon& g) {
            const double rad = g.apothem / std::cos(std::numbers::pi / g.sides);
            std::vector<Point> pts;
            for (int j = 0; j <= g.sides; ++j) {
              const double a = (2.0 * (j % g.sides) + 1.0) * std::numbers::pi / g.sides;
              pts.push_back({rad * std::cos(a), rad * std::sin(a)});
            }
            return Polylines{pts};
          },
          [&](const DiskCluster& c) {
            Polylines out;
            for (int i = 0; i <= c.m; ++i)
              for (int j = 0; j <= c.m; ++j) out.push_back(circle({c.c + i * c.d, c.c + j * c.d}, 0.5 * c.d));
            return out;
          },
          [&](const Rotated& x) { return transformed(region_outline(*x.inner, samples, reach), RigidMap{x.phi, {}}); },
          [&](const ReflectedOrigin& x) {
            return transformed(region_outline(*x.inner, samples, reach), RigidMap{std::numbers::pi, {}});
          },
          [&](const Displaced& x) { return transformed(region_outline(*x.inner, samples, reach), RigidMap{0.0, x.shift}); },
          [&](const Union& u) {
            Polylines out;
            for (const auto& m : u.members)
              for (auto& l : region_outline(*m, samples, reach)) out.push_back(std::move(l));
            return out;
          },
      },
      r.variant());
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Canonical descriptor; numbers round-trip exactly, so equal strings mean
/// equal regions.
inline std::string describe(const Region& r) {
  auto num = [](double v) { return format_number(v); };
  return std::visit(
      Overloaded{
          [&](const PointOrigin&) { return std::string("point"); },
          [&](const Segment& s) {
            return "seg(" + num(s.length) + "," + num(s.theta) + ")@(" + num(s.center.q) + "," + num(s.center.p) + ")";
          },
          [&](const Line& l) { return "line(" + num(l.theta) + "," + num(l.offset) + ")"; },
          [&](const Rectangle& b) { return "rect(" + num(b.x0) + "," + num(b.k0) + "," + num(b.A) + "," + num(b.B) + ")"; },
          [&](const Disk& d) { return "disk(" + num(d.center.q) + "," + num(d.center.p) + "," + num(d.diameter) + ")"; },
          [&](const IsoTriangle& t) {
            return "triangle(" + num(t.apothem) + "," + num(t.apex) + "," + num(t.orientation) + ")";
          },
          [&](const CanonicalPolygon& g) { return "poly(" + num(g.apothem) + "," + std::to_string(g.sides) + ")"; },
          [&](const DiskCluster& c) { return "cluster(" + num(c.c) + "," + num(c.d) + "," + std::to_string(c.m) + ")"; },
          [&](const Rotated& x) { return "rot(" + num(x.phi) + "," + describe(*x.inner) + ")"; },
          [&](const ReflectedOrigin& x) { return "refl(" + describe(*x.inner) + ")"; },
          [&](const Displaced& x) {
            return "disp(" + num(x.shift.q) + "," + num(x.shift.p) + "," + describe(*x.inner) + ")";
          },
          [&](const Union& u) {
            std::string s = "union(";
            for (std::size_t i = 0; i < u.members.size(); ++i) s += (i ? "," : "") + describe(*u.members[i]);
            return s + ")";
          },
      },
      r.variant());
}

}  // namespace qregion
