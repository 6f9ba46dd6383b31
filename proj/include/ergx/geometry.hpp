#pragma once
// Exact geometry of a planar lattice convex support: hull, inequality
// description, faces and their normal cones.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ergx/enumerate.hpp"
#include "ergx/error.hpp"
#include "ergx/rational.hpp"

namespace ergx {

using IntVec = std::vector<std::int64_t>;

/// <a, t> <= b with a primitive.
struct HalfPlane {
  IntVec a;
  std::int64_t b = 0;
  friend bool operator==(const HalfPlane&, const HalfPlane&) = default;
};

struct SupportPolytope {
  int k = 2;
  std::vector<IntVec> support_points;  // lexicographic order
  std::vector<IntVec> vertices;        // counter-clockwise, starting at the lexicographic minimum
  std::vector<HalfPlane> hrep;         // row i supports the edge vertices[i] -> vertices[i+1]

  std::size_t num_vertices() const { return vertices.size(); }
};

enum class FaceDim { vertex = 0, edge = 1, improper = 2 };

struct Face {
  int id = 0;
  int dim = 0;
  std::vector<int> active_rows;
  std::vector<int> members;  // indices into SupportPolytope::support_points
};

struct NormalCone {
  int face_id = 0;
  std::vector<IntVec> generators;
  std::vector<Eigen::VectorXd> lin_basis;  // orthonormal basis of lin(N_F)
  int dim() const { return static_cast<int>(lin_basis.size()); }
};

struct NormalFan {
  std::vector<NormalCone> cones;  // cones[i] belongs to face i
};

struct FaceLocation {
  int face_id = 0;
  int dim = 0;
  friend bool operator==(const FaceLocation&, const FaceLocation&) = default;
};

namespace detail {

inline std::int64_t cross(const IntVec& o, const IntVec& a, const IntVec& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline std::int64_t dot(const IntVec& a, const IntVec& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// Face ids: vertex i -> i, edge i (vertices i, i+1) -> m + i, improper -> 2m.
inline int vertex_face_id(const SupportPolytope&, int i) { return i; }
inline int edge_face_id(const SupportPolytope& p, int i) { return static_cast<int>(p.num_vertices()) + i; }
inline int improper_face_id(const SupportPolytope& p) { return 2 * static_cast<int>(p.num_vertices()); }

/// Convex hull of planar lattice points by monotone chain (collinear points
/// dropped), plus primitive outward normals for each edge.
inline SupportPolytope build_polytope(std::vector<IntVec> points) {
  for (const auto& p : points)
    if (p.size() != 2) throw InfeasibleInput("face lattice and hull are implemented for k = 2 statistics only; use the LP existence test for other k");
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  SupportPolytope out;
  out.support_points = points;
  if (points.size() < 3) throw InfeasibleInput("support is not full-dimensional (fewer than 3 points)");

  std::vector<IntVec> hull(2 * points.size());
  std::size_t h = 0;
  for (const auto& p : points) {
    while (h >= 2 && detail::cross(hull[h - 2], hull[h - 1], p) <= 0) --h;
    hull[h++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = h + 1; i-- > 0;) {
    while (h >= lower && detail::cross(hull[h - 2], hull[h - 1], points[i]) <= 0) --h;
    hull[h++] = points[i];
  }
  hull.resize(h - 1);
  if (hull.size() < 3) throw InfeasibleInput("support points are collinear; the convex support is not full-dimensional");
  out.vertices = hull;

  const std::size_t m = hull.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& p = hull[i];
    const auto& q = hull[(i + 1) % m];
    std::int64_t ax = q[1] - p[1], ay = -(q[0] - p[0]);  // right-hand normal of a ccw edge
    const std::int64_t g = std::gcd(std::abs(ax), std::abs(ay));
    ax /= g;
    ay /= g;
    out.hrep.push_back({{ax, ay}, ax * p[0] + ay * p[1]});
  }
  return out;
}

inline SupportPolytope build_polytope(const InducedMeasure& m) {
  if (m.k() != 2) throw InfeasibleInput("face lattice and hull are implemented for k = 2 statistics only; use the LP existence test for other k");
  std::vector<IntVec> pts;
  for (auto& [t, c] : m.support()) pts.push_back(t);
  return build_polytope(std::move(pts));
}

/// Vertices, edges and the improper face, with members found by exact
/// tight-row tests.
inline std::vector<Face> face_lattice(const SupportPolytope& p) {
  const int m = static_cast<int>(p.num_vertices());
  std::vector<Face> faces(static_cast<std::size_t>(2 * m + 1));
  for (int i = 0; i < m; ++i) {
    faces[i].id = i;
    faces[i].dim = 0;
    faces[i].active_rows = {(i + m - 1) % m, i};
    faces[m + i].id = m + i;
    faces[m + i].dim = 1;
    faces[m + i].active_rows = {i};
  }
  faces[2 * m].id = 2 * m;
  faces[2 * m].dim = 2;
  for (int s = 0; s < static_cast<int>(p.support_points.size()); ++s) {
    const auto& t = p.support_points[s];
    faces[2 * m].members.push_back(s);
    for (int i = 0; i < m; ++i) {
      if (detail::dot(p.hrep[i].a, t) == p.hrep[i].b) faces[m + i].members.push_back(s);
      if (t == p.vertices[i]) faces[i].members.push_back(s);
    }
  }
  for (const auto& f : faces)
    if (f.members.empty()) throw InfeasibleInput("face " + std::to_string(f.id) + " carries no support point");
  return faces;
}

inline NormalFan normal_fan(const SupportPolytope& p, const std::vector<Face>& faces) {
  NormalFan fan;
  for (const auto& f : faces) {
    NormalCone c;
    c.face_id = f.id;
    if (f.dim < 2)
      for (int r : f.active_rows) c.generators.push_back(p.hrep[r].a);
    if (f.dim == 0) {
      c.lin_basis = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
    } else if (f.dim == 1) {
      Eigen::Vector2d a(static_cast<double>(c.generators[0][0]), static_cast<double>(c.generators[0][1]));
      c.lin_basis = {a.normalized()};
    }
    fan.cones.push_back(std::move(c));
  }
  return fan;
}

/// Face whose tight set equals `tight` (sorted row indices), if any.
inline std::optional<FaceLocation> face_from_tight_rows(const SupportPolytope& p, const std::vector<int>& tight) {
  const int m = static_cast<int>(p.num_vertices());
  if (tight.empty()) return FaceLocation{improper_face_id(p), 2};
  if (tight.size() == 1) return FaceLocation{edge_face_id(p, tight[0]), 1};
  if (tight.size() == 2) {
    if (tight[1] == tight[0] + 1) return FaceLocation{vertex_face_id(p, tight[1]), 0};
    if (tight[0] == 0 && tight[1] == m - 1) return FaceLocation{vertex_face_id(p, 0), 0};
  }
  return std::nullopt;
}

/// Exact location of a rational point: the face with x in its relative
/// interior, or nullopt when x is outside P.
inline std::optional<FaceLocation> classify_point(const SupportPolytope& p, const RationalVec& x) {
  if (x.size() != 2) throw InfeasibleInput("classify_point expects a 2-vector");
  std::vector<int> tight;
  for (int i = 0; i < static_cast<int>(p.hrep.size()); ++i) {
    const auto& h = p.hrep[i];
    Rational slack = Rational(h.b) - Rational(h.a[0]) * x[0] - Rational(h.a[1]) * x[1];
    if (slack < 0) return std::nullopt;
    if (slack == 0) tight.push_back(i);
  }
  auto loc = face_from_tight_rows(p, tight);
  if (!loc) throw NumericalFailure("inconsistent tight rows for an exact point");
  return loc;
}

inline std::optional<FaceLocation> classify_point(const SupportPolytope& p, const IntVec& x) { return classify_point(p, to_rational(x)); }

/// Rounded variant: rows within Euclidean distance `tol` count as tight.
/// Throws NumericalFailure when the near-tight rows do not single out a
/// face; such points should be classified in exact mode.
inline std::optional<FaceLocation> classify_point(const SupportPolytope& p, const Eigen::VectorXd& x, double tol) {
  if (x.size() != 2) throw InfeasibleInput("classify_point expects a 2-vector");
  if (!(tol > 0)) throw InfeasibleInput("tolerance mode needs tol > 0; pass a rational point for exact mode");
  std::vector<int> tight;
  for (int i = 0; i < static_cast<int>(p.hrep.size()); ++i) {
    const auto& h = p.hrep[i];
    const double ax = static_cast<double>(h.a[0]), ay = static_cast<double>(h.a[1]);
    const double dist = (static_cast<double>(h.b) - ax * x[0] - ay * x[1]) / std::hypot(ax, ay);
    if (dist < -tol) return std::nullopt;
    if (dist <= tol) tight.push_back(i);
  }
  auto loc = face_from_tight_rows(p, tight);
  if (!loc) throw NumericalFailure("point is within tolerance of several faces; classify it in exact mode");
  return loc;
}

/// Cone of the fan whose relative interior contains the direction d, i.e.
/// the face of maximizers of <d, t> over P (d = 0 gives the improper face).
inline FaceLocation classify_direction(const SupportPolytope& p, const RationalVec& d) {
  if (d.size() != 2) throw InfeasibleInput("classify_direction expects a 2-vector");
  const int m = static_cast<int>(p.num_vertices());
  if (d[0] == 0 && d[1] == 0) return {improper_face_id(p), 2};
  std::vector<Rational> val(static_cast<std::size_t>(m));
  Rational best;
  for (int i = 0; i < m; ++i) {
    val[i] = Rational(p.vertices[i][0]) * d[0] + Rational(p.vertices[i][1]) * d[1];
    if (i == 0 || val[i] > best) best = val[i];
  }
  std::vector<int> arg;
  for (int i = 0; i < m; ++i)
    if (val[i] == best) arg.push_back(i);
  if (arg.size() == 1) return {vertex_face_id(p, arg[0]), 0};
  if (arg.size() == 2) {
    if (arg[1] == arg[0] + 1) return {edge_face_id(p, arg[0]), 1};
    if (arg[0] == 0 && arg[1] == m - 1) return {edge_face_id(p, m - 1), 1};
  }
  throw NumericalFailure("direction maximized on a non-face vertex set");
}

/// Floating-point direction classification. Gaps at rounding level count as
/// ties; gaps above that but within `tol` (relative to |d| times the
/// polytope diameter) are ambiguous.
inline FaceLocation classify_direction(const SupportPolytope& p, const Eigen::VectorXd& d, double tol) {
  const int m = static_cast<int>(p.num_vertices());
  if (d.norm() == 0) return {improper_face_id(p), 2};
  double diam = 1;
  for (const auto& v : p.vertices) diam = std::max(diam, std::hypot(static_cast<double>(v[0]), static_cast<double>(v[1])));
  std::vector<double> val(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) val[i] = static_cast<double>(p.vertices[i][0]) * d[0] + static_cast<double>(p.vertices[i][1]) * d[1];
  const double best = *std::max_element(val.begin(), val.end());
  const double rounding = 64 * std::numeric_limits<double>::epsilon() * d.norm() * diam;
  std::vector<int> exact, near;
  for (int i = 0; i < m; ++i) {
    if (best - val[i] <= rounding) exact.push_back(i);
    if (best - val[i] <= tol * d.norm() * diam) near.push_back(i);
  }
  if (near.size() != exact.size())
    throw NumericalFailure("direction lies within tolerance of a cone boundary; supply it as an exact rational direction");
  if (exact.size() == 1) return {vertex_face_id(p, exact[0]), 0};
  if (exact.size() == 2) {
    if (exact[1] == exact[0] + 1) return {edge_face_id(p, exact[0]), 1};
    if (exact[0] == 0 && exact[1] == m - 1) return {edge_face_id(p, m - 1), 1};
  }
  throw NumericalFailure("direction maximized on a non-face vertex set");
}

/// Normalized positive combination of the unit-scaled generators with the
/// given strictly positive weights.
inline Eigen::VectorXd ri_direction(const NormalCone& cone, const std::vector<double>& weights) {
  if (cone.generators.empty()) throw InfeasibleInput("the zero cone has no relative-interior direction");
  if (weights.size() != cone.generators.size()) throw InfeasibleInput("one weight per generator required");
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cone.generators[0].size()));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0)) throw InfeasibleInput("weights must be strictly positive");
    Eigen::VectorXd gi(d.size());
    for (Eigen::Index a = 0; a < d.size(); ++a) gi[a] = static_cast<double>(cone.generators[i][static_cast<std::size_t>(a)]);
    d += weights[i] * gi.normalized();
  }
  return d.normalized();
}

inline Eigen::VectorXd sample_ri_direction(const NormalCone& cone, std::uint64_t seed) {
  if (cone.generators.empty()) throw InfeasibleInput("the zero cone has no relative-interior direction");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::vector<double> w(cone.generators.size());
  for (auto& x : w) x = unif(rng);
  return ri_direction(cone, w);
}

}  // namespace ergx
