#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "simplexdb/schema.hpp"
#include "simplexdb/zigzag.hpp"

namespace simplexdb {

/// Tolerance for coordinate sums on the standard simplex.
inline constexpr double kSimplexTolerance = 1e-9;

/// The standard n-simplex: non-negative coordinates summing to 1.
class StandardSimplex {
 public:
  explicit StandardSimplex(int n);
  int dim() const { return n_; }
  bool contains(const std::vector<double>& coords) const;
  /// The i-th vertex (unit coordinate vector).
  std::vector<double> vertex(int i) const;

 private:
  int n_;
};

struct Barycentric {
  SimplexId simplex;
  std::vector<double> coords;
};

struct Point {
  double x = 0;
  double y = 0;
  bool operator==(const Point&) const = default;
};

using Polyline = std::vector<Point>;

struct Layout {
  std::map<SimplexId, Point> points;
  bool operator==(const Layout&) const = default;
};

inline constexpr int kLayoutIterations = 500;
/// Vertex disk radius and sampling scale, as a fraction of the layout extent.
inline constexpr double kLocateEpsilon = 0.02;

/// Force-directed placement of the vertices (unit ideal edge length) centred
/// on the origin. Deterministic in (schema, seed).
Layout layout_schema(const Schema& schema, std::uint64_t seed);

/// Larger side of the layout's bounding box (1 when degenerate).
double layout_scale(const Layout& layout);

/// Drawn shape of an edge: a straight segment, an offset arc for parallel
/// edges, or a circle for a loop. Runs from the slot 0 vertex to the slot 1 vertex.
Polyline edge_curve(const Schema& schema, const Layout& layout, const SimplexId& edge);

/// Outline of a simplex for display: vertex point, edge curve, or the polygon
/// through its vertices.
Polyline simplex_outline(const Schema& schema, const Layout& layout, const SimplexId& id);

/// Lowest-dimensional simplex whose region holds the point; lowest id on ties.
std::optional<SimplexId> locate_point(const Schema& schema, const Layout& layout, Point p);

/// Position of `p` within the drawn simplex: for an edge, the curve parameter
/// split over its two slots; for a triangle, planar barycentric coordinates.
Barycentric barycentric_at(const Schema& schema, const Layout& layout, const SimplexId& id, Point p);

/// Samples the curve at step epsilon/2 of arc length and turns the visited
/// simplices into a zigzag. Face maps are read off where the curve crosses
/// between a simplex and its face.
Zigzag curve_to_zigzag(const Schema& schema, const Layout& layout, const Polyline& curve);

}  // namespace simplexdb
