#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace giou {

struct Point {
  double x;
  double y;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Convex polygon with counterclockwise vertices, no repeated adjacent
/// vertices and no collinear runs.
///
/// Construction normalizes the input: adjacent duplicates are removed,
/// clockwise input is reversed, and vertices whose turn is negligible
/// (|cross| < 1e-12 * |e_in| * |e_out|) are dropped. Non-convex, self-winding
/// or degenerate inputs (fewer than 3 vertices left) throw InvalidInput.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Point> vertices);

  std::span<const Point> vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }

 private:
  std::vector<Point> v_;
};

struct PolygonMetrics {
  double intersection;
  double union_area;
  double hull_area;
  double iou;
  double giou;
};

/// Shoelace area. Strictly positive for a valid polygon.
double polygon_area(const ConvexPolygon& p);

/// Exact intersection of two convex polygons by clipping `a` against every
/// edge of `b`. Returns nullopt when the interiors do not overlap, including
/// contact along an edge or at a vertex.
std::optional<ConvexPolygon> convex_intersection(const ConvexPolygon& a, const ConvexPolygon& b);

/// Convex hull of the union of both vertex sets (monotone chain).
ConvexPolygon enclosing_hull(const ConvexPolygon& a, const ConvexPolygon& b);

/// Convex hull of an arbitrary point set. Throws InvalidInput if the points
/// span zero area.
ConvexPolygon convex_hull(std::span<const Point> points);

PolygonMetrics polygon_giou(const ConvexPolygon& a, const ConvexPolygon& b);

/// Parses a JSON array of [x, y] pairs, e.g. "[[0,0],[1,0],[1,1],[0,1]]".
ConvexPolygon polygon_from_json(std::string_view text);

std::string polygon_to_json(const ConvexPolygon& p);

}  // namespace giou
