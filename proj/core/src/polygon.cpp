#include "giou/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "giou/box.hpp"

namespace giou {

namespace {

constexpr double kCollinearTol = 1e-12;

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double signed_area(std::span<const Point> v) {
  double s = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Point& p = v[i];
    const Point& q = v[(i + 1) % n];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * s;
}

void drop_adjacent_duplicates(std::vector<Point>& v) {
  v.erase(std::unique(v.begin(), v.end()), v.end());
  while (v.size() > 1 && v.front() == v.back()) {
    v.pop_back();
  }
}

// Removes vertices whose turn is negligible relative to the adjacent edge
// lengths. Repeats until no vertex is removed.
void drop_collinear(std::vector<Point>& v) {
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
      const std::size_t n = v.size();
      const Point& prev = v[(i + n - 1) % n];
      const Point& cur = v[i];
      const Point& next = v[(i + 1) % n];
      const double lin = std::hypot(cur.x - prev.x, cur.y - prev.y);
      const double lout = std::hypot(next.x - cur.x, next.y - cur.y);
      if (std::abs(cross(prev, cur, next)) < kCollinearTol * lin * lout) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
}

}  // namespace

ConvexPolygon::ConvexPolygon(std::vector<Point> vertices) : v_(std::move(vertices)) {
  for (const auto& p : v_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidInput("ConvexPolygon: vertex coordinates must be finite");
    }
  }
  drop_adjacent_duplicates(v_);
  if (v_.size() < 3) {
    throw InvalidInput("ConvexPolygon: at least 3 distinct vertices are required");
  }
  if (signed_area(v_) < 0.0) {
    std::reverse(v_.begin(), v_.end());
  }
  drop_collinear(v_);
  if (v_.size() < 3 || !(signed_area(v_) > 0.0)) {
    throw InvalidInput("ConvexPolygon: vertices span zero area");
  }

  // Every turn must be a left turn and the boundary must wind exactly once.
  double turning = 0.0;
  const std::size_t n = v_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& prev = v_[(i + n - 1) % n];
    const Point& cur = v_[i];
    const Point& next = v_[(i + 1) % n];
    if (cross(prev, cur, next) < 0.0) {
      throw InvalidInput("ConvexPolygon: polygon is not convex");
    }
    const double a_in = std::atan2(cur.y - prev.y, cur.x - prev.x);
    const double a_out = std::atan2(next.y - cur.y, next.x - cur.x);
    double d = a_out - a_in;
    while (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    turning += d;
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
    throw InvalidInput("ConvexPolygon: boundary is self-intersecting");
  }
}

double polygon_area(const ConvexPolygon& p) { return signed_area(p.vertices()); }

ConvexPolygon convex_hull(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) {
    throw InvalidInput("convex_hull: fewer than 3 distinct points");
  }

  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return ConvexPolygon(std::move(hull));
}

std::optional<ConvexPolygon> convex_intersection(const ConvexPolygon& a, const ConvexPolygon& b) {
  std::vector<Point> out(a.vertices().begin(), a.vertices().end());
  const auto clip = b.vertices();

  for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const Point& e0 = clip[e];
    const Point& e1 = clip[(e + 1) % clip.size()];
    std::vector<Point> in;
    in.swap(out);
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Point& cur = in[i];
      const Point& prev = in[(i + in.size() - 1) % in.size()];
      const double dc = cross(e0, e1, cur);
      const double dp = cross(e0, e1, prev);
      if (dc >= 0.0) {
        if (dp < 0.0) {
          const double t = dp / (dp - dc);
          out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
        }
        out.push_back(cur);
      } else if (dp >= 0.0) {
        const double t = dp / (dp - dc);
        out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
      }
    }
  }

  // The clipped ring is convex up to rounding; re-hulling it yields a clean
  // polygon and rejects slivers that collapse to a segment or point.
  if (out.size() < 3) {
    return std::nullopt;
  }
  try {
    return convex_hull(out);
  } catch (const InvalidInput&) {
    return std::nullopt;
  }
}

ConvexPolygon enclosing_hull(const ConvexPolygon& a, const ConvexPolygon& b) {
  std::vector<Point> pts(a.vertices().begin(), a.vertices().end());
  pts.insert(pts.end(), b.vertices().begin(), b.vertices().end());
  return convex_hull(pts);
}

PolygonMetrics polygon_giou(const ConvexPolygon& a, const ConvexPolygon& b) {
  const double area_a = polygon_area(a);
  const double area_b = polygon_area(b);
  const auto inter_poly = convex_intersection(a, b);
  const double inter = inter_poly ? polygon_area(*inter_poly) : 0.0;
  const double hull = polygon_area(enclosing_hull(a, b));

  PolygonMetrics m;
  m.intersection = inter;
  m.union_area = area_a + area_b - inter;
  m.hull_area = hull;
  m.iou = inter / m.union_area;
  m.giou = m.iou - std::max(hull - m.union_area, 0.0) / hull;
  return m;
}

ConvexPolygon polygon_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("polygon: invalid JSON: ") + e.what());
  }
  if (!j.is_array()) {
    throw InvalidInput("polygon: expected a JSON array of [x, y] pairs");
  }
  std::vector<Point> pts;
  for (const auto& v : j) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw InvalidInput("polygon: every vertex must be a [x, y] pair of numbers");
    }
    pts.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return ConvexPolygon(std::move(pts));
}

std::string polygon_to_json(const ConvexPolygon& p) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& v : p.vertices()) {
    j.push_back({v.x, v.y});
  }
  return j.dump();
}

}  // namespace giou
