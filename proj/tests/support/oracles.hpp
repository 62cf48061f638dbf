#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library's geometry code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace giou::testing {

struct Pt {
  double x, y;
};

/// Crossing-number point-in-polygon test (any simple polygon, any orientation).
inline bool point_in_polygon(const std::vector<Pt>& poly, double x, double y) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Pt& a = poly[i];
    const Pt& b = poly[j];
    if ((a.y > y) != (b.y > y)) {
      const double xs = (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x;
      if (x < xs) inside = !inside;
    }
  }
  return inside;
}

/// Monte Carlo estimate of GIoU = I/U + U/C - 1 from nested indicator
/// frequencies (I within U within C), sampled uniformly inside an axis-aligned
/// region that contains C. The standard error comes from the delta method
/// applied to the multinomial covariance of the three indicators.
struct McGiou {
  double giou;
  double stderr_;
  double p_inter, p_union, p_hull;
};

inline McGiou mc_giou_from_counts(double n, double n_inter, double n_union, double n_hull) {
  const double pi = n_inter / n, pu = n_union / n, pc = n_hull / n;
  McGiou r{pi / pu + pu / pc - 1.0, 0.0, pi, pu, pc};
  const std::array<double, 3> g = {1.0 / pu, -pi / (pu * pu) + 1.0 / pc, -pu / (pc * pc)};
  const std::array<double, 3> p = {pi, pu, pc};
  double var = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const double small = p[std::min(a, b)];
      const double large = p[std::max(a, b)];
      var += g[a] * g[b] * (small - small * large);
    }
  }
  r.stderr_ = std::sqrt(std::max(var, 0.0) / n);
  return r;
}

/// Region membership functions for the Monte Carlo GIoU oracle in d dims.
using Membership = std::function<bool(const std::vector<double>&)>;

inline McGiou mc_giou(const Membership& in_a, const Membership& in_b, const Membership& in_hull,
                      const std::vector<std::pair<double, double>>& region, std::size_t n,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> dist;
  for (const auto& [lo, hi] : region) dist.emplace_back(lo, hi);
  std::vector<double> x(region.size());
  double ni = 0, nu = 0, nc = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t d = 0; d < x.size(); ++d) x[d] = dist[d](rng);
    if (!in_hull(x)) continue;
    nc += 1;
    const bool a = in_a(x);
    const bool b = in_b(x);
    if (a || b) nu += 1;
    if (a && b) ni += 1;
  }
  return mc_giou_from_counts(static_cast<double>(n), ni, nu, nc);
}

/// Area estimate of a region by uniform sampling inside a bounding box.
struct McArea {
  double area;
  double stderr_;
};

inline McArea mc_area(const Membership& in, const std::vector<std::pair<double, double>>& region,
                      std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> dist;
  double vol = 1.0;
  for (const auto& [lo, hi] : region) {
    dist.emplace_back(lo, hi);
    vol *= hi - lo;
  }
  std::vector<double> x(region.size());
  double hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t d = 0; d < x.size(); ++d) x[d] = dist[d](rng);
    if (in(x)) hits += 1;
  }
  const double p = hits / static_cast<double>(n);
  return {p * vol, vol * std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

/// Axis-aligned box membership from per-axis closed intervals.
inline Membership box_membership(std::vector<std::pair<double, double>> axes) {
  return [axes = std::move(axes)](const std::vector<double>& x) {
    for (std::size_t d = 0; d < axes.size(); ++d) {
      if (x[d] < axes[d].first || x[d] > axes[d].second) return false;
    }
    return true;
  };
}

inline Membership polygon_membership(std::vector<Pt> poly) {
  return [poly = std::move(poly)](const std::vector<double>& x) { return point_in_polygon(poly, x[0], x[1]); };
}

/// Convex hull area by exhaustive orientation tests: a directed segment (p, q)
/// is a maximal hull edge iff no point lies to its right and no collinear
/// point lies outside [p, q]. Shoelace contributions of those edges sum to the
/// hull area regardless of their order.
inline double brute_force_hull_area(const std::vector<Pt>& pts) {
  double twice = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const Pt& p = pts[i];
      const Pt& q = pts[j];
      if (p.x == q.x && p.y == q.y) continue;
      bool edge = true;
      for (std::size_t k = 0; k < pts.size() && edge; ++k) {
        const Pt& r = pts[k];
        const double c = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
        if (c < 0) {
          edge = false;
        } else if (c == 0) {
          const double t = (r.x - p.x) * (q.x - p.x) + (r.y - p.y) * (q.y - p.y);
          const double len2 = (q.x - p.x) * (q.x - p.x) + (q.y - p.y) * (q.y - p.y);
          if (t < 0 || t > len2) edge = false;
        }
      }
      if (edge) twice += p.x * q.y - q.x * p.y;
    }
  }
  // Duplicate points would contribute the same edge several times.
  return 0.5 * twice;
}

/// Convex hull ring by gift wrapping (Jarvis march), counterclockwise.
inline std::vector<Pt> gift_wrap_hull(const std::vector<Pt>& all) {
  std::size_t start = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].x < all[start].x || (all[i].x == all[start].x && all[i].y < all[start].y)) start = i;
  }
  std::vector<Pt> ring;
  std::size_t cur = start;
  do {
    ring.push_back(all[cur]);
    std::size_t next = (cur + 1) % all.size();
    for (std::size_t i = 0; i < all.size(); ++i) {
      const double c = (all[next].x - all[cur].x) * (all[i].y - all[cur].y) -
                       (all[next].y - all[cur].y) * (all[i].x - all[cur].x);
      if (c < 0) next = i;
    }
    cur = next;
  } while (cur != start && ring.size() <= all.size());
  return ring;
}

/// Monte Carlo GIoU of two convex polygons given as vertex lists, sampling the
/// bounding rectangle of both.
inline McGiou mc_polygon_giou(const std::vector<Pt>& a, const std::vector<Pt>& b, std::size_t n,
                              std::uint64_t seed) {
  std::vector<Pt> all = a;
  all.insert(all.end(), b.begin(), b.end());
  const auto ring = gift_wrap_hull(all);
  double x0 = all[0].x, x1 = all[0].x, y0 = all[0].y, y1 = all[0].y;
  for (const auto& p : all) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  double ni = 0, nu = 0, nc = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = ux(rng), y = uy(rng);
    if (!point_in_polygon(ring, x, y)) continue;
    nc += 1;
    const bool ia = point_in_polygon(a, x, y);
    const bool ib = point_in_polygon(b, x, y);
    if (ia || ib) nu += 1;
    if (ia && ib) ni += 1;
  }
  return mc_giou_from_counts(static_cast<double>(n), ni, nu, nc);
}

/// Greedy matching restated as a search: among all partial injective maps of
/// detections (in descending score order) to ground truths whose similarity
/// reaches the threshold, pick the one whose vector of matched similarities is
/// lexicographically largest (unmatched = -inf). Exponential; for <= 4x4.
inline std::vector<bool> brute_force_match(const std::vector<std::vector<double>>& sim, double threshold) {
  const std::size_t nd = sim.size();
  const std::size_t ng = nd == 0 ? 0 : sim[0].size();
  std::vector<int> assign(nd, -1), best_assign(nd, -1);
  std::vector<double> best(nd, -std::numeric_limits<double>::infinity());
  bool have_best = false;
  std::vector<bool> used(ng, false);

  std::function<void(std::size_t)> rec = [&](std::size_t d) {
    if (d == nd) {
      std::vector<double> v(nd);
      for (std::size_t i = 0; i < nd; ++i) {
        v[i] = assign[i] < 0 ? -std::numeric_limits<double>::infinity() : sim[i][assign[i]];
      }
      if (!have_best || std::lexicographical_compare(best.begin(), best.end(), v.begin(), v.end())) {
        best = v;
        best_assign = assign;
        have_best = true;
      }
      return;
    }
    assign[d] = -1;
    rec(d + 1);
    for (std::size_t g = 0; g < ng; ++g) {
      if (used[g] || sim[d][g] < threshold) continue;
      used[g] = true;
      assign[d] = static_cast<int>(g);
      rec(d + 1);
      used[g] = false;
      assign[d] = -1;
    }
  };
  rec(0);
  std::vector<bool> tp(nd);
  for (std::size_t i = 0; i < nd; ++i) tp[i] = best_assign[i] >= 0;
  return tp;
}

/// Exact rational-free AP reference: builds the precision/recall curve and
/// interpolates at recall k/100 by scanning, without binary search.
inline double reference_ap101(const std::vector<bool>& tp, std::size_t num_gt) {
  if (num_gt == 0 || tp.empty()) return 0.0;
  std::vector<double> rc, pr;
  double a = 0, f = 0;
  for (bool t : tp) {
    (t ? a : f) += 1;
    rc.push_back(a / static_cast<double>(num_gt));
    pr.push_back(a / (a + f));
  }
  double sum = 0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    double best = 0.0;
    for (std::size_t i = 0; i < rc.size(); ++i) {
      if (rc[i] >= r) best = std::max(best, pr[i]);
    }
    sum += best;
  }
  return sum / 101.0;
}

/// Uniform random canonical box with positive area inside [lo, hi]^2.
template <class Rng>
std::array<double, 4> random_box(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  for (;;) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (a == b || c == d) continue;
    return {std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d)};
  }
}

}  // namespace giou::testing
