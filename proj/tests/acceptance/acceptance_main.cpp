// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only
// when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eval_fixtures.hpp"
#include "giou/box.hpp"
#include "giou/box_nd.hpp"
#include "giou/eval.hpp"
#include "giou/grad.hpp"
#include "giou/polygon.hpp"
#include "giou/regression.hpp"
#include "giou/sampling.hpp"
#include "oracles.hpp"
#include "polygons.hpp"
#include "regression_demo.hpp"

namespace {

using giou::Box2D;
using giou::CanonicalBox2D;
namespace ot = giou::testing;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

CanonicalBox2D cbox(const std::array<double, 4>& c) { return {c[0], c[1], c[2], c[3]}; }

// Pair generator shared by several criteria: coordinates over ranges spanning
// small and large boxes.
CanonicalBox2D any_box(std::mt19937_64& rng, std::uint64_t i) {
  static constexpr double kHi[] = {1.0, 10.0, 100.0, 1000.0};
  return cbox(ot::random_box(rng, 0.0, kHi[i % 4]));
}

// ---------------------------------------------------------------------------

Outcome bounds_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::size_t bad = 0;
  for (std::uint64_t i = 0; i < 1'000'000; ++i) {
    const auto a = any_box(rng, i);
    const auto b = any_box(rng, i);
    const auto m = giou::pair_metrics(a.raw(), b);
    const double li = 1.0 - m.iou, lg = 1.0 - m.giou;
    const bool ok = m.iou >= 0.0 && m.iou <= 1.0 && m.giou >= -1.0 && m.giou <= 1.0 &&
                    m.giou <= m.iou + 1e-12 && li >= 0.0 && li <= 1.0 && lg >= 0.0 && lg <= 2.0;
    if (!ok) ++bad;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 10.0, fmt("10^6 pairs, %zu violations, %.2f s (limit 10 s)", bad, secs)};
}

Outcome metric_axioms() {
  std::mt19937_64 rng(1002);
  std::size_t asym = 0;
  for (std::uint64_t i = 0; i < 100'000; ++i) {
    const auto a = any_box(rng, i);
    const auto b = any_box(rng, i);
    const auto ab = giou::pair_metrics(a.raw(), b);
    const auto ba = giou::pair_metrics(b.raw(), a);
    if (ab.iou != ba.iou || ab.giou != ba.giou) ++asym;
  }
  std::size_t ident = 0;
  std::uniform_real_distribution<double> nudge(1e-6, 1e-2);
  std::bernoulli_distribution sign(0.5);
  for (std::uint64_t i = 0; i < 10'000; ++i) {
    const auto a = any_box(rng, i);
    if (giou::giou_loss(a.raw(), a) != 0.0 || giou::iou_loss(a.raw(), a) != 0.0) ++ident;
    auto c = a.coords();
    c[i % 4] += (sign(rng) ? 1 : -1) * nudge(rng) * (a.width() + a.height());
    const auto b = giou::canonicalize(Box2D::from_array(c));
    if (!(giou::giou_loss(b.raw(), a) > 0.0) || !(giou::iou_loss(b.raw(), a) > 0.0)) ++ident;
  }
  std::size_t tri = 0;
  for (std::uint64_t i = 0; i < 100'000; ++i) {
    const auto a = any_box(rng, i % 2);
    const auto b = any_box(rng, i % 2);
    const auto c = any_box(rng, i % 2);
    if (giou::giou_loss(a.raw(), c) > giou::giou_loss(a.raw(), b) + giou::giou_loss(b.raw(), c) + 1e-9) ++tri;
    if (giou::iou_loss(a.raw(), c) > giou::iou_loss(a.raw(), b) + giou::iou_loss(b.raw(), c) + 1e-9) ++tri;
  }
  return {asym == 0 && ident == 0 && tri == 0,
          fmt("symmetry breaks %zu/10^5, identity breaks %zu/10^4, triangle breaks %zu/10^5 triples x 2 losses", asym,
              ident, tri)};
}

Outcome invariance_suite() {
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> shift(-100.0, 100.0);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 10'000; ++i) {
    const auto a = cbox(ot::random_box(rng, 0.0, 10.0));
    const auto b = cbox(ot::random_box(rng, 0.0, 10.0));
    const auto m = giou::pair_metrics(a.raw(), b);
    for (double s : {1e-3, 1.0, 1e3}) {
      const double tx = s * shift(rng), ty = s * shift(rng);
      auto tr = [&](const CanonicalBox2D& x) {
        return CanonicalBox2D(x.x1() * s + tx, x.y1() * s + ty, x.x2() * s + tx, x.y2() * s + ty);
      };
      const auto mt = giou::pair_metrics(tr(a).raw(), tr(b));
      auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::max(std::abs(x), std::abs(y))); };
      worst = std::max({worst, rel(m.iou, mt.iou), rel(m.giou, mt.giou)});
    }
  }
  return {worst < 1e-9, fmt("10^4 pairs x scales {1e-3,1,1e3} + translations, max relative change %.3g (limit 1e-9)",
                            worst)};
}

Outcome limit_suite() {
  const CanonicalBox2D unit(0, 0, 1, 1);
  const double g = giou::pair_metrics(Box2D(1e3, 1e3, 1e3 + 1, 1e3 + 1), unit).giou;
  bool monotone = true;
  double prev = 2.0;
  for (double d = 1.0; d <= 1e3; d *= 1.1) {
    const double v = giou::pair_metrics(Box2D(d, d, d + 1, d + 1), unit).giou;
    if (!(v < prev)) monotone = false;
    prev = v;
  }
  return {g < -0.99 && monotone, fmt("giou at d=1e3 is %.9f (limit < -0.99), strictly decreasing in d: %s", g,
                                     monotone ? "yes" : "no")};
}

double rel_err(double a, double n) { return std::abs(a - n) / std::max({1.0, std::abs(a), std::abs(n)}); }

Outcome gradient_suite() {
  std::mt19937_64 rng(1005);
  std::bernoulli_distribution flip(0.25);
  double worst = 0.0;
  int checked = 0, skipped = 0;
  while (checked < 10'000) {
    auto c = ot::random_box(rng, 0.0, 10.0);
    if (flip(rng)) std::swap(c[0], c[2]);
    if (flip(rng)) std::swap(c[1], c[3]);
    const Box2D p = Box2D::from_array(c);
    const auto g = cbox(ot::random_box(rng, 0.0, 10.0));
    if (giou::near_kink(p, g)) {
      ++skipped;
      continue;
    }
    ++checked;
    const auto ag = giou::giou_loss_grad(p, g).grad;
    const auto ng = giou::finite_difference_grad(giou::giou_loss, p, g, 1e-6);
    const auto ai = giou::iou_loss_grad(p, g).grad;
    const auto ni = giou::finite_difference_grad(giou::iou_loss, p, g, 1e-6);
    for (int k = 0; k < 4; ++k) worst = std::max({worst, rel_err(ag[k], ng[k]), rel_err(ai[k], ni[k])});
  }
  std::size_t iou_nonzero = 0, giou_zero = 0;
  std::uniform_real_distribution<double> gap(0.01, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const auto g = cbox(ot::random_box(rng, 0.0, 10.0));
    auto c = ot::random_box(rng, 0.0, 10.0);
    // Move the prediction fully past one side of the truth.
    const int side = i % 4;
    const double d = gap(rng);
    if (side == 0) { const double w = c[2] - c[0]; c[0] = g.x2() + d; c[2] = c[0] + w; }
    if (side == 1) { const double w = c[2] - c[0]; c[2] = g.x1() - d; c[0] = c[2] - w; }
    if (side == 2) { const double h = c[3] - c[1]; c[1] = g.y2() + d; c[3] = c[1] + h; }
    if (side == 3) { const double h = c[3] - c[1]; c[3] = g.y1() - d; c[1] = c[3] - h; }
    const Box2D p = Box2D::from_array(c);
    for (double v : giou::iou_loss_grad(p, g).grad) {
      if (v != 0.0) {
        ++iou_nonzero;
        break;
      }
    }
    double mx = 0.0;
    for (double v : giou::giou_loss_grad(p, g).grad) mx = std::max(mx, std::abs(v));
    if (!(mx > 1e-6)) ++giou_zero;
  }
  return {worst < 1e-6 && iou_nonzero == 0 && giou_zero == 0,
          fmt("10^4 kink-free configs (%d skipped): max rel err %.3g (limit 1e-6); 10^3 disjoint: "
              "IoU grad nonzero %zu, GIoU grad ~0 %zu",
              skipped, worst, iou_nonzero, giou_zero)};
}

Outcome plateau_demo() {
  const auto t0 = Clock::now();
  int iou_moved = 0, giou_ok = 0, monotone_bad = 0, ls_failed = 0;
  std::string failures;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const auto c = ot::disjoint_demo_case(k);

    giou::OptimizerConfig iou_cfg;
    iou_cfg.loss = giou::LossKind::iou;
    const auto ti = giou::run_regression(c.init, c.gt, iou_cfg);
    for (const auto& r : ti.records) {
      if (!(r.pred == c.init)) {
        ++iou_moved;
        break;
      }
    }

    giou::OptimizerConfig cfg;
    cfg.stop_iou = 0.9;
    const auto tg = giou::run_regression(c.init, c.gt, cfg);
    if (tg.final().iou >= 0.9 && tg.steps() <= 10'000) {
      ++giou_ok;
    } else {
      failures += fmt(" k=%llu(%s)", static_cast<unsigned long long>(k), std::string(giou::to_string(tg.status)).c_str());
    }

    cfg.line_search = true;
    const auto tl = giou::run_regression(c.init, c.gt, cfg);
    if (tl.status == giou::RunStatus::line_search_failed) ++ls_failed;
    double prev = -1.0;
    for (const auto& r : tl.records) {
      if (r.iou != 0.0) break;
      const auto m = giou::pair_metrics(r.pred, c.gt);
      const double ratio = m.union_area / m.enclosing_area;
      if (ratio < prev) {
        ++monotone_bad;
        break;
      }
      prev = ratio;
    }
  }
  const double secs = seconds_since(t0);
  return {iou_moved == 0 && giou_ok >= 95 && monotone_bad == 0 && secs < 60.0,
          fmt("IoU runs that moved %d/100; GIoU reached iou>=0.9 in %d/100 (need 95)%s; U/Ac decreases in %d "
              "line-search runs (%d ended line_search_failed after the plateau); %.1f s (limit 60 s)",
              iou_moved, giou_ok, failures.c_str(), monotone_bad, ls_failed, secs)};
}

Outcome polygon_suite() {
  std::mt19937_64 rng(1007);
  int outside = 0;
  double worst_z = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto a = ot::random_convex(rng, 3 + i % 8);
    const auto b = ot::random_convex(rng, 3 + (i / 8) % 8);
    const auto m = giou::polygon_giou(a, b);
    const auto mc = ot::mc_polygon_giou(ot::to_pts(a), ot::to_pts(b), 1'000'000, 5000 + i);
    const double z = std::abs(m.giou - mc.giou) / mc.stderr_;
    worst_z = std::max(worst_z, z);
    if (z > 3.0) ++outside;
  }
  double rect_iou = 0.0, rect_giou = 0.0;
  int hull_smaller = 0;
  for (int i = 0; i < 10'000; ++i) {
    const auto a = ot::random_box(rng, 0, 10);
    const auto b = ot::random_box(rng, 0, 10);
    const giou::ConvexPolygon pa({{a[0], a[1]}, {a[2], a[1]}, {a[2], a[3]}, {a[0], a[3]}});
    const giou::ConvexPolygon pb({{b[0], b[1]}, {b[2], b[1]}, {b[2], b[3]}, {b[0], b[3]}});
    const auto pm = giou::polygon_giou(pa, pb);
    const auto bm = giou::pair_metrics(Box2D::from_array(a), cbox(b));
    rect_iou = std::max(rect_iou, std::abs(pm.iou - bm.iou));
    rect_giou = std::max(rect_giou, std::abs(pm.giou - bm.giou));
    // The hull of two rectangles is the enclosing box only when every box corner is a rectangle corner.
    if (pm.hull_area < bm.enclosing_area * (1 - 1e-12)) ++hull_smaller;
  }
  const double rect = std::max(rect_iou, rect_giou);
  double rot = 0.0;
  std::uniform_real_distribution<double> ang(0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 10'000; ++i) {
    const auto a = ot::random_convex(rng, 3 + i % 8);
    const auto b = ot::random_convex(rng, 3 + (i / 8) % 8);
    const double t = ang(rng);
    const auto m = giou::polygon_giou(a, b);
    const auto r = giou::polygon_giou(ot::rotate(a, t), ot::rotate(b, t));
    rot = std::max({rot, std::abs(m.iou - r.iou), std::abs(m.giou - r.giou)});
  }
  return {outside == 0 && rect < 1e-9 && rot < 1e-9,
          fmt("MC (10^6 pts) outside 3 SE on %d/100 pairs (max |z| %.2f); rectangle vs box max diff iou %.3g "
              "giou %.3g (hull smaller than enclosing box on %d/10^4); rotation max diff %.3g (limits 1e-9)",
              outside, worst_z, rect_iou, rect_giou, hull_smaller, rot)};
}

Outcome nd_suite() {
  std::mt19937_64 rng(1008);
  double worst = 0.0;
  for (int i = 0; i < 100'000; ++i) {
    const auto a = ot::random_box(rng, 0, 10);
    const auto b = ot::random_box(rng, 0, 10);
    const auto nd = giou::giou_nd(giou::BoxND({{a[0], a[2]}, {a[1], a[3]}}), giou::BoxND({{b[0], b[2]}, {b[1], b[3]}}));
    const auto m = giou::pair_metrics(Box2D::from_array(a), cbox(b));
    worst = std::max({worst, std::abs(nd.iou - m.iou), std::abs(nd.giou - m.giou)});
  }

  // n = 1 and n = 3: the worked examples plus random pairs, against sampling.
  int outside = 0, cases = 0;
  double worst_z = 0.0;
  auto check = [&](const giou::BoxND& a, const giou::BoxND& b, std::size_t samples, std::uint64_t seed) {
    std::vector<std::pair<double, double>> pa, pb, hull;
    for (std::size_t d = 0; d < a.dim(); ++d) {
      pa.emplace_back(a[d].lo, a[d].hi);
      pb.emplace_back(b[d].lo, b[d].hi);
      hull.emplace_back(std::min(a[d].lo, b[d].lo), std::max(a[d].hi, b[d].hi));
    }
    const auto mc = ot::mc_giou(ot::box_membership(pa), ot::box_membership(pb), ot::box_membership(hull), hull, samples,
                                seed);
    const double exact = giou::giou_nd(a, b).giou;
    const double z = mc.stderr_ > 0 ? std::abs(exact - mc.giou) / mc.stderr_ : (exact == mc.giou ? 0.0 : 1e9);
    worst_z = std::max(worst_z, z);
    ++cases;
    if (z > 3.0) ++outside;
  };
  check(giou::BoxND({{0, 2}}), giou::BoxND({{1, 3}}), 10'000'000, 81);
  check(giou::BoxND({{0, 1}, {0, 1}, {0, 1}}), giou::BoxND({{2, 3}, {2, 3}, {2, 3}}), 10'000'000, 83);
  std::uniform_real_distribution<double> u(0, 3);
  for (std::size_t n : {1u, 3u}) {
    for (int i = 0; i < 10; ++i) {
      std::vector<giou::Interval> a, b;
      for (std::size_t d = 0; d < n; ++d) {
        double x = u(rng), y = u(rng), p = u(rng), q = u(rng);
        a.push_back({std::min(x, y), std::max(x, y)});
        b.push_back({std::min(p, q), std::max(p, q)});
      }
      check(giou::BoxND(a), giou::BoxND(b), 1'000'000, 900 + 10 * n + i);
    }
  }
  return {worst <= 1e-12 && outside == 0,
          fmt("2-D vs box-core max diff %.3g on 10^5 pairs (limit 1e-12); n in {1,3}: %d/%d outside 3 sigma "
              "(max |z| %.2f)",
              worst, outside, cases, worst_z)};
}

Outcome eval_suite() {
  const std::string dir = GIOU_FIXTURE_DIR;
  const auto perfect = giou::evaluate_files(dir + "/perfect_dets.jsonl", dir + "/perfect_gts.jsonl");
  const auto shift = giou::evaluate_files(dir + "/shift_dets.jsonl", dir + "/shift_gts.jsonl");
  const bool perfect_ok = perfect.iou->ap == 1.0 && perfect.giou->ap == 1.0;
  const bool shift_ok = shift.iou->ap == 0.3;
  int broken = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = ot::random_eval_fixture(4242 + s);
    const auto r = giou::evaluate(f.dets, f.gts);
    for (std::size_t t = 0; t < giou::kNumThresholds; ++t) {
      if (r.giou->map_per_threshold[t] > r.iou->map_per_threshold[t]) {
        ++broken;
        break;
      }
    }
  }
  return {perfect_ok && shift_ok && broken == 0,
          fmt("perfect AP iou=%.17g giou=%.17g (want 1); shift AP iou=%.17g (want 0.3); GIoU-AP > IoU-AP on %d/20 "
              "random fixtures",
              perfect.iou->ap, perfect.giou->ap, shift.iou->ap, broken)};
}

Outcome correlation_study() {
  const giou::SampleConfig cfg;
  const auto samples = giou::sample_pairs(cfg);
  const auto s = giou::summarize(samples);
  bool non_increasing = true;
  for (std::size_t b = 0; b < 4; ++b) {
    if (s.bin_counts[b] == 0) non_increasing = false;
    if (b > 0 && !(s.bin_max_gap[b] <= s.bin_max_gap[b - 1])) non_increasing = false;
  }
  std::ostringstream a, b;
  giou::write_samples_csv(a, cfg, samples);
  giou::write_samples_csv(b, cfg, giou::sample_pairs(cfg));
  const bool identical = a.str() == b.str();
  return {s.bound_violations == 0 && non_increasing && identical,
          fmt("seed %llu, %zu samples: %zu violations; bin max(iou-giou) %.3g %.3g %.3g %.3g (counts %zu %zu %zu %zu); "
              "CSV rerun identical: %s",
              static_cast<unsigned long long>(cfg.seed), s.n, s.bound_violations, s.bin_max_gap[0], s.bin_max_gap[1],
              s.bin_max_gap[2], s.bin_max_gap[3], s.bin_counts[0], s.bin_counts[1], s.bin_counts[2], s.bin_counts[3],
              identical ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"bounds", bounds_suite},
      {"metric axioms", metric_axioms},
      {"invariance", invariance_suite},
      {"limit", limit_suite},
      {"gradients", gradient_suite},
      {"plateau and convergence", plateau_demo},
      {"polygon oracle", polygon_suite},
      {"n-d consistency", nd_suite},
      {"eval fixtures", eval_suite},
      {"correlation study", correlation_study},
  };
  int failed = 0;
  int idx = 0;
  for (const auto& [name, run] : criteria) {
    ++idx;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %2d %-24s %s\n", o.pass ? "PASS" : "FAIL", idx, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", idx - failed, idx);
  return failed == 0 ? 0 : 1;
}
