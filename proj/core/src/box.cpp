#include "giou/box.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "giou/detail/box_kernel.hpp"

namespace giou {

namespace {

void require_finite(const std::array<double, 4>& c, const char* what) {
  for (double v : c) {
    if (!std::isfinite(v)) {
      throw InvalidInput(std::string(what) + ": coordinates must be finite");
    }
  }
}

std::string format_coords(const std::array<double, 4>& c) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "(%.17g, %.17g, %.17g, %.17g)", c[0], c[1], c[2], c[3]);
  return buf;
}

}  // namespace

Box2D::Box2D(double x1, double y1, double x2, double y2) : c_{x1, y1, x2, y2} {
  require_finite(c_, "Box2D");
}

CanonicalBox2D::CanonicalBox2D(double x1, double y1, double x2, double y2) : c_{x1, y1, x2, y2} {
  require_finite(c_, "CanonicalBox2D");
  if (x2 < x1 || y2 < y1) {
    throw InvalidInput("CanonicalBox2D: requires x2 >= x1 and y2 >= y1, got " + format_coords(c_));
  }
}

CanonicalBox2D canonicalize(const Box2D& b) {
  return {std::min(b.x1(), b.x2()), std::min(b.y1(), b.y2()),
          std::max(b.x1(), b.x2()), std::max(b.y1(), b.y2())};
}

PairMetrics pair_metrics(const Box2D& pred, const CanonicalBox2D& gt) {
  if (!(gt.area() > 0.0)) {
    throw InvalidInput("ground-truth box must have positive area, got " + to_string(gt));
  }
  const auto t = detail::box_terms<double>(pred.coords(), gt);
  return PairMetrics{
      .pred = CanonicalBox2D(t.pred[0], t.pred[1], t.pred[2], t.pred[3]),
      .pred_area = t.pred_area,
      .gt_area = t.gt_area,
      .inter_box = t.inter,
      .intersection = t.intersection,
      .enclosing_box = t.enclosing,
      .enclosing_area = t.enclosing_area,
      .union_area = t.union_area,
      .iou = t.iou,
      .giou = t.giou,
  };
}

double iou_loss(const Box2D& pred, const CanonicalBox2D& gt) {
  return 1.0 - pair_metrics(pred, gt).iou;
}

double giou_loss(const Box2D& pred, const CanonicalBox2D& gt) {
  return 1.0 - pair_metrics(pred, gt).giou;
}

std::string to_string(const Box2D& b) { return format_coords(b.coords()); }
std::string to_string(const CanonicalBox2D& b) { return format_coords(b.coords()); }

}  // namespace giou
