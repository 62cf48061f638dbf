#include "giou/box_nd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "giou/box.hpp"

namespace giou {

BoxND::BoxND(std::vector<Interval> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) {
    throw InvalidInput("BoxND: at least one axis is required");
  }
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const auto& a = axes_[i];
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) {
      throw InvalidInput("BoxND: axis " + std::to_string(i) + " is not finite");
    }
    if (a.hi < a.lo) {
      throw InvalidInput("BoxND: axis " + std::to_string(i) + " has hi < lo");
    }
  }
}

double BoxND::volume() const {
  double v = axes_[0].length();
  for (std::size_t i = 1; i < axes_.size(); ++i) {
    v = v * axes_[i].length();
  }
  return v;
}

BoxND canonicalize_nd(std::span<const std::pair<double, double>> raw) {
  std::vector<Interval> axes;
  axes.reserve(raw.size());
  for (const auto& [a, b] : raw) {
    axes.push_back({std::min(a, b), std::max(a, b)});
  }
  return BoxND(std::move(axes));
}

NdMetrics giou_nd(const BoxND& pred, const BoxND& gt) {
  if (pred.dim() != gt.dim()) {
    throw InvalidInput("giou_nd: dimension mismatch (" + std::to_string(pred.dim()) + " vs " +
                       std::to_string(gt.dim()) + ")");
  }
  const double gt_vol = gt.volume();
  if (!(gt_vol > 0.0)) {
    throw InvalidInput("giou_nd: ground-truth box must have positive volume");
  }
  const double pred_vol = pred.volume();

  // Same operation order as the 2-D kernel so n = 2 reproduces it bit for bit.
  bool overlap = true;
  double inter = 1.0;
  double encl = 1.0;
  for (std::size_t i = 0; i < pred.dim(); ++i) {
    const auto& p = pred[i];
    const auto& g = gt[i];
    const double lo = p.lo >= g.lo ? p.lo : g.lo;
    const double hi = p.hi <= g.hi ? p.hi : g.hi;
    overlap = overlap && hi > lo;
    inter = i == 0 ? hi - lo : inter * (hi - lo);
    const double clo = p.lo <= g.lo ? p.lo : g.lo;
    const double chi = p.hi >= g.hi ? p.hi : g.hi;
    encl = i == 0 ? chi - clo : encl * (chi - clo);
  }
  if (!overlap) {
    inter = 0.0;
  }

  NdMetrics m;
  m.intersection = inter;
  m.enclosing_volume = encl;
  m.union_volume = pred_vol + gt_vol - inter;
  m.iou = inter / m.union_volume;
  const double penalty = encl - m.union_volume >= 0.0 ? encl - m.union_volume : 0.0;
  m.giou = m.iou - penalty / encl;
  return m;
}

}  // namespace giou
