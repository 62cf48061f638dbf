#include "giou/grad.hpp"

#include <algorithm>
#include <cmath>

#include "giou/detail/box_kernel.hpp"
#include "giou/dual.hpp"

namespace giou {

namespace {

using D4 = Dual<4>;

std::array<D4, 4> seed(const Box2D& pred) {
  const auto& c = pred.coords();
  return {D4::variable(c[0], 0), D4::variable(c[1], 1), D4::variable(c[2], 2),
          D4::variable(c[3], 3)};
}

detail::BoxTerms<D4> dual_terms(const Box2D& pred, const CanonicalBox2D& gt) {
  if (!(gt.area() > 0.0)) {
    throw InvalidInput("ground-truth box must have positive area, got " + to_string(gt));
  }
  return detail::box_terms<D4>(seed(pred), gt);
}

LossGrad one_minus(const D4& metric) {
  const D4 loss = D4(1.0) - metric;
  return {loss.value, loss.grad};
}

}  // namespace

LossGrad iou_loss_grad(const Box2D& pred, const CanonicalBox2D& gt) {
  return one_minus(dual_terms(pred, gt).iou);
}

LossGrad giou_loss_grad(const Box2D& pred, const CanonicalBox2D& gt) {
  return one_minus(dual_terms(pred, gt).giou);
}

LossGrad enclosure_loss_grad(const Box2D& pred, const CanonicalBox2D& gt) {
  const auto t = dual_terms(pred, gt);
  const D4 loss = D4(2.0) - t.union_area / t.enclosing_area;
  return {loss.value, loss.grad};
}

std::array<double, 4> finite_difference_grad(const BoxLossFn& loss, const Box2D& pred,
                                             const CanonicalBox2D& gt, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidInput("finite_difference_grad: step must be positive");
  }
  std::array<double, 4> g{};
  for (std::size_t i = 0; i < 4; ++i) {
    auto hi = pred.coords();
    auto lo = pred.coords();
    hi[i] += step;
    lo[i] -= step;
    g[i] = (loss(Box2D::from_array(hi), gt) - loss(Box2D::from_array(lo), gt)) / (2.0 * step);
  }
  return g;
}

bool near_kink(const Box2D& pred, const CanonicalBox2D& gt, double margin) {
  const auto& r = pred.coords();
  auto close = [margin](double a, double b) { return std::abs(a - b) < margin; };
  // Canonicalization.
  if (close(r[0], r[2]) || close(r[1], r[3])) return true;
  const auto p = canonicalize(pred);
  // Intersection and enclosing boxes compare the same coordinate pairs.
  if (close(p.x1(), gt.x1()) || close(p.y1(), gt.y1()) || close(p.x2(), gt.x2()) ||
      close(p.y2(), gt.y2())) {
    return true;
  }
  // Overlap indicator.
  const double wx = std::min(p.x2(), gt.x2()) - std::max(p.x1(), gt.x1());
  const double wy = std::min(p.y2(), gt.y2()) - std::max(p.y1(), gt.y1());
  return std::abs(wx) < margin || std::abs(wy) < margin;
}

}  // namespace giou
