#pragma once

#include <array>
#include <functional>

#include "giou/box.hpp"

namespace giou {

/// Loss value and its gradient with respect to the raw predicted coordinates
/// (x1, y1, x2, y2).
struct LossGrad {
  double loss;
  std::array<double, 4> grad;
};

/// Gradients are exact derivatives of the branch taken by the box
/// computation. At kinks, min/max route the derivative to their first
/// argument on ties, and the overlap test uses its strict form, so a pair
/// that merely touches contributes zero intersection gradient.
LossGrad iou_loss_grad(const Box2D& pred, const CanonicalBox2D& gt);
LossGrad giou_loss_grad(const Box2D& pred, const CanonicalBox2D& gt);

/// 2 - U / A^c, evaluated through its own expression. Equals L_GIoU whenever
/// the boxes do not overlap.
LossGrad enclosure_loss_grad(const Box2D& pred, const CanonicalBox2D& gt);

using BoxLossFn = std::function<double(const Box2D&, const CanonicalBox2D&)>;

/// Central differences (f(x + h) - f(x - h)) / 2h per predicted coordinate.
/// Throws InvalidInput unless step > 0.
std::array<double, 4> finite_difference_grad(const BoxLossFn& loss, const Box2D& pred,
                                             const CanonicalBox2D& gt, double step);

/// True when any min/max argument pair of the box computation differs by less
/// than `margin`, or an intersection extent is within `margin` of zero.
/// Finite-difference comparisons are only meaningful away from these points.
bool near_kink(const Box2D& pred, const CanonicalBox2D& gt, double margin = 1e-3);

}  // namespace giou
