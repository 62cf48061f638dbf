#pragma once

// Scalar-generic box IoU/GIoU computation. Instantiated with double for the
// metric path and with giou::Dual<4> for exact forward-mode gradients, so both
// paths execute the same sequence of min/max/+/-/*/÷ operations.

#include <array>

#include "giou/box.hpp"

namespace giou::detail {

// Ties route to the first argument. For Dual this fixes the subgradient
// convention at kinks.
template <class T>
T min_first(const T& a, const T& b) {
  return a <= b ? a : b;
}

template <class T>
T max_first(const T& a, const T& b) {
  return a >= b ? a : b;
}

template <class T>
struct BoxTerms {
  std::array<T, 4> pred;  // canonical prediction
  T pred_area;
  T gt_area;
  std::array<T, 4> inter;
  T intersection;
  std::array<T, 4> enclosing;
  T enclosing_area;
  T union_area;
  T iou;
  T giou;
};

template <class T>
BoxTerms<T> box_terms(const std::array<T, 4>& raw, const CanonicalBox2D& gt) {
  BoxTerms<T> t;
  const T gx1{gt.x1()}, gy1{gt.y1()}, gx2{gt.x2()}, gy2{gt.y2()};

  t.pred = {min_first(raw[0], raw[2]), min_first(raw[1], raw[3]),
            max_first(raw[0], raw[2]), max_first(raw[1], raw[3])};
  const auto& p = t.pred;

  t.gt_area = (gx2 - gx1) * (gy2 - gy1);
  t.pred_area = (p[2] - p[0]) * (p[3] - p[1]);

  t.inter = {max_first(p[0], gx1), max_first(p[1], gy1),
             min_first(p[2], gx2), min_first(p[3], gy2)};
  const auto& in = t.inter;
  if (in[2] > in[0] && in[3] > in[1]) {
    t.intersection = (in[2] - in[0]) * (in[3] - in[1]);
  } else {
    t.intersection = T{0.0};
  }

  t.enclosing = {min_first(p[0], gx1), min_first(p[1], gy1),
                 max_first(p[2], gx2), max_first(p[3], gy2)};
  const auto& c = t.enclosing;
  t.enclosing_area = (c[2] - c[0]) * (c[3] - c[1]);

  t.union_area = t.pred_area + t.gt_area - t.intersection;
  t.iou = t.intersection / t.union_area;
  // A^c >= U holds exactly; the clamp absorbs rounding in U when one box
  // contains the other.
  const T penalty = max_first(t.enclosing_area - t.union_area, T{0.0});
  t.giou = t.iou - penalty / t.enclosing_area;
  return t;
}

}  // namespace giou::detail
