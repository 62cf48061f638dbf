#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace giou {

struct Interval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned n-orthotope with a runtime dimension n >= 1. Every axis
/// satisfies hi >= lo.
class BoxND {
 public:
  /// Throws InvalidInput on an empty list, non-finite values or an inverted axis.
  explicit BoxND(std::vector<Interval> axes);

  std::size_t dim() const { return axes_.size(); }
  const Interval& operator[](std::size_t i) const { return axes_[i]; }
  std::span<const Interval> axes() const { return axes_; }
  double volume() const;

  friend bool operator==(const BoxND&, const BoxND&) = default;

 private:
  std::vector<Interval> axes_;
};

struct NdMetrics {
  double intersection;
  double union_volume;
  double enclosing_volume;
  double iou;
  double giou;
};

/// Per-axis (min, max) of raw interval endpoints.
BoxND canonicalize_nd(std::span<const std::pair<double, double>> raw);

/// IoU/GIoU by volumes. The enclosing shape is the per-axis hull box. Requires
/// equal dimensions and gt.volume() > 0.
NdMetrics giou_nd(const BoxND& pred, const BoxND& gt);

}  // namespace giou
