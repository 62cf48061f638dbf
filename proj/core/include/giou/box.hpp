#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace giou {

/// Thrown when an input violates a documented precondition (non-finite
/// coordinates, zero-area ground truth, dimension mismatch, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raw axis-aligned box as two corner points. No ordering is required: this is
/// what a regressor emits before canonicalization.
class Box2D {
 public:
  Box2D(double x1, double y1, double x2, double y2);

  double x1() const { return c_[0]; }
  double y1() const { return c_[1]; }
  double x2() const { return c_[2]; }
  double y2() const { return c_[3]; }
  const std::array<double, 4>& coords() const { return c_; }

  static Box2D from_array(const std::array<double, 4>& c) { return {c[0], c[1], c[2], c[3]}; }

  friend bool operator==(const Box2D&, const Box2D&) = default;

 private:
  std::array<double, 4> c_;
};

/// Box with x2 >= x1 and y2 >= y1. Zero-width boxes are allowed.
class CanonicalBox2D {
 public:
  CanonicalBox2D(double x1, double y1, double x2, double y2);

  double x1() const { return c_[0]; }
  double y1() const { return c_[1]; }
  double x2() const { return c_[2]; }
  double y2() const { return c_[3]; }
  const std::array<double, 4>& coords() const { return c_; }

  double width() const { return c_[2] - c_[0]; }
  double height() const { return c_[3] - c_[1]; }
  double area() const { return width() * height(); }

  Box2D raw() const { return {c_[0], c_[1], c_[2], c_[3]}; }

  friend bool operator==(const CanonicalBox2D&, const CanonicalBox2D&) = default;

 private:
  std::array<double, 4> c_;
};

/// Every intermediate quantity of the box IoU/GIoU computation for one
/// (prediction, ground truth) pair.
struct PairMetrics {
  CanonicalBox2D pred;          // canonicalized prediction
  double pred_area;             // A^p
  double gt_area;               // A^g
  std::array<double, 4> inter_box;  // may be inverted when the boxes do not overlap
  double intersection;          // I
  std::array<double, 4> enclosing_box;
  double enclosing_area;        // A^c
  double union_area;            // U = A^p + A^g - I
  double iou;
  double giou;
};

CanonicalBox2D canonicalize(const Box2D& b);

/// Requires gt.area() > 0; throws InvalidInput otherwise.
PairMetrics pair_metrics(const Box2D& pred, const CanonicalBox2D& gt);

double iou_loss(const Box2D& pred, const CanonicalBox2D& gt);
double giou_loss(const Box2D& pred, const CanonicalBox2D& gt);

std::string to_string(const Box2D& b);
std::string to_string(const CanonicalBox2D& b);

}  // namespace giou
