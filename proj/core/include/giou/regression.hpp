#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "giou/box.hpp"
#include "giou/grad.hpp"

namespace giou {

enum class LossKind { mse, l1_smooth, iou, giou };

std::string_view to_string(LossKind k);
std::optional<LossKind> parse_loss_kind(std::string_view s);

/// Mean squared corner-coordinate error, with coordinates normalized so the
/// ground-truth diagonal has length 1.
LossGrad mse_loss(const Box2D& pred, const CanonicalBox2D& gt);

/// Smooth-l1 summed over the four corner coordinates in the same normalized
/// frame: 0.5 d^2 for |d| < 1, |d| - 0.5 otherwise.
LossGrad l1_smooth_loss(const Box2D& pred, const CanonicalBox2D& gt);

LossGrad loss_and_grad(LossKind kind, const Box2D& pred, const CanonicalBox2D& gt);

struct OptimizerConfig {
  LossKind loss = LossKind::giou;
  std::optional<double> learning_rate;  // default_learning_rate(gt, loss) when unset
  int max_steps = 10000;
  double stop_iou = 0.95;
  bool line_search = false;
  int max_halvings = 30;
};

/// Step size that makes one gradient step move a box by a fixed fraction of
/// the ground-truth size, independent of the coordinate scale. Gradients of
/// every loss here scale as 1/s, so the step size scales as s^2.
double default_learning_rate(const CanonicalBox2D& gt, LossKind kind);

enum class RunStatus {
  converged,           // iou >= stop_iou
  max_steps,           // step budget exhausted
  zero_gradient,       // the loss is flat at the current point
  line_search_failed,  // no halving of the step decreased the loss
  diverged,            // a coordinate became non-finite
};

std::string_view to_string(RunStatus s);

struct TrajectoryRecord {
  int step;
  Box2D pred;
  double loss;
  double iou;
  double giou;
};

/// Record 0 is the initial state; record k is the state after step k.
struct Trajectory {
  std::vector<TrajectoryRecord> records;
  RunStatus status = RunStatus::max_steps;
  double learning_rate = 0.0;

  const TrajectoryRecord& final() const { return records.back(); }
  int steps() const { return records.back().step; }
};

/// Plain gradient descent on the four raw predicted coordinates. With
/// line_search enabled the step is halved until the loss strictly decreases.
Trajectory run_regression(const Box2D& init, const CanonicalBox2D& gt, const OptimizerConfig& cfg);

/// CSV with header "step,x1,y1,x2,y2,loss,iou,giou"; numbers at 17
/// significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& t);

/// Predictions sharing the ground truth's first corner whose second corner
/// lies on a circle of `radius` around the ground truth's second corner.
/// Every member has the same corner-space l2 distance (and MSE) to `gt`.
std::vector<Box2D> fixed_radius_family(const CanonicalBox2D& gt, double radius, std::size_t count);

}  // namespace giou
