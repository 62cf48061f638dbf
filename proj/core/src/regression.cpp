#include "giou/regression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace giou {

namespace {

double diagonal(const CanonicalBox2D& gt) { return std::hypot(gt.width(), gt.height()); }

bool all_zero(const std::array<double, 4>& g) {
  return g[0] == 0.0 && g[1] == 0.0 && g[2] == 0.0 && g[3] == 0.0;
}

bool all_finite(const std::array<double, 4>& c) {
  return std::isfinite(c[0]) && std::isfinite(c[1]) && std::isfinite(c[2]) && std::isfinite(c[3]);
}

TrajectoryRecord make_record(int step, const Box2D& pred, const CanonicalBox2D& gt, double loss) {
  const auto m = pair_metrics(pred, gt);
  return {step, pred, loss, m.iou, m.giou};
}

}  // namespace

std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::mse: return "mse";
    case LossKind::l1_smooth: return "l1_smooth";
    case LossKind::iou: return "iou";
    case LossKind::giou: return "giou";
  }
  return "?";
}

std::optional<LossKind> parse_loss_kind(std::string_view s) {
  if (s == "mse") return LossKind::mse;
  if (s == "l1_smooth" || s == "l1-smooth" || s == "smooth_l1") return LossKind::l1_smooth;
  if (s == "iou") return LossKind::iou;
  if (s == "giou") return LossKind::giou;
  return std::nullopt;
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_steps: return "max_steps";
    case RunStatus::zero_gradient: return "zero_gradient";
    case RunStatus::line_search_failed: return "line_search_failed";
    case RunStatus::diverged: return "diverged";
  }
  return "?";
}

LossGrad mse_loss(const Box2D& pred, const CanonicalBox2D& gt) {
  const double d = diagonal(gt);
  if (!(d > 0.0)) {
    throw InvalidInput("mse_loss: ground-truth box must have a positive diagonal");
  }
  LossGrad out{0.0, {}};
  for (std::size_t i = 0; i < 4; ++i) {
    const double e = (pred.coords()[i] - gt.coords()[i]) / d;
    out.loss += 0.25 * e * e;
    out.grad[i] = 0.5 * e / d;
  }
  return out;
}

LossGrad l1_smooth_loss(const Box2D& pred, const CanonicalBox2D& gt) {
  const double d = diagonal(gt);
  if (!(d > 0.0)) {
    throw InvalidInput("l1_smooth_loss: ground-truth box must have a positive diagonal");
  }
  LossGrad out{0.0, {}};
  for (std::size_t i = 0; i < 4; ++i) {
    const double e = (pred.coords()[i] - gt.coords()[i]) / d;
    if (std::abs(e) < 1.0) {
      out.loss += 0.5 * e * e;
      out.grad[i] = e / d;
    } else {
      out.loss += std::abs(e) - 0.5;
      out.grad[i] = std::copysign(1.0, e) / d;
    }
  }
  return out;
}

LossGrad loss_and_grad(LossKind kind, const Box2D& pred, const CanonicalBox2D& gt) {
  switch (kind) {
    case LossKind::mse: return mse_loss(pred, gt);
    case LossKind::l1_smooth: return l1_smooth_loss(pred, gt);
    case LossKind::iou: return iou_loss_grad(pred, gt);
    case LossKind::giou: return giou_loss_grad(pred, gt);
  }
  throw InvalidInput("unknown loss kind");
}

double default_learning_rate(const CanonicalBox2D& gt, LossKind kind) {
  static_cast<void>(kind);
  return 0.1 * (gt.width() * gt.width() + gt.height() * gt.height());
}

Trajectory run_regression(const Box2D& init, const CanonicalBox2D& gt, const OptimizerConfig& cfg) {
  if (!(gt.area() > 0.0)) {
    throw InvalidInput("run_regression: ground-truth box must have positive area");
  }
  if (cfg.max_steps <= 0) {
    throw InvalidInput("run_regression: max_steps must be positive");
  }
  if (!(cfg.stop_iou >= 0.0 && cfg.stop_iou <= 1.0)) {
    throw InvalidInput("run_regression: stop_iou must lie in [0, 1]");
  }
  const double lr = cfg.learning_rate.value_or(default_learning_rate(gt, cfg.loss));
  if (!std::isfinite(lr) || !(lr > 0.0)) {
    throw InvalidInput("run_regression: learning rate must be positive and finite");
  }

  Trajectory traj;
  traj.learning_rate = lr;
  traj.records.reserve(static_cast<std::size_t>(std::min(cfg.max_steps, 1 << 16)) + 1);

  Box2D pred = init;
  LossGrad lg = loss_and_grad(cfg.loss, pred, gt);
  traj.records.push_back(make_record(0, pred, gt, lg.loss));
  traj.status = RunStatus::max_steps;

  for (int step = 1; step <= cfg.max_steps; ++step) {
    if (traj.records.back().iou >= cfg.stop_iou) {
      traj.status = RunStatus::converged;
      return traj;
    }
    if (all_zero(lg.grad)) {
      traj.status = RunStatus::zero_gradient;
      return traj;
    }

    double scale = lr;
    std::array<double, 4> next{};
    auto propose = [&] {
      for (std::size_t i = 0; i < 4; ++i) next[i] = pred.coords()[i] - scale * lg.grad[i];
    };
    propose();
    if (!all_finite(next)) {
      traj.status = RunStatus::diverged;
      return traj;
    }
    LossGrad next_lg = loss_and_grad(cfg.loss, Box2D::from_array(next), gt);

    if (cfg.line_search) {
      int halvings = 0;
      while (!(next_lg.loss < lg.loss)) {
        if (halvings == cfg.max_halvings) {
          traj.status = RunStatus::line_search_failed;
          return traj;
        }
        ++halvings;
        scale *= 0.5;
        propose();
        next_lg = loss_and_grad(cfg.loss, Box2D::from_array(next), gt);
      }
    }
    if (!std::isfinite(next_lg.loss)) {
      traj.status = RunStatus::diverged;
      return traj;
    }

    pred = Box2D::from_array(next);
    lg = next_lg;
    traj.records.push_back(make_record(step, pred, gt, lg.loss));
  }
  if (traj.records.back().iou >= cfg.stop_iou) {
    traj.status = RunStatus::converged;
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  os << "step,x1,y1,x2,y2,loss,iou,giou\n";
  char buf[512];
  for (const auto& r : t.records) {
    const auto& c = r.pred.coords();
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step, c[0],
                  c[1], c[2], c[3], r.loss, r.iou, r.giou);
    os << buf;
  }
}

std::vector<Box2D> fixed_radius_family(const CanonicalBox2D& gt, double radius, std::size_t count) {
  if (!(radius > 0.0) || count == 0) {
    throw InvalidInput("fixed_radius_family: radius must be positive and count non-zero");
  }
  std::vector<Box2D> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    out.emplace_back(gt.x1(), gt.y1(), gt.x2() + radius * std::cos(theta),
                     gt.y2() + radius * std::sin(theta));
  }
  return out;
}

}  // namespace giou
