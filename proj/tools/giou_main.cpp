// giou: command-line front end for the box, n-d, polygon, gradient,
// regression, evaluation and sampling modules.
//
// Exit codes: 0 success, 2 usage or validation error, 3 runtime failure
// (divergence, I/O).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "giou/box.hpp"
#include "giou/box_nd.hpp"
#include "giou/eval.hpp"
#include "giou/grad.hpp"
#include "giou/polygon.hpp"
#include "giou/regression.hpp"
#include "giou/sampling.hpp"

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string g6(const std::array<double, 4>& c) {
  return "[" + g6(c[0]) + ", " + g6(c[1]) + ", " + g6(c[2]) + ", " + g6(c[3]) + "]";
}

std::vector<double> parse_numbers(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const char* begin = item.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || *end != '\0') {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
    if (!std::isfinite(v)) {
      throw UsageError(flag + ": values must be finite");
    }
    out.push_back(v);
  }
  if (!text.empty() && text.back() == ',') {
    throw UsageError(flag + ": trailing comma");
  }
  return out;
}

giou::Box2D parse_box(const std::string& flag, const std::string& text) {
  const auto v = parse_numbers(flag, text);
  if (v.size() != 4) {
    throw UsageError(flag + ": expected four comma-separated numbers x1,y1,x2,y2");
  }
  return {v[0], v[1], v[2], v[3]};
}

giou::CanonicalBox2D parse_gt(const std::string& flag, const std::string& text) {
  const auto c = giou::canonicalize(parse_box(flag, text));
  if (!(c.area() > 0.0)) {
    throw UsageError(flag + ": ground-truth box must have positive area");
  }
  return c;
}

giou::BoxND parse_nd(const std::string& flag, const std::string& text) {
  const auto v = parse_numbers(flag, text);
  if (v.empty() || v.size() % 2 != 0) {
    throw UsageError(flag + ": expected lo,hi pairs per axis (an even count of numbers)");
  }
  std::vector<std::pair<double, double>> raw;
  for (std::size_t i = 0; i < v.size(); i += 2) raw.emplace_back(v[i], v[i + 1]);
  return giou::canonicalize_nd(raw);
}

giou::ConvexPolygon parse_polygon(const std::string& flag, const std::string& text) {
  try {
    return giou::polygon_from_json(text);
  } catch (const giou::InvalidInput& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RuntimeFailure("cannot open '" + path + "' for writing");
  return os;
}

void check_written(std::ostream& os, const std::string& path) {
  os.flush();
  if (!os) throw RuntimeFailure("failed writing '" + path + "'");
}

void print_rows(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.first.size());
  for (const auto& [k, v] : rows) {
    std::cout << k << std::string(w + 2 - k.size(), ' ') << v << "\n";
  }
}

// --- compute ---------------------------------------------------------------

struct ComputeArgs {
  std::string pred, gt;
  bool json = false;
};

int cmd_compute(const ComputeArgs& a) {
  const giou::Box2D pred = parse_box("--pred", a.pred);
  const giou::CanonicalBox2D gt = parse_gt("--gt", a.gt);
  const auto m = giou::pair_metrics(pred, gt);
  const double l_iou = 1.0 - m.iou;
  const double l_giou = 1.0 - m.giou;
  if (a.json) {
    ojson j;
    j["pred_raw"] = pred.coords();
    j["pred"] = m.pred.coords();
    j["gt"] = gt.coords();
    j["pred_area"] = m.pred_area;
    j["gt_area"] = m.gt_area;
    j["intersection_box"] = m.inter_box;
    j["intersection"] = m.intersection;
    j["enclosing_box"] = m.enclosing_box;
    j["enclosing_area"] = m.enclosing_area;
    j["union"] = m.union_area;
    j["iou"] = m.iou;
    j["giou"] = m.giou;
    j["iou_loss"] = l_iou;
    j["giou_loss"] = l_giou;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  print_rows({
      {"pred (raw)", g6(pred.coords())},
      {"pred (canonical)", g6(m.pred.coords())},
      {"gt", g6(gt.coords())},
      {"A_p", g6(m.pred_area)},
      {"A_g", g6(m.gt_area)},
      {"intersection box", g6(m.inter_box)},
      {"I", g6(m.intersection)},
      {"enclosing box", g6(m.enclosing_box)},
      {"A_c", g6(m.enclosing_area)},
      {"U", g6(m.union_area)},
      {"iou", g6(m.iou)},
      {"giou", g6(m.giou)},
      {"L_IoU", g6(l_iou)},
      {"L_GIoU", g6(l_giou)},
  });
  return kExitOk;
}

// --- nd --------------------------------------------------------------------

struct NdArgs {
  std::string pred, gt;
  bool json = false;
};

int cmd_nd(const NdArgs& a) {
  const giou::BoxND pred = parse_nd("--pred", a.pred);
  const giou::BoxND gt = parse_nd("--gt", a.gt);
  if (pred.dim() != gt.dim()) {
    throw UsageError("--pred/--gt: dimensions differ (" + std::to_string(pred.dim()) + " vs " +
                     std::to_string(gt.dim()) + ")");
  }
  if (!(gt.volume() > 0.0)) throw UsageError("--gt: ground-truth box must have positive volume");
  const auto m = giou::giou_nd(pred, gt);
  if (a.json) {
    ojson j;
    j["dim"] = pred.dim();
    j["intersection"] = m.intersection;
    j["union"] = m.union_volume;
    j["enclosing"] = m.enclosing_volume;
    j["iou"] = m.iou;
    j["giou"] = m.giou;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  print_rows({{"dim", std::to_string(pred.dim())},
              {"I", g6(m.intersection)},
              {"U", g6(m.union_volume)},
              {"C", g6(m.enclosing_volume)},
              {"iou", g6(m.iou)},
              {"giou", g6(m.giou)}});
  return kExitOk;
}

// --- polygon ---------------------------------------------------------------

struct PolygonArgs {
  std::string a, b;
  bool json = false;
};

int cmd_polygon(const PolygonArgs& args) {
  const auto pa = parse_polygon("--a", args.a);
  const auto pb = parse_polygon("--b", args.b);
  const auto m = giou::polygon_giou(pa, pb);
  if (args.json) {
    ojson j;
    j["area_a"] = giou::polygon_area(pa);
    j["area_b"] = giou::polygon_area(pb);
    j["intersection"] = m.intersection;
    j["union"] = m.union_area;
    j["hull"] = m.hull_area;
    j["iou"] = m.iou;
    j["giou"] = m.giou;
    const auto inter = giou::convex_intersection(pa, pb);
    j["intersection_polygon"] = inter ? ojson::parse(giou::polygon_to_json(*inter)) : ojson::array();
    j["hull_polygon"] = ojson::parse(giou::polygon_to_json(giou::enclosing_hull(pa, pb)));
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  print_rows({{"area a", g6(giou::polygon_area(pa))},
              {"area b", g6(giou::polygon_area(pb))},
              {"I", g6(m.intersection)},
              {"U", g6(m.union_area)},
              {"hull", g6(m.hull_area)},
              {"iou", g6(m.iou)},
              {"giou", g6(m.giou)}});
  return kExitOk;
}

// --- grad-check ------------------------------------------------------------

struct GradArgs {
  std::string pred, gt;
  std::string loss = "giou";
  double step = 1e-6;
  bool json = false;
};

int cmd_grad_check(const GradArgs& a) {
  const giou::Box2D pred = parse_box("--pred", a.pred);
  const giou::CanonicalBox2D gt = parse_gt("--gt", a.gt);
  if (!(a.step > 0.0) || !std::isfinite(a.step)) throw UsageError("--step: must be positive and finite");
  const bool use_giou = a.loss == "giou";
  const auto analytic = use_giou ? giou::giou_loss_grad(pred, gt) : giou::iou_loss_grad(pred, gt);
  const giou::BoxLossFn fn = use_giou ? giou::BoxLossFn(giou::giou_loss) : giou::BoxLossFn(giou::iou_loss);
  const auto numeric = giou::finite_difference_grad(fn, pred, gt, a.step);
  std::array<double, 4> rel{};
  double max_rel = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double scale = std::max({1.0, std::abs(analytic.grad[i]), std::abs(numeric[i])});
    rel[i] = std::abs(analytic.grad[i] - numeric[i]) / scale;
    max_rel = std::max(max_rel, rel[i]);
  }
  const bool kink = giou::near_kink(pred, gt);
  if (a.json) {
    ojson j;
    j["loss_kind"] = a.loss;
    j["loss"] = analytic.loss;
    j["analytic"] = analytic.grad;
    j["numeric"] = numeric;
    j["rel_error"] = rel;
    j["max_rel_error"] = max_rel;
    j["step"] = a.step;
    j["near_kink"] = kink;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  print_rows({{"loss", a.loss + " = " + g6(analytic.loss)},
              {"analytic", g6(analytic.grad)},
              {"numeric", g6(numeric)},
              {"rel error", g6(rel)},
              {"max rel error", g6(max_rel)},
              {"near kink", kink ? "yes (finite differences are unreliable here)" : "no"}});
  return kExitOk;
}

// --- optimize --------------------------------------------------------------

struct OptimizeArgs {
  std::string init, gt;
  std::string loss = "giou";
  std::optional<double> lr;
  int steps = 10000;
  double stop_iou = 0.95;
  bool line_search = false;
  std::string out;
  bool json = false;
};

int cmd_optimize(const OptimizeArgs& a) {
  const giou::Box2D init = parse_box("--init", a.init);
  const giou::CanonicalBox2D gt = parse_gt("--gt", a.gt);
  const auto kind = giou::parse_loss_kind(a.loss);
  if (!kind) throw UsageError("--loss: expected one of mse, l1_smooth, iou, giou");
  if (a.lr && (!std::isfinite(*a.lr) || *a.lr < 0.0)) throw UsageError("--lr: must be finite and >= 0");
  if (a.steps <= 0) throw UsageError("--steps: must be positive");
  if (!(a.stop_iou >= 0.0 && a.stop_iou <= 1.0)) throw UsageError("--stop-iou: must lie in [0, 1]");

  giou::Trajectory traj;
  bool degenerate = false;
  if (a.lr && *a.lr == 0.0) {
    // Nothing can move; record the initial state only.
    degenerate = true;
    std::cerr << "warning: degenerate config: --lr 0 leaves the box unchanged\n";
    const auto lg = giou::loss_and_grad(*kind, init, gt);
    const auto m = giou::pair_metrics(init, gt);
    traj.records.push_back({0, init, lg.loss, m.iou, m.giou});
    traj.status = giou::RunStatus::max_steps;
    traj.learning_rate = 0.0;
  } else {
    giou::OptimizerConfig cfg;
    cfg.loss = *kind;
    cfg.learning_rate = a.lr;
    cfg.max_steps = a.steps;
    cfg.stop_iou = a.stop_iou;
    cfg.line_search = a.line_search;
    traj = giou::run_regression(init, gt, cfg);
  }

  if (!a.out.empty()) {
    auto os = open_output(a.out);
    giou::write_trajectory_csv(os, traj);
    check_written(os, a.out);
  }

  const auto& f = traj.final();
  const std::string status = degenerate ? "degenerate" : std::string(giou::to_string(traj.status));
  std::string note;
  if (degenerate) {
    note = "degenerate config: learning rate 0, box unchanged";
  } else if (traj.status == giou::RunStatus::zero_gradient && traj.steps() == 0) {
    note = "no progress: zero gradient";
  } else if (traj.status == giou::RunStatus::zero_gradient) {
    note = "stopped: zero gradient after " + std::to_string(traj.steps()) + " steps";
  } else if (traj.status == giou::RunStatus::diverged) {
    note = "diverged: a coordinate became non-finite";
  }

  if (a.json) {
    ojson j;
    j["loss_kind"] = std::string(giou::to_string(*kind));
    j["learning_rate"] = traj.learning_rate;
    j["status"] = status;
    j["steps"] = traj.steps();
    j["init"] = init.coords();
    j["final"] = f.pred.coords();
    j["final_loss"] = f.loss;
    j["final_iou"] = f.iou;
    j["final_giou"] = f.giou;
    j["note"] = note;
    std::cout << j.dump(2) << "\n";
  } else {
    print_rows({{"loss", std::string(giou::to_string(*kind))},
                {"learning rate", g6(traj.learning_rate)},
                {"status", status},
                {"steps", std::to_string(traj.steps())},
                {"init", g6(init.coords())},
                {"final", g6(f.pred.coords())},
                {"final loss", g6(f.loss)},
                {"final iou", g6(f.iou)},
                {"final giou", g6(f.giou)}});
    if (!note.empty()) std::cout << note << "\n";
  }
  return traj.status == giou::RunStatus::diverged ? kExitRuntime : kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string dets, gts;
  std::string metric = "both";
  std::string out;
  bool json = false;
};

int cmd_eval(const EvalArgs& a) {
  giou::EvalOptions opts;
  opts.iou = a.metric != "giou";
  opts.giou = a.metric != "iou";
  for (const auto& [flag, path] : {std::pair{"--dets", a.dets}, std::pair{"--gts", a.gts}}) {
    if (!std::ifstream(path)) throw RuntimeFailure(std::string(flag) + ": cannot open '" + path + "'");
  }
  const auto report = giou::evaluate_files(a.dets, a.gts, opts);
  const std::string json = giou::report_to_json(report);
  if (!a.out.empty()) {
    auto os = open_output(a.out);
    os << json;
    check_written(os, a.out);
  }
  std::cout << (a.json ? json : giou::format_report_table(report));
  return kExitOk;
}

// --- sample ----------------------------------------------------------------

struct SampleArgs {
  std::size_t n = 10000;
  std::uint64_t seed = 2019;
  double lo = 0.0;
  double hi = 100.0;
  std::string mode = "mixed";
  std::string csv;
  bool json = false;
};

int cmd_sample(const SampleArgs& a) {
  giou::SampleConfig cfg;
  const auto mode = giou::parse_sample_mode(a.mode);
  if (!mode) throw UsageError("--mode: expected independent or mixed");
  if (a.n == 0) throw UsageError("--n: must be at least 1");
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.hi > a.lo)) {
    throw UsageError("--lo/--hi: range must be finite with hi > lo");
  }
  cfg.mode = *mode;
  cfg.n_samples = a.n;
  cfg.seed = a.seed;
  cfg.lo = a.lo;
  cfg.hi = a.hi;
  const auto samples = giou::sample_pairs(cfg);
  const auto s = giou::summarize(samples);
  if (a.csv == "-") {
    giou::write_samples_csv(std::cout, cfg, samples);
  } else if (!a.csv.empty()) {
    auto os = open_output(a.csv);
    giou::write_samples_csv(os, cfg, samples);
    check_written(os, a.csv);
  }
  if (a.json) {
    std::cout << giou::summary_to_json(cfg, s);
    return kExitOk;
  }
  if (a.csv == "-") return kExitOk;
  print_rows({{"seed", std::to_string(cfg.seed)},
              {"mode", std::string(giou::to_string(cfg.mode))},
              {"samples", std::to_string(s.n)},
              {"overlapping", std::to_string(s.n_overlapping)},
              {"bound violations", std::to_string(s.bound_violations)},
              {"min giou", g6(s.min_giou)},
              {"max iou-giou", g6(s.max_gap)},
              {"spearman (iou>0)", g6(s.spearman_overlapping)}});
  std::cout << "\niou bin        count  max iou-giou\n";
  for (std::size_t b = 0; b < 4; ++b) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "[%.2f, %.2f%c  %5zu  %s\n", giou::kHighIouBinEdges[b],
                  giou::kHighIouBinEdges[b + 1], b == 3 ? ']' : ')', s.bin_counts[b],
                  s.bin_counts[b] == 0 ? "-" : g6(s.bin_max_gap[b]).c_str());
    std::cout << buf;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized IoU for boxes and convex polygons"};
  app.require_subcommand(1);

  ComputeArgs compute;
  auto* c = app.add_subcommand("compute", "IoU/GIoU of two boxes with every intermediate quantity");
  c->add_option("--pred", compute.pred, "predicted box x1,y1,x2,y2 (any corner order)")->required();
  c->add_option("--gt", compute.gt, "ground-truth box x1,y1,x2,y2")->required();
  c->add_flag("--json", compute.json, "machine-readable output");

  NdArgs nd;
  auto* n = app.add_subcommand("nd", "IoU/GIoU of two axis-aligned n-dimensional boxes");
  n->add_option("--pred", nd.pred, "lo,hi per axis, e.g. 0,1,0,2,0,3")->required();
  n->add_option("--gt", nd.gt, "lo,hi per axis")->required();
  n->add_flag("--json", nd.json, "machine-readable output");

  PolygonArgs poly;
  auto* p = app.add_subcommand("polygon", "IoU/GIoU of two convex polygons");
  p->add_option("--a", poly.a, "JSON array of [x,y] vertices")->required();
  p->add_option("--b", poly.b, "JSON array of [x,y] vertices")->required();
  p->add_flag("--json", poly.json, "machine-readable output");

  GradArgs grad;
  auto* g = app.add_subcommand("grad-check", "analytic loss gradient against central differences");
  g->add_option("--pred", grad.pred, "predicted box x1,y1,x2,y2")->required();
  g->add_option("--gt", grad.gt, "ground-truth box x1,y1,x2,y2")->required();
  g->add_option("--loss", grad.loss, "iou or giou")->check(CLI::IsMember({"iou", "giou"}));
  g->add_option("--step", grad.step, "finite-difference step");
  g->add_flag("--json", grad.json, "machine-readable output");

  OptimizeArgs opt;
  auto* o = app.add_subcommand("optimize", "gradient descent of one box toward a ground truth");
  o->add_option("--init", opt.init, "initial box x1,y1,x2,y2")->required();
  o->add_option("--gt", opt.gt, "ground-truth box x1,y1,x2,y2")->required();
  o->add_option("--loss", opt.loss, "mse, l1_smooth, iou or giou");
  o->add_option("--lr", opt.lr, "learning rate (default 0.1 * diag(gt)^2)");
  o->add_option("--steps", opt.steps, "maximum number of steps");
  o->add_option("--stop-iou", opt.stop_iou, "stop once iou reaches this value");
  o->add_flag("--line-search", opt.line_search, "halve the step until the loss decreases");
  o->add_option("--out", opt.out, "trajectory CSV path");
  o->add_flag("--json", opt.json, "machine-readable summary");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "COCO-style AP with IoU and/or GIoU matching");
  e->add_option("--dets", ev.dets, "detections, JSON lines")->required();
  e->add_option("--gts", ev.gts, "ground truth, JSON lines")->required();
  e->add_option("--metric", ev.metric, "iou, giou or both")->check(CLI::IsMember({"iou", "giou", "both"}));
  e->add_option("--out", ev.out, "also write the JSON report here");
  e->add_flag("--json", ev.json, "print the JSON report instead of the table");

  SampleArgs smp;
  auto* s = app.add_subcommand("sample", "random box pairs: IoU vs GIoU statistics");
  s->add_option("--n", smp.n, "number of pairs");
  s->add_option("--seed", smp.seed, "random seed");
  s->add_option("--lo", smp.lo, "coordinate range lower bound");
  s->add_option("--hi", smp.hi, "coordinate range upper bound");
  s->add_option("--mode", smp.mode, "independent or mixed");
  s->add_option("--csv", smp.csv, "write per-sample CSV here ('-' for stdout)");
  s->add_flag("--json", smp.json, "print the summary as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c->parsed()) return cmd_compute(compute);
    if (n->parsed()) return cmd_nd(nd);
    if (p->parsed()) return cmd_polygon(poly);
    if (g->parsed()) return cmd_grad_check(grad);
    if (o->parsed()) return cmd_optimize(opt);
    if (e->parsed()) return cmd_eval(ev);
    if (s->parsed()) return cmd_sample(smp);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const giou::InvalidInput& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
