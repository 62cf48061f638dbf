#include "giou/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

namespace giou {

namespace {

using GroupKey = std::pair<std::string, std::int64_t>;

struct Candidate {
  std::size_t gt;  // index local to the category
  double sim;
};

// Descending score, input order on ties.
std::vector<std::size_t> score_order(std::span<const DetectionRecord> dets,
                                     std::span<const std::size_t> idx) {
  std::vector<std::size_t> order(idx.begin(), idx.end());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });
  return order;
}

std::vector<bool> greedy_labels(const std::vector<std::vector<Candidate>>& cands, std::size_t num_gt,
                                double threshold) {
  std::vector<bool> used(num_gt, false);
  std::vector<bool> tp(cands.size(), false);
  for (std::size_t d = 0; d < cands.size(); ++d) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_gt = num_gt;
    for (const auto& c : cands[d]) {
      if (!used[c.gt] && c.sim > best) {
        best = c.sim;
        best_gt = c.gt;
      }
    }
    if (best_gt != num_gt && best >= threshold) {
      used[best_gt] = true;
      tp[d] = true;
    }
  }
  return tp;
}

// Candidates for detections `order` against ground truths `gt_idx` of the
// same category; only same-image pairs are candidates.
std::vector<std::vector<Candidate>> build_candidates(std::span<const DetectionRecord> dets,
                                                     std::span<const std::size_t> order,
                                                     std::span<const GroundTruthRecord> gts,
                                                     std::span<const std::size_t> gt_idx,
                                                     Similarity metric) {
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_image;
  for (std::size_t j = 0; j < gt_idx.size(); ++j) {
    by_image[gts[gt_idx[j]].image_id].push_back(j);
  }
  std::vector<std::vector<Candidate>> cands(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& d = dets[order[k]];
    const auto it = by_image.find(d.image_id);
    if (it == by_image.end()) continue;
    for (std::size_t j : it->second) {
      cands[k].push_back({j, similarity(metric, d.box, gts[gt_idx[j]].box)});
    }
  }
  return cands;
}

MetricReport evaluate_metric(std::span<const DetectionRecord> dets,
                             std::span<const GroundTruthRecord> gts,
                             const std::map<std::int64_t, std::vector<std::size_t>>& gt_by_cat,
                             const std::map<std::int64_t, std::vector<std::size_t>>& det_by_cat,
                             Similarity metric) {
  MetricReport rep;
  rep.metric = metric;
  rep.thresholds = similarity_thresholds();
  rep.map_per_threshold.fill(0.0);

  for (const auto& [cat, gt_idx] : gt_by_cat) {
    ClassAP cls;
    cls.category_id = cat;
    cls.num_gt = gt_idx.size();
    const auto dit = det_by_cat.find(cat);
    const std::vector<std::size_t> none;
    const auto& det_idx = dit == det_by_cat.end() ? none : dit->second;
    cls.num_detections = det_idx.size();

    const auto order = score_order(dets, det_idx);
    const auto cands = build_candidates(dets, order, gts, gt_idx, metric);
    for (std::size_t t = 0; t < kNumThresholds; ++t) {
      const auto labels = greedy_labels(cands, gt_idx.size(), rep.thresholds[t]);
      cls.ap_per_threshold[t] = average_precision(labels, gt_idx.size());
    }
    cls.ap = std::accumulate(cls.ap_per_threshold.begin(), cls.ap_per_threshold.end(), 0.0) /
             static_cast<double>(kNumThresholds);
    rep.per_class.push_back(cls);
  }

  if (!rep.per_class.empty()) {
    for (std::size_t t = 0; t < kNumThresholds; ++t) {
      double s = 0.0;
      for (const auto& c : rep.per_class) s += c.ap_per_threshold[t];
      rep.map_per_threshold[t] = s / static_cast<double>(rep.per_class.size());
    }
  }
  rep.ap = std::accumulate(rep.map_per_threshold.begin(), rep.map_per_threshold.end(), 0.0) /
           static_cast<double>(kNumThresholds);
  rep.ap75 = rep.map_per_threshold[5];
  return rep;
}

// ---- JSON-lines parsing ---------------------------------------------------

struct LineContext {
  std::string_view source;
  std::size_t line;
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(std::string(source), line, what);
  }
};

std::string read_image_id(const nlohmann::json& j, const LineContext& ctx) {
  const auto it = j.find("image_id");
  if (it == j.end()) ctx.fail("missing \"image_id\"");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  ctx.fail("\"image_id\" must be a string");
}

std::int64_t read_category(const nlohmann::json& j, const LineContext& ctx) {
  const auto it = j.find("category_id");
  if (it == j.end()) ctx.fail("missing \"category_id\"");
  if (!it->is_number_integer()) ctx.fail("\"category_id\" must be an integer");
  return it->get<std::int64_t>();
}

std::array<double, 4> read_bbox(const nlohmann::json& j, const LineContext& ctx) {
  const auto it = j.find("bbox");
  if (it == j.end()) ctx.fail("missing \"bbox\"");
  if (!it->is_array() || it->size() != 4) ctx.fail("\"bbox\" must be [x1, y1, x2, y2]");
  std::array<double, 4> c{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(*it)[i].is_number()) ctx.fail("\"bbox\" entries must be numbers");
    c[i] = (*it)[i].get<double>();
    if (!std::isfinite(c[i])) ctx.fail("\"bbox\" entries must be finite");
  }
  return c;
}

template <class Fn>
void for_each_record(std::istream& in, std::string_view source, Fn&& fn) {
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    LineContext ctx{source, line};
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
      ctx.fail("invalid JSON");
    }
    if (!j.is_object()) ctx.fail("expected a JSON object");
    fn(j, ctx);
  }
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

nlohmann::ordered_json metric_json(const MetricReport& m) {
  nlohmann::ordered_json j;
  j["AP"] = m.ap;
  j["AP75"] = m.ap75;
  j["thresholds"] = m.thresholds;
  j["mAP_per_threshold"] = m.map_per_threshold;
  auto classes = nlohmann::ordered_json::array();
  for (const auto& c : m.per_class) {
    nlohmann::ordered_json cj;
    cj["category_id"] = c.category_id;
    cj["num_gt"] = c.num_gt;
    cj["num_detections"] = c.num_detections;
    cj["AP"] = c.ap;
    cj["AP_per_threshold"] = c.ap_per_threshold;
    classes.push_back(std::move(cj));
  }
  j["per_class"] = std::move(classes);
  return j;
}

}  // namespace

ParseError::ParseError(std::string source, std::size_t line, const std::string& what)
    : InvalidInput(source + ":" + std::to_string(line) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

std::string_view to_string(Similarity s) { return s == Similarity::iou ? "iou" : "giou"; }

std::array<double, kNumThresholds> similarity_thresholds() {
  std::array<double, kNumThresholds> t{};
  for (std::size_t i = 0; i < kNumThresholds; ++i) {
    t[i] = static_cast<double>(10 + i) / 20.0;
  }
  return t;
}

double similarity(Similarity metric, const Box2D& det, const CanonicalBox2D& gt) {
  const auto m = pair_metrics(det, gt);
  return metric == Similarity::iou ? m.iou : m.giou;
}

std::vector<bool> match_detections(std::span<const DetectionRecord> dets,
                                   std::span<const GroundTruthRecord> gts, double threshold,
                                   Similarity metric) {
  std::map<GroupKey, std::vector<std::size_t>> gt_groups;
  for (std::size_t j = 0; j < gts.size(); ++j) {
    gt_groups[{gts[j].image_id, gts[j].category_id}].push_back(j);
  }
  std::map<GroupKey, std::vector<std::size_t>> det_groups;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    det_groups[{dets[i].image_id, dets[i].category_id}].push_back(i);
  }

  std::vector<bool> out(dets.size(), false);
  for (const auto& [key, det_idx] : det_groups) {
    const auto git = gt_groups.find(key);
    if (git == gt_groups.end()) continue;
    const auto order = score_order(dets, det_idx);
    const auto cands = build_candidates(dets, order, gts, git->second, metric);
    const auto labels = greedy_labels(cands, git->second.size(), threshold);
    for (std::size_t k = 0; k < order.size(); ++k) out[order[k]] = labels[k];
  }
  return out;
}

double average_precision(const std::vector<bool>& tp, std::size_t num_gt) {
  if (num_gt == 0 || tp.empty()) return 0.0;
  const std::size_t n = tp.size();
  std::vector<double> recall(n), precision(n);
  double ntp = 0.0, nfp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    (tp[i] ? ntp : nfp) += 1.0;
    recall[i] = ntp / static_cast<double>(num_gt);
    precision[i] = ntp / (ntp + nfp);
  }
  for (std::size_t i = n - 1; i > 0; --i) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = static_cast<double>(k) / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / 101.0;
}

EvalReport evaluate(std::span<const DetectionRecord> dets, std::span<const GroundTruthRecord> gts,
                    const EvalOptions& opts) {
  EvalReport rep;
  rep.num_detections = dets.size();
  rep.num_ground_truths = gts.size();

  std::map<std::int64_t, std::vector<std::size_t>> gt_by_cat;
  for (std::size_t j = 0; j < gts.size(); ++j) gt_by_cat[gts[j].category_id].push_back(j);

  std::map<std::int64_t, std::vector<std::size_t>> det_by_cat;
  std::map<std::int64_t, std::size_t> ignored;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const auto cat = dets[i].category_id;
    if (gt_by_cat.contains(cat)) {
      det_by_cat[cat].push_back(i);
    } else {
      ++ignored[cat];
    }
  }
  for (const auto& [cat, count] : ignored) {
    rep.warnings.push_back("ignored " + std::to_string(count) + " detection(s) of category " +
                           std::to_string(cat) + " which has no ground truth");
  }
  if (gt_by_cat.empty()) {
    rep.warnings.push_back("ground truth is empty; all AP values are 0");
  }

  if (opts.iou) rep.iou = evaluate_metric(dets, gts, gt_by_cat, det_by_cat, Similarity::iou);
  if (opts.giou) rep.giou = evaluate_metric(dets, gts, gt_by_cat, det_by_cat, Similarity::giou);
  return rep;
}

std::vector<DetectionRecord> parse_detections(std::istream& in, std::string_view source) {
  std::vector<DetectionRecord> out;
  for_each_record(in, source, [&](const nlohmann::json& j, const LineContext& ctx) {
    auto image = read_image_id(j, ctx);
    const auto cat = read_category(j, ctx);
    const auto c = read_bbox(j, ctx);
    const auto sit = j.find("score");
    if (sit == j.end()) ctx.fail("missing \"score\"");
    if (!sit->is_number()) ctx.fail("\"score\" must be a number");
    const double score = sit->get<double>();
    if (!(score >= 0.0 && score <= 1.0)) ctx.fail("\"score\" must lie in [0, 1]");
    out.push_back({std::move(image), cat, Box2D::from_array(c), score});
  });
  return out;
}

std::vector<GroundTruthRecord> parse_ground_truths(std::istream& in, std::string_view source) {
  std::vector<GroundTruthRecord> out;
  for_each_record(in, source, [&](const nlohmann::json& j, const LineContext& ctx) {
    auto image = read_image_id(j, ctx);
    const auto cat = read_category(j, ctx);
    const auto c = read_bbox(j, ctx);
    if (!(c[2] > c[0] && c[3] > c[1])) {
      ctx.fail("ground-truth \"bbox\" must satisfy x2 > x1 and y2 > y1");
    }
    out.push_back({std::move(image), cat, CanonicalBox2D(c[0], c[1], c[2], c[3])});
  });
  return out;
}

EvalReport evaluate_files(const std::filesystem::path& dets, const std::filesystem::path& gts,
                          const EvalOptions& opts) {
  std::ifstream df(dets);
  if (!df) throw InvalidInput("cannot open " + dets.string());
  std::ifstream gf(gts);
  if (!gf) throw InvalidInput("cannot open " + gts.string());
  const auto d = parse_detections(df, dets.string());
  const auto g = parse_ground_truths(gf, gts.string());
  return evaluate(d, g, opts);
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["num_detections"] = r.num_detections;
  j["num_ground_truths"] = r.num_ground_truths;
  if (r.iou) j["iou"] = metric_json(*r.iou);
  if (r.giou) j["giou"] = metric_json(*r.giou);
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

std::string format_report_table(const EvalReport& r) {
  std::ostringstream os;
  os << "detections: " << r.num_detections << "  ground truths: " << r.num_ground_truths << "\n";
  for (const auto* m : {r.iou ? &*r.iou : nullptr, r.giou ? &*r.giou : nullptr}) {
    if (m == nullptr) continue;
    const std::string name(to_string(m->metric));
    os << "\n[" << name << "]  AP = " << fmt6(m->ap) << "  AP75 = " << fmt6(m->ap75) << "\n";
    os << "  threshold  mAP\n";
    for (std::size_t t = 0; t < kNumThresholds; ++t) {
      char line[64];
      std::snprintf(line, sizeof line, "  %-9.2f  %s\n", m->thresholds[t],
                    fmt6(m->map_per_threshold[t]).c_str());
      os << line;
    }
    os << "  category  num_gt  AP\n";
    for (const auto& c : m->per_class) {
      char line[128];
      std::snprintf(line, sizeof line, "  %-8lld  %-6zu  %s\n", static_cast<long long>(c.category_id),
                    c.num_gt, fmt6(c.ap).c_str());
      os << line;
    }
  }
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace giou
