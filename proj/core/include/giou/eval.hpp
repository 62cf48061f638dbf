#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "giou/box.hpp"

namespace giou {

enum class Similarity { iou, giou };

std::string_view to_string(Similarity s);

struct DetectionRecord {
  std::string image_id;
  std::int64_t category_id;
  Box2D box;
  double score;  // in [0, 1]
};

struct GroundTruthRecord {
  std::string image_id;
  std::int64_t category_id;
  CanonicalBox2D box;  // positive area
};

/// Raised for malformed JSON-lines input. `line()` is 1-based.
class ParseError : public InvalidInput {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Similarity thresholds .50:.05:.95.
inline constexpr std::size_t kNumThresholds = 10;
std::array<double, kNumThresholds> similarity_thresholds();

double similarity(Similarity metric, const Box2D& det, const CanonicalBox2D& gt);

/// Greedy matching within each (image, category) group. Detections are visited
/// by descending score (stable on ties); each takes the still-unmatched ground
/// truth with the highest similarity and is a true positive iff that
/// similarity reaches `threshold`. A ground truth is consumed only by a true
/// positive. The result is aligned with the input order of `dets`.
std::vector<bool> match_detections(std::span<const DetectionRecord> dets,
                                   std::span<const GroundTruthRecord> gts, double threshold,
                                   Similarity metric);

/// 101-point interpolated average precision. `tp` lists the labels of all
/// detections of one category in descending score order.
double average_precision(const std::vector<bool>& tp, std::size_t num_gt);

struct ClassAP {
  std::int64_t category_id;
  std::size_t num_gt;
  std::size_t num_detections;
  std::array<double, kNumThresholds> ap_per_threshold;
  double ap;  // mean over thresholds
};

struct MetricReport {
  Similarity metric;
  std::array<double, kNumThresholds> thresholds;
  std::array<double, kNumThresholds> map_per_threshold;  // mean over classes
  double ap;    // mean of map_per_threshold
  double ap75;  // map_per_threshold at 0.75
  std::vector<ClassAP> per_class;
};

struct EvalReport {
  std::size_t num_detections = 0;
  std::size_t num_ground_truths = 0;
  std::optional<MetricReport> iou;
  std::optional<MetricReport> giou;
  std::vector<std::string> warnings;
};

struct EvalOptions {
  bool iou = true;
  bool giou = true;
};

/// The class universe is the set of categories present in the ground truth.
/// Detections of other categories are ignored and reported in `warnings`.
EvalReport evaluate(std::span<const DetectionRecord> dets, std::span<const GroundTruthRecord> gts,
                    const EvalOptions& opts = {});

/// JSON-lines readers. Each non-blank line is an object
/// {"image_id": str, "category_id": int, "bbox": [x1, y1, x2, y2], "score": float};
/// ground-truth lines omit "score". Boxes are corner coordinates, not
/// width/height.
std::vector<DetectionRecord> parse_detections(std::istream& in, std::string_view source = "<detections>");
std::vector<GroundTruthRecord> parse_ground_truths(std::istream& in, std::string_view source = "<ground truth>");

/// Throws ParseError on malformed content and InvalidInput if a file cannot be read.
EvalReport evaluate_files(const std::filesystem::path& dets, const std::filesystem::path& gts,
                          const EvalOptions& opts = {});

std::string report_to_json(const EvalReport& r);
std::string format_report_table(const EvalReport& r);

}  // namespace giou
