#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace giou {

/// SplitMix64. Small, fast and identical on every platform; `split` derives an
/// independent stream per sample index so generation can be sharded.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  static SplitMix64 split(std::uint64_t seed, std::uint64_t index);

 private:
  std::uint64_t state_;
};

enum class SampleMode {
  /// Both boxes from four independent uniform coordinates each. Almost every
  /// pair has low IoU.
  independent,
  /// Half the samples as `independent`; in the other half the second box
  /// jitters each corner coordinate of the first by t * extent * U(-1, 1),
  /// t ~ U(0, 1), which populates the whole IoU range.
  mixed,
};

std::string_view to_string(SampleMode m);
std::optional<SampleMode> parse_sample_mode(std::string_view s);

struct SampleConfig {
  SampleMode mode = SampleMode::mixed;
  std::size_t n_samples = 10000;
  double lo = 0.0;
  double hi = 100.0;
  std::uint64_t seed = 2019;
};

struct SamplePair {
  double iou;
  double giou;
};

/// The first box of every sample has four independent uniform coordinates
/// over [lo, hi], canonicalized; the second follows `cfg.mode`. A degenerate
/// second box (zero area) is redrawn from the same stream. Sample i depends
/// only on (seed, i).
std::vector<SamplePair> sample_pairs(const SampleConfig& cfg);

/// iou bins [0.8, 0.85), [0.85, 0.9), [0.9, 0.95), [0.95, 1].
inline constexpr std::array<double, 5> kHighIouBinEdges = {0.8, 0.85, 0.9, 0.95, 1.0};

struct SampleSummary {
  std::size_t n = 0;
  std::size_t n_overlapping = 0;
  std::size_t bound_violations = 0;  // iou outside [0,1], giou outside (-1,1] or giou > iou
  double min_giou = 0.0;
  double max_gap = 0.0;  // max(iou - giou)
  double spearman_overlapping = 0.0;
  std::array<std::size_t, 4> bin_counts{};
  std::array<double, 4> bin_max_gap{};  // NaN for empty bins
};

SampleSummary summarize(std::span<const SamplePair> samples);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

/// "# seed=..." comment line, then header "iou,giou", then one row per sample
/// at 17 significant digits.
void write_samples_csv(std::ostream& os, const SampleConfig& cfg, std::span<const SamplePair> samples);

std::string summary_to_json(const SampleConfig& cfg, const SampleSummary& s);

}  // namespace giou
