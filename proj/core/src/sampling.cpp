#include "giou/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "giou/box.hpp"

namespace giou {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

SplitMix64 SplitMix64::split(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mixer(seed ^ (index * 0xd1b54a32d192ed03ULL));
  return SplitMix64(mixer.next());
}

std::string_view to_string(SampleMode m) {
  return m == SampleMode::mixed ? "mixed" : "independent";
}

std::optional<SampleMode> parse_sample_mode(std::string_view s) {
  if (s == "mixed") return SampleMode::mixed;
  if (s == "independent") return SampleMode::independent;
  return std::nullopt;
}

std::vector<SamplePair> sample_pairs(const SampleConfig& cfg) {
  if (cfg.n_samples == 0) {
    throw InvalidInput("sample_pairs: n_samples must be at least 1");
  }
  if (!std::isfinite(cfg.lo) || !std::isfinite(cfg.hi) || !(cfg.hi > cfg.lo)) {
    throw InvalidInput("sample_pairs: coordinate range must be finite with hi > lo");
  }
  std::vector<SamplePair> out(cfg.n_samples);
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    auto rng = SplitMix64::split(cfg.seed, i);
    auto draw = [&] {
      const double x1 = rng.uniform(cfg.lo, cfg.hi);
      const double y1 = rng.uniform(cfg.lo, cfg.hi);
      const double x2 = rng.uniform(cfg.lo, cfg.hi);
      const double y2 = rng.uniform(cfg.lo, cfg.hi);
      return canonicalize(Box2D(x1, y1, x2, y2));
    };
    const CanonicalBox2D a = draw();
    const bool jitter = cfg.mode == SampleMode::mixed && rng.uniform() < 0.5;
    auto draw_second = [&] {
      if (!jitter) return draw();
      const double t = rng.uniform();
      const double w = a.width();
      const double h = a.height();
      const double x1 = a.x1() + t * w * rng.uniform(-1.0, 1.0);
      const double y1 = a.y1() + t * h * rng.uniform(-1.0, 1.0);
      const double x2 = a.x2() + t * w * rng.uniform(-1.0, 1.0);
      const double y2 = a.y2() + t * h * rng.uniform(-1.0, 1.0);
      return canonicalize(Box2D(x1, y1, x2, y2));
    };
    CanonicalBox2D b = draw_second();
    while (!(b.area() > 0.0)) b = draw_second();
    const auto m = pair_metrics(a.raw(), b);
    out[i] = {m.iou, m.giou};
  }
  return out;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidInput("spearman: inputs differ in length");
  }
  const std::size_t n = a.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();

  auto ranks = [n](std::span<const double> v) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double mean = 0.5 * static_cast<double>(n + 1);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = ra[i] - mean;
    const double db = rb[i] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

SampleSummary summarize(std::span<const SamplePair> samples) {
  SampleSummary s;
  s.n = samples.size();
  s.min_giou = std::numeric_limits<double>::infinity();
  s.max_gap = -std::numeric_limits<double>::infinity();
  s.bin_max_gap.fill(std::numeric_limits<double>::quiet_NaN());

  std::vector<double> ov_iou, ov_giou;
  for (const auto& p : samples) {
    const bool ok = p.iou >= 0.0 && p.iou <= 1.0 && p.giou > -1.0 && p.giou <= 1.0 && p.giou <= p.iou;
    if (!ok) ++s.bound_violations;
    s.min_giou = std::min(s.min_giou, p.giou);
    const double gap = p.iou - p.giou;
    s.max_gap = std::max(s.max_gap, gap);
    if (p.iou > 0.0) {
      ++s.n_overlapping;
      ov_iou.push_back(p.iou);
      ov_giou.push_back(p.giou);
    }
    for (std::size_t b = 0; b < 4; ++b) {
      const bool last = b == 3;
      const bool in = p.iou >= kHighIouBinEdges[b] &&
                      (last ? p.iou <= kHighIouBinEdges[b + 1] : p.iou < kHighIouBinEdges[b + 1]);
      if (in) {
        ++s.bin_counts[b];
        s.bin_max_gap[b] = s.bin_counts[b] == 1 ? gap : std::max(s.bin_max_gap[b], gap);
      }
    }
  }
  s.spearman_overlapping = spearman(ov_iou, ov_giou);
  return s;
}

void write_samples_csv(std::ostream& os, const SampleConfig& cfg, std::span<const SamplePair> samples) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "# seed=%llu n=%zu range=[%.17g,%.17g] mode=%s\n",
                static_cast<unsigned long long>(cfg.seed), cfg.n_samples, cfg.lo, cfg.hi,
                std::string(to_string(cfg.mode)).c_str());
  os << buf << "iou,giou\n";
  for (const auto& p : samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.iou, p.giou);
    os << buf;
  }
}

std::string summary_to_json(const SampleConfig& cfg, const SampleSummary& s) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["mode"] = std::string(to_string(cfg.mode));
  j["n_samples"] = s.n;
  j["range"] = {cfg.lo, cfg.hi};
  j["n_overlapping"] = s.n_overlapping;
  j["bound_violations"] = s.bound_violations;
  j["min_giou"] = s.min_giou;
  j["max_iou_minus_giou"] = s.max_gap;
  j["spearman_overlapping"] = s.spearman_overlapping;
  auto bins = nlohmann::ordered_json::array();
  for (std::size_t b = 0; b < 4; ++b) {
    nlohmann::ordered_json bj;
    bj["iou_lo"] = kHighIouBinEdges[b];
    bj["iou_hi"] = kHighIouBinEdges[b + 1];
    bj["count"] = s.bin_counts[b];
    bj["max_iou_minus_giou"] =
        s.bin_counts[b] == 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(s.bin_max_gap[b]);
    bins.push_back(std::move(bj));
  }
  j["high_iou_bins"] = std::move(bins);
  return j.dump(2) + "\n";
}

}  // namespace giou
