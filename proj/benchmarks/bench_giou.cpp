#include <array>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "eval_fixtures.hpp"
#include "giou/box.hpp"
#include "giou/box_nd.hpp"
#include "giou/grad.hpp"
#include "giou/polygon.hpp"
#include "giou/sampling.hpp"
#include "oracles.hpp"
#include "polygons.hpp"

namespace {

struct BoxPairs {
  std::vector<giou::Box2D> pred;
  std::vector<giou::CanonicalBox2D> gt;
};

BoxPairs make_pairs(std::size_t n) {
  std::mt19937_64 rng(11);
  BoxPairs p;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = giou::testing::random_box(rng, 0, 100);
    const auto b = giou::testing::random_box(rng, 0, 100);
    p.pred.push_back(giou::Box2D::from_array(a));
    p.gt.emplace_back(b[0], b[1], b[2], b[3]);
  }
  return p;
}

void BM_PairMetrics(benchmark::State& state) {
  const auto p = make_pairs(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(giou::pair_metrics(p.pred[i & 1023], p.gt[i & 1023]));
    ++i;
  }
}
BENCHMARK(BM_PairMetrics);

void BM_GiouLossGrad(benchmark::State& state) {
  const auto p = make_pairs(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(giou::giou_loss_grad(p.pred[i & 1023], p.gt[i & 1023]));
    ++i;
  }
}
BENCHMARK(BM_GiouLossGrad);

void BM_NdMetrics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<giou::Interval> a, b;
  for (std::size_t k = 0; k < n; ++k) {
    const double lo_a = u(rng), lo_b = u(rng);
    a.push_back({lo_a, lo_a + 1 + u(rng)});
    b.push_back({lo_b, lo_b + 1 + u(rng)});
  }
  const giou::BoxND pa(a), pb(b);
  for (auto _ : state) benchmark::DoNotOptimize(giou::giou_nd(pa, pb));
}
BENCHMARK(BM_NdMetrics)->Arg(2)->Arg(3)->Arg(8);

void BM_PolygonGiou(benchmark::State& state) {
  std::mt19937_64 rng(13);
  const int k = static_cast<int>(state.range(0));
  const auto a = giou::testing::random_convex(rng, k);
  const auto b = giou::testing::random_convex(rng, k);
  for (auto _ : state) benchmark::DoNotOptimize(giou::polygon_giou(a, b));
}
BENCHMARK(BM_PolygonGiou)->Arg(4)->Arg(8)->Arg(16);

void BM_Evaluate(benchmark::State& state) {
  const auto f = giou::testing::random_eval_fixture(14, static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(giou::evaluate(f.dets, f.gts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.dets.size()));
}
BENCHMARK(BM_Evaluate)->Arg(16)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_SamplePairs(benchmark::State& state) {
  giou::SampleConfig cfg;
  cfg.n_samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(giou::sample_pairs(cfg));
}
BENCHMARK(BM_SamplePairs)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
