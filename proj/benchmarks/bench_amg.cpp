#include <benchmark/benchmark.h>

#include "amg/datasets/corpus.hpp"
#include "amg/diffusion/schedule.hpp"
#include "amg/embedding/index.hpp"
#include "amg/guidance/guidance.hpp"
#include "amg/guidance/sampler.hpp"
#include "amg/model/codec.hpp"
#include "amg/model/denoiser.hpp"

namespace {

using namespace amg;

// Default-sized pieces with untrained weights; timings do not depend on
// the weight values.
struct World {
  Corpus corpus = build_corpus(CorpusConfig{});
  Codec codec = Codec::identity(1);
  NoiseSchedule schedule = NoiseSchedule::make(ScheduleKind::kLinear, 100, 1e-3, 0.1);
  DenoiserParams params;
  Embedder spectral{EmbedderConfig{}};
  EmbeddingIndex index;

  World() {
    std::vector<Tensor> clips;
    for (const auto& r : corpus) clips.push_back(r.clip);
    codec = fit_codec(clips, 64);
    RngStream rng(5);
    params = DenoiserParams::random(DenoiserConfig{}, rng);
    index = build_index(corpus, spectral);
  }
  SamplerContext context() const { return {&params, &codec, &spectral, &index, &schedule}; }

  static const World& get() {
    static const World w;
    return w;
  }
};

void BM_Denoise(benchmark::State& state) {
  const auto& w = World::get();
  RngStream rng(1);
  const Tensor z = gaussian_sample(Shape{64}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(denoise(w.params, z, 50, 2));
}
BENCHMARK(BM_Denoise);

void BM_Embed(benchmark::State& state) {
  const auto& w = World::get();
  for (auto _ : state) benchmark::DoNotOptimize(w.spectral.embed(w.corpus[3].clip));
}
BENCHMARK(BM_Embed);

void BM_NearestNeighbor(benchmark::State& state) {
  const auto& w = World::get();
  const Tensor q = w.spectral.embed(w.corpus[40].clip);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_neighbor(w.index, q));
}
BENCHMARK(BM_NearestNeighbor);

void BM_DissimGuidance(benchmark::State& state) {
  const auto& w = World::get();
  GuidanceConfig g;
  g.sim_grad_mode = state.range(0) == 0 ? SimGradMode::kFullChain : SimGradMode::kKernelOnly;
  RngStream rng(2);
  const Tensor z = gaussian_sample(Shape{64}, rng);
  const Tensor eps = gaussian_sample(Shape{64}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(dissim_guidance(w.context(), z, 50, eps, 0, g));
}
BENCHMARK(BM_DissimGuidance)->Arg(0)->Arg(1);

void BM_GuidedSample(benchmark::State& state) {
  const auto& w = World::get();
  GuidanceConfig g;
  g.enable_spe = g.enable_dup = g.enable_sim = state.range(0) != 0;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(guided_sample(w.context(), 0, g, seed++));
}
BENCHMARK(BM_GuidedSample)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
