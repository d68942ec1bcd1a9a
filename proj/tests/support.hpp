#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "amg/datasets/corpus.hpp"
#include "amg/embedding/index.hpp"
#include "amg/guidance/guidance.hpp"
#include "amg/model/codec.hpp"
#include "amg/model/trainer.hpp"
#include "amg/numerics/rng.hpp"

namespace amg::testing {

inline Tensor random_tensor(const Shape& shape, std::uint64_t seed, double scale = 1.0) {
  RngStream rng(seed);
  Tensor t = gaussian_sample(shape, rng);
  for (auto& v : t.data()) v *= scale;
  return t;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Central differences of a scalar function of a tensor.
inline Tensor numeric_gradient(const std::function<double(const Tensor&)>& f, const Tensor& x, double h) {
  Tensor g(x.shape());
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = f(probe);
    probe[i] = orig - h;
    const double down = f(probe);
    probe[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// max_i |a_i - b_i| / max(max_i |b_i|, floor)
inline double relative_error(const Tensor& a, const Tensor& b, double floor = 1e-12) {
  double scale = floor;
  for (double v : b.data()) scale = std::max(scale, std::abs(v));
  return max_abs_diff(a, b) / scale;
}

/// A small corpus, codec, schedule and briefly trained denoiser, enough for
/// mechanics tests of the sampler. Built once per test binary.
struct TinyWorld {
  Corpus corpus;
  Codec codec = Codec::identity(1);
  NoiseSchedule schedule;
  DenoiserParams params;
  Embedder spectral{EmbedderConfig{}};
  EmbeddingIndex index;

  SamplerContext context() const { return {&params, &codec, &spectral, &index, &schedule}; }

  static const TinyWorld& get() {
    static const TinyWorld world = build();
    return world;
  }

 private:
  static TinyWorld build() {
    TinyWorld w;
    CorpusConfig cc;
    cc.classes.resize(3);
    cc.records_per_class = 4;
    cc.duplicates = {{0, 8}};
    cc.clip_length = 64;
    w.corpus = build_corpus(cc);

    std::vector<Tensor> clips;
    std::vector<LabeledClip> labeled;
    for (const auto& r : w.corpus) {
      clips.push_back(r.clip);
      labeled.push_back({r.clip, r.caption});
    }
    w.codec = fit_codec(clips, 12);
    w.schedule = NoiseSchedule::make(ScheduleKind::kLinear, 20, 1e-3, 0.3);

    DenoiserConfig dc;
    dc.latent_dim = 12;
    dc.hidden = 24;
    dc.time_features = 8;
    dc.condition_dim = 8;
    dc.caption_count = 3;
    dc.steps = 20;
    TrainConfig tc;
    tc.steps = 300;
    tc.batch_size = 8;
    w.params = train(labeled, w.codec, w.schedule, dc, tc).params;

    EmbedderConfig ec;
    ec.input_length = 64;
    ec.frame = 32;
    ec.hop = 16;
    ec.dim = 8;
    w.spectral = Embedder(ec);
    w.index = build_index(w.corpus, w.spectral);
    return w;
  }
};

}  // namespace amg::testing
