#include <gtest/gtest.h>

#include <cmath>

#include "amg/datasets/corpus.hpp"
#include "amg/embedding/embedder.hpp"
#include "amg/embedding/index.hpp"
#include "amg/error.hpp"
#include "support.hpp"

namespace amg {
namespace {

using testing::random_tensor;

EmbedderConfig small_spectral() {
  EmbedderConfig c;
  c.input_length = 64;
  c.frame = 32;
  c.hop = 16;
  c.dim = 8;
  return c;
}

const Corpus& default_corpus() {
  static const Corpus c = build_corpus(CorpusConfig{});
  return c;
}

TEST(Embedder, UnitNormForEveryKind) {
  for (auto kind : {EmbedderKind::kSpectral, EmbedderKind::kRandomProjection}) {
    EmbedderConfig c;
    c.kind = kind;
    const Embedder e(c);
    for (const auto& r : default_corpus()) {
      ASSERT_NEAR(norm(e.embed(r.clip)), 1.0, 1e-9) << to_string(kind);
    }
  }
}

TEST(Embedder, SpectralRobustToGain) {
  const Embedder e{EmbedderConfig{}};
  for (const auto& r : default_corpus()) {
    EXPECT_GT(cosine_sim(e.embed(r.clip), e.embed(2.0 * r.clip)), 0.99) << "record " << r.id;
  }
}

TEST(Embedder, TapeAndValuePathsAgree) {
  for (auto kind : {EmbedderKind::kSpectral, EmbedderKind::kRandomProjection}) {
    EmbedderConfig c = small_spectral();
    c.kind = kind;
    const Embedder e(c);
    const Tensor x = random_tensor(Shape{64}, 3);
    Tape tape;
    EXPECT_LT(testing::max_abs_diff(e.embed(tape, tape.constant(x)).value(), e.embed(x)), 1e-14);
  }
}

TEST(Embedder, SimilarityGradientMatchesFiniteDifferences) {
  for (auto kind : {EmbedderKind::kSpectral, EmbedderKind::kRandomProjection}) {
    EmbedderConfig c = small_spectral();
    c.kind = kind;
    const Embedder e(c);
    const Tensor x0 = random_tensor(Shape{64}, 5, 0.5);
    const Tensor target = e.embed(random_tensor(Shape{64}, 6));
    auto f = [&](const Tensor& x) { return cosine_sim(e.embed(x), target); };
    Tape tape;
    const Var x = tape.leaf(x0);
    const Tensor g = tape.backward(cosine_similarity(e.embed(tape, x), tape.constant(target))).of(x);
    EXPECT_LT(testing::relative_error(g, testing::numeric_gradient(f, x0, 1e-6)), 1e-4) << to_string(kind);
  }
}

TEST(Embedder, RejectsBadInput) {
  const Embedder e(small_spectral());
  EXPECT_THROW(e.embed(Tensor(Shape{63})), ShapeError);
  EXPECT_THROW(e.embed(Tensor(Shape{64})), DomainError);
  EmbedderConfig bad = small_spectral();
  bad.frame = 128;
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_THROW(embedder_kind_from_string("clap"), ConfigError);
}

TEST(Embedder, SeedChangesProjection) {
  EmbedderConfig a = small_spectral();
  EmbedderConfig b = a;
  b.seed = a.seed + 1;
  const Tensor x = random_tensor(Shape{64}, 2);
  EXPECT_FALSE(Embedder(a).embed(x) == Embedder(b).embed(x));
  EXPECT_EQ(Embedder(a).embed(x), Embedder(a).embed(x));
}

TEST(Embedder, WindowedCopyKeepsDescriptor) {
  const Embedder e{EmbedderConfig{}};
  const Embedder w = e.with_input_length(128);
  EXPECT_EQ(w.input_length(), 128u);
  EXPECT_EQ(w.dim(), e.dim());
  EXPECT_NEAR(norm(w.embed(random_tensor(Shape{128}, 1))), 1.0, 1e-12);
}

TEST(CosineSim, BasicValues) {
  const Tensor v = Tensor::vector({0.3, -2.0, 5.0});
  EXPECT_EQ(cosine_sim(v, v), 1.0);
  EXPECT_NEAR(cosine_sim(Tensor::vector({1, 0}), Tensor::vector({0, 1})), 0.0, 1e-15);
  EXPECT_NEAR(cosine_sim(Tensor::vector({1, 0}), Tensor::vector({1, 1})), 0.70711, 1e-5);
  EXPECT_EQ(cosine_sim(v, -1.0 * v), -1.0);
  EXPECT_THROW(cosine_sim(v, Tensor(Shape{3})), NumericError);
  EXPECT_THROW(cosine_sim(v, Tensor(Shape{2}, 1.0)), ShapeError);
}

TEST(CosineSim, StaysInRange) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Tensor a = random_tensor(Shape{5}, s);
    const double c = cosine_sim(a, (1.0 + 1e-3 * static_cast<double>(s)) * a);
    ASSERT_LE(c, 1.0);
    ASSERT_GE(c, -1.0);
  }
}

TEST(Index, DefaultCorpusRowsAreUnit) {
  const Embedder e{EmbedderConfig{}};
  const auto idx = build_index(default_corpus(), e);
  ASSERT_EQ(idx.size(), 96u);
  for (std::size_t i = 0; i < idx.size(); ++i) EXPECT_NEAR(norm(idx.row(i)), 1.0, 1e-9);
}

TEST(Index, PrototypesAreRenormalizedMeans) {
  const Embedder e{EmbedderConfig{}};
  const auto& corpus = default_corpus();
  const auto idx = build_index(corpus, e);
  for (const auto& [caption, proto] : idx.prototypes()) {
    Tensor sum(Shape{e.dim()});
    for (const auto& r : corpus) {
      if (r.caption == caption) sum = sum + e.embed(r.clip);
    }
    const double n = norm(sum);
    for (std::size_t j = 0; j < e.dim(); ++j) EXPECT_NEAR(proto[j], sum[j] / n, 1e-12);
  }
}

TEST(Index, SingleCaptionSinglePrototype) {
  const Tensor rows = Tensor::matrix(3, 2, {1, 0, 0, 1, 0.6, 0.8});
  const EmbeddingIndex idx(rows, {10, 11, 12}, {4, 4, 4});
  ASSERT_EQ(idx.prototypes().size(), 1u);
  const Tensor expect = normalized(Tensor::vector({1.6, 1.8}));
  EXPECT_LT(testing::max_abs_diff(embed_caption(idx, 4), expect), 1e-15);
  EXPECT_THROW(embed_caption(idx, 5), DomainError);
}

TEST(Index, SingleMemberPrototypeIsTheMember) {
  const Tensor rows = Tensor::matrix(2, 2, {0.6, 0.8, 1, 0});
  const EmbeddingIndex idx(rows, {0, 1}, {0, 1});
  EXPECT_LT(testing::max_abs_diff(embed_caption(idx, 0), Tensor::vector({0.6, 0.8})), 1e-15);
}

TEST(Index, ConstructionChecks) {
  EXPECT_THROW(EmbeddingIndex(Tensor(Shape{2, 2}, 1.0), {1}, {0}), ShapeError);
  EXPECT_THROW(EmbeddingIndex(Tensor(Shape{2, 2}, 1.0), {1, 1}, {0, 0}), DomainError);
  EXPECT_THROW(build_index({}, Embedder{EmbedderConfig{}}), DomainError);
}

TEST(Nearest, ExactRowGivesItself) {
  const Embedder e{EmbedderConfig{}};
  const auto idx = build_index(default_corpus(), e);
  for (std::size_t k : {1u, 17u, 63u}) {
    const auto hit = nearest_neighbor(idx, idx.row(k));
    EXPECT_EQ(hit.record_id, idx.ids()[k]);
    EXPECT_EQ(hit.similarity, 1.0);
    EXPECT_EQ(hit.distance, 0.0);
  }
}

TEST(Nearest, TieGoesToLowerId) {
  Tensor rows(Shape{8, 2});
  for (std::size_t i = 0; i < 8; ++i) {
    rows.at(i, 0) = -1.0;
    rows.at(i, 1) = 0.0;
  }
  rows.at(3, 0) = 0.0;
  rows.at(3, 1) = 1.0;
  rows.at(7, 0) = 1.0;
  rows.at(7, 1) = 0.0;
  const EmbeddingIndex idx(rows, {0, 1, 2, 3, 4, 5, 6, 7}, {0, 0, 0, 0, 0, 0, 0, 0});
  // Equidistant from rows 3 and 7.
  EXPECT_EQ(nearest_neighbor(idx, normalized(Tensor::vector({1, 1}))).record_id, 3u);
  // Same with the ids presented in reverse order.
  const EmbeddingIndex rev(rows, {7, 6, 5, 4, 3, 2, 1, 0}, {0, 0, 0, 0, 0, 0, 0, 0});
  EXPECT_EQ(nearest_neighbor(rev, normalized(Tensor::vector({1, 1}))).record_id, 0u);
}

TEST(Nearest, MatchesExhaustiveScanOracle) {
  const Embedder e{EmbedderConfig{}};
  const auto idx = build_index(default_corpus(), e);
  RngStream rng(77);
  std::size_t mismatches = 0;
  for (int q = 0; q < 1000; ++q) {
    const Tensor query = normalized(gaussian_sample(Shape{idx.dim()}, rng));
    // Highest cosine similarity; on unit rows this is the L2 nearest.
    std::size_t best = 0;
    double best_sim = -2.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < idx.dim(); ++j) s += query[j] * idx.rows().at(i, j);
      if (s > best_sim) {
        best_sim = s;
        best = i;
      }
    }
    const auto hit = nearest_neighbor(idx, query);
    if (hit.record_id != idx.ids()[best] || std::abs(hit.similarity - best_sim) > 1e-12) ++mismatches;
  }
  EXPECT_EQ(mismatches, 0u);
}

TEST(Nearest, RejectsBadQueries) {
  const EmbeddingIndex empty;
  EXPECT_THROW(nearest_neighbor(empty, Tensor::vector({1})), DomainError);
  const EmbeddingIndex idx(Tensor::matrix(1, 2, {1, 0}), {0}, {0});
  EXPECT_THROW(nearest_neighbor(idx, Tensor::vector({1, 0, 0})), ShapeError);
}

TEST(IndexFile, RoundTrip) {
  const Embedder e{EmbedderConfig{}};
  const auto idx = build_index(default_corpus(), e);
  const auto path = std::filesystem::temp_directory_path() / "amg_test_index.amgi";
  save_index(idx, path);
  EXPECT_TRUE(load_index(path) == idx);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace amg
