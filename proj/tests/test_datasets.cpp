#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>

#include "amg/datasets/corpus.hpp"
#include "amg/datasets/kmeans.hpp"
#include "amg/datasets/probes.hpp"
#include "amg/embedding/index.hpp"
#include "amg/error.hpp"
#include "support.hpp"

namespace amg {
namespace {

const Corpus& default_corpus() {
  static const Corpus c = build_corpus(CorpusConfig{});
  return c;
}

Tensor blobs(std::size_t per, std::uint64_t seed) {
  const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
  RngStream rng(seed);
  Tensor out(Shape{3 * per, 2});
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < per; ++i)
      for (std::size_t j = 0; j < 2; ++j) out.at(c * per + i, j) = centers[c][j] + 0.3 * rng.normal();
  return out;
}

TEST(Corpus, DefaultShapeAndPeak) {
  const auto& corpus = default_corpus();
  ASSERT_EQ(corpus.size(), 96u);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(corpus[i].id, i);
    EXPECT_EQ(corpus[i].clip.size(), 256u);
    double peak = 0.0;
    for (double v : corpus[i].clip.values()) peak = std::max(peak, std::abs(v));
    EXPECT_NEAR(peak, 0.9, 1e-12);
  }
  EXPECT_EQ(corpus[9].caption, 1u);
  EXPECT_EQ(corpus[9].caption_text, caption_text_for(CorpusConfig::default_classes()[1].name));
}

TEST(Corpus, DuplicatesAreBitIdentical) {
  const auto& corpus = default_corpus();
  std::size_t identical = 0;
  for (const auto& r : corpus) {
    if (r.clip == corpus[0].clip) ++identical;
    if (r.id >= 64) {
      ASSERT_TRUE(r.duplicate_of.has_value());
      EXPECT_EQ(*r.duplicate_of, 0u);
      EXPECT_EQ(r.caption, corpus[0].caption);
    } else {
      EXPECT_FALSE(r.duplicate_of.has_value());
    }
  }
  EXPECT_EQ(identical, 33u);
}

TEST(Corpus, DuplicateNeighbourIsExact) {
  const auto& corpus = default_corpus();
  const Embedder e{EmbedderConfig{}};
  const auto idx = build_index(corpus, e);
  const auto hit = nearest_neighbor(idx, e.embed(corpus[70].clip));
  EXPECT_EQ(hit.similarity, 1.0);
  EXPECT_TRUE(corpus[idx.row_of(hit.record_id)].clip == corpus[0].clip);
}

TEST(Corpus, ClassesAreSeparated) {
  const auto base = synth_corpus(CorpusConfig{});
  const Embedder e{EmbedderConfig{}};
  double within = 0.0, across = 0.0;
  std::size_t nw = 0, na = 0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (std::size_t j = i + 1; j < base.size(); ++j) {
      const double s = cosine_sim(e.embed(base[i].clip), e.embed(base[j].clip));
      if (base[i].caption == base[j].caption) {
        within += s;
        ++nw;
      } else {
        across += s;
        ++na;
      }
    }
  }
  EXPECT_GT(within / static_cast<double>(nw), across / static_cast<double>(na) + 0.2);
}

TEST(Corpus, EmptyPlanAddsNothingAndSeedsMatter) {
  CorpusConfig c;
  c.duplicates.clear();
  const auto corpus = build_corpus(c);
  EXPECT_EQ(corpus.size(), 64u);
  EXPECT_EQ(corpus, synth_corpus(c));
  CorpusConfig other = c;
  other.seed += 1;
  EXPECT_FALSE(synth_corpus(other)[0].clip == corpus[0].clip);
}

TEST(Corpus, ConfigValidation) {
  CorpusConfig c;
  c.duplicates = {{64, 3}};
  EXPECT_THROW(c.validate(), ConfigError);
  c = CorpusConfig{};
  c.classes[0].frequencies = {0.6, 0.1};
  EXPECT_THROW(c.validate(), ConfigError);
  c = CorpusConfig{};
  c.classes[1].name = c.classes[0].name;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(envelope_from_string("sawtooth"), ConfigError);
  EXPECT_THROW(inject_duplicates(synth_corpus(CorpusConfig{}), {{500, 1}}), DomainError);
}

TEST(Corpus, FileRoundTripAndManifest) {
  const auto path = std::filesystem::temp_directory_path() / "amg_test_corpus.amgc";
  save_corpus(default_corpus(), path);
  EXPECT_EQ(load_corpus(path), default_corpus());
  std::filesystem::remove(path);
  const auto csv = corpus_manifest_csv(default_corpus());
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 97);
  EXPECT_EQ(csv.rfind("record_id,caption_id,caption_text,duplicate_of\n", 0), 0u);
}

TEST(KMeans, OneClusterPerPoint) {
  const Tensor pts = blobs(3, 1);
  const auto km = kmeans(pts, pts.rows(), 5);
  EXPECT_NEAR(km.inertia(), 0.0, 1e-20);
  std::set<std::size_t> used(km.assignments.begin(), km.assignments.end());
  EXPECT_EQ(used.size(), pts.rows());
}

TEST(KMeans, RecoversBlobs) {
  const Tensor pts = blobs(20, 2);
  const auto km = kmeans(pts, 3, 9);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 1; i < 20; ++i) EXPECT_EQ(km.assignments[c * 20 + i], km.assignments[c * 20]);
  }
  std::set<std::size_t> labels{km.assignments[0], km.assignments[20], km.assignments[40]};
  EXPECT_EQ(labels.size(), 3u);
}

TEST(KMeans, InertiaNeverIncreases) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Tensor pts = testing::random_tensor(Shape{40, 3}, 50 + s);
    const auto km = kmeans(pts, 5, s);
    for (std::size_t i = 1; i < km.inertia_history.size(); ++i) {
      EXPECT_LE(km.inertia_history[i], km.inertia_history[i - 1] + 1e-12);
    }
    EXPECT_EQ(km.assignments, kmeans(pts, 5, s).assignments);
  }
  EXPECT_THROW(kmeans(blobs(2, 1), 7, 1), DomainError);
  EXPECT_THROW(kmeans(blobs(2, 1), 0, 1), DomainError);
}

std::vector<Record> stub_records(std::size_t n) {
  std::vector<Record> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].id = i;
  return out;
}

TEST(Probes, DensityTieGoesToLowestId) {
  // Four identical points: equal density, so the lowest id wins.
  const Tensor emb = Tensor::matrix(4, 2, {1, 0, 1, 0, 1, 0, 1, 0});
  const std::vector<std::size_t> assign{0, 0, 0, 0};
  auto records = stub_records(4);
  records[0].id = 9;
  EXPECT_EQ(select_probes(assign, emb, records, 1), std::vector<RecordId>{1});
  EXPECT_EQ(select_probes(assign, emb, records, 2), (std::vector<RecordId>{1, 2}));
}

TEST(Probes, OutlierIsNotChosen) {
  const Tensor emb = Tensor::matrix(4, 2, {1, 0, 0.99, 0.141, 0.98, 0.199, 0, 1});
  const std::vector<std::size_t> assign{0, 0, 0, 0};
  const auto scores = density_scores(assign, emb);
  EXPECT_LT(scores[3], scores[1]);
  EXPECT_NE(select_probes(assign, emb, stub_records(4), 1).front(), 3u);
}

TEST(Probes, SingletonDensityIsZero) {
  const Tensor emb = Tensor::matrix(3, 2, {1, 0, 0.8, 0.6, 0, 1});
  const auto scores = density_scores(std::vector<std::size_t>{0, 0, 1}, emb);
  EXPECT_EQ(scores[2], 0.0);
  EXPECT_NEAR(scores[0], 0.8, 1e-15);
  EXPECT_THROW(select_probes(std::vector<std::size_t>{0, 2}, Tensor::matrix(2, 2, {1, 0, 0, 1}), stub_records(2), 1),
               DomainError);
}

TEST(Probes, ReorderingRecordsKeepsSelection) {
  const Tensor emb = testing::random_tensor(Shape{30, 4}, 7);
  std::vector<std::size_t> assign(30);
  for (std::size_t i = 0; i < 30; ++i) assign[i] = i % 3;
  const auto records = stub_records(30);
  auto picked = select_probes(assign, emb, records, 2);

  std::vector<std::size_t> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::vector<Tensor> rows;
  std::vector<std::size_t> assign_p;
  std::vector<Record> records_p;
  for (auto p : perm) {
    rows.push_back(emb.row(p));
    assign_p.push_back(assign[p]);
    records_p.push_back(records[p]);
  }
  auto picked_p = select_probes(assign_p, stack_rows(rows), records_p, 2);
  std::sort(picked.begin(), picked.end());
  std::sort(picked_p.begin(), picked_p.end());
  EXPECT_EQ(picked, picked_p);
}

TEST(Probes, DefaultCorpusPicksTheDuplicatedRecord) {
  const auto& corpus = default_corpus();
  const Embedder e{EmbedderConfig{}};
  const auto idx = build_index(corpus, e);
  const Tensor fused = fused_embeddings(corpus, e, idx);
  const auto km = kmeans(fused, 12, 11);
  const auto ids = select_probes(km.assignments, fused, corpus, 1);
  ASSERT_EQ(ids.size(), 12u);
  const auto dup_hits = std::count_if(ids.begin(), ids.end(), [&](RecordId id) {
    return corpus[id].clip == corpus[0].clip;
  });
  EXPECT_EQ(dup_hits, 1);
}

}  // namespace
}  // namespace amg
