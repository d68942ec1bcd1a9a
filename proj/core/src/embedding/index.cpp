#include "amg/embedding/index.hpp"

#include <cmath>
#include <set>

#include "amg/error.hpp"
#include "amg/io/container.hpp"

namespace amg {

EmbeddingIndex::EmbeddingIndex(Tensor rows, std::vector<RecordId> ids, std::vector<CaptionId> captions)
    : rows_(std::move(rows)), ids_(std::move(ids)), captions_(std::move(captions)) {
  if (rows_.rank() != 2 || rows_.rows() != ids_.size() || ids_.size() != captions_.size()) {
    throw ShapeError("index: rows, ids and captions disagree in length");
  }
  std::set<RecordId> seen;
  for (auto id : ids_) {
    if (!seen.insert(id).second) throw DomainError("index: duplicate record id " + std::to_string(id));
  }
  const auto d = rows_.cols();
  std::map<CaptionId, Tensor> sums;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    auto [it, fresh] = sums.try_emplace(captions_[i], Shape{d});
    for (std::size_t j = 0; j < d; ++j) it->second[j] += rows_.at(i, j);
  }
  for (auto& [caption, total] : sums) prototypes_.emplace(caption, normalized(total));
}

std::size_t EmbeddingIndex::row_of(RecordId id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return i;
  }
  throw DomainError("record id " + std::to_string(id) + " not in index");
}

EmbeddingIndex build_index(std::span<const Record> corpus, const Embedder& embedder) {
  if (corpus.empty()) throw DomainError("build_index: empty corpus");
  std::vector<Tensor> rows;
  std::vector<RecordId> ids;
  std::vector<CaptionId> captions;
  rows.reserve(corpus.size());
  for (const auto& r : corpus) {
    rows.push_back(embedder.embed(r.clip));
    ids.push_back(r.id);
    captions.push_back(r.caption);
  }
  return EmbeddingIndex(stack_rows(rows), std::move(ids), std::move(captions));
}

NeighborHit nearest_neighbor(const EmbeddingIndex& index, const Tensor& query) {
  if (index.size() == 0) throw DomainError("nearest_neighbor: empty index");
  const auto d = index.dim();
  if (query.size() != d) throw ShapeError("nearest_neighbor: query dimension mismatch");
  const auto& rows = index.rows();
  std::size_t best = 0;
  double best_d2 = 0.0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = query[j] - rows.at(i, j);
      d2 += diff * diff;
    }
    if (i == 0 || d2 < best_d2 || (d2 == best_d2 && index.ids()[i] < index.ids()[best])) {
      best = i;
      best_d2 = d2;
    }
  }
  NeighborHit hit;
  hit.row = best;
  hit.record_id = index.ids()[best];
  hit.embedding = index.row(best);
  hit.caption = index.captions()[best];
  hit.similarity = cosine_sim(query, hit.embedding);
  hit.distance = std::sqrt(best_d2);
  return hit;
}

Tensor embed_caption(const EmbeddingIndex& index, CaptionId caption) {
  const auto it = index.prototypes().find(caption);
  if (it == index.prototypes().end()) throw DomainError("unknown caption id " + std::to_string(caption));
  return it->second;
}

void save_index(const EmbeddingIndex& index, const std::filesystem::path& path) {
  BinaryWriter w;
  w.tensor(index.rows());
  w.u64(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    w.u64(index.ids()[i]);
    w.u32(index.captions()[i]);
  }
  write_container(path, kIndexMagic, kIndexVersion, w.bytes());
}

EmbeddingIndex load_index(const std::filesystem::path& path) {
  BinaryReader r(read_container(path, kIndexMagic, kIndexVersion));
  Tensor rows = r.tensor();
  const auto n = r.u64();
  std::vector<RecordId> ids(n);
  std::vector<CaptionId> captions(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = r.u64();
    captions[i] = r.u32();
  }
  r.expect_end();
  return EmbeddingIndex(std::move(rows), std::move(ids), std::move(captions));
}

}  // namespace amg
