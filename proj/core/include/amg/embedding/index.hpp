#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "amg/datasets/record.hpp"
#include "amg/embedding/embedder.hpp"

namespace amg {

struct NeighborHit {
  RecordId record_id = 0;
  std::size_t row = 0;
  Tensor embedding;
  CaptionId caption = 0;
  double similarity = 0.0;
  double distance = 0.0;
};

/// Unit-normalized embeddings of every training record plus one prototype
/// per caption (renormalized mean of that caption's record embeddings).
class EmbeddingIndex {
 public:
  EmbeddingIndex() = default;
  EmbeddingIndex(Tensor rows, std::vector<RecordId> ids, std::vector<CaptionId> captions);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return rows_.rank() == 2 ? rows_.cols() : 0; }
  const Tensor& rows() const { return rows_; }
  Tensor row(std::size_t i) const { return rows_.row(i); }
  const std::vector<RecordId>& ids() const { return ids_; }
  const std::vector<CaptionId>& captions() const { return captions_; }
  const std::map<CaptionId, Tensor>& prototypes() const { return prototypes_; }
  std::size_t row_of(RecordId id) const;

  friend bool operator==(const EmbeddingIndex&, const EmbeddingIndex&) = default;

 private:
  Tensor rows_;
  std::vector<RecordId> ids_;
  std::vector<CaptionId> captions_;
  std::map<CaptionId, Tensor> prototypes_;
};

EmbeddingIndex build_index(std::span<const Record> corpus, const Embedder& embedder);

/// Exact L2 nearest neighbour; ties go to the lowest record id.
NeighborHit nearest_neighbor(const EmbeddingIndex& index, const Tensor& query);

/// The caption's prototype vector (unit norm).
Tensor embed_caption(const EmbeddingIndex& index, CaptionId caption);

inline constexpr std::uint32_t kIndexVersion = 1;

void save_index(const EmbeddingIndex& index, const std::filesystem::path& path);
EmbeddingIndex load_index(const std::filesystem::path& path);

}  // namespace amg
