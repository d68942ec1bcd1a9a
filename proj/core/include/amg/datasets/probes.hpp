#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "amg/datasets/record.hpp"
#include "amg/embedding/index.hpp"

namespace amg {

/// Audio embedding concatenated with the record's caption prototype, then
/// renormalized. One row per record.
Tensor fused_embeddings(std::span<const Record> corpus, const Embedder& audio, const EmbeddingIndex& index);

inline constexpr std::size_t kDensityNeighbors = 5;

/// Mean cosine similarity of each point to its nearest in-cluster peers
/// (all peers when the cluster has fewer than kDensityNeighbors + 1 members;
/// 0 for a singleton).
std::vector<double> density_scores(std::span<const std::size_t> assignments, const Tensor& embeddings);

/// Top-m records by density in each cluster, clusters in index order, ties to
/// the lowest record id.
std::vector<RecordId> select_probes(std::span<const std::size_t> assignments, const Tensor& embeddings,
                                    std::span<const Record> records, std::size_t m_per_cluster);

}  // namespace amg
