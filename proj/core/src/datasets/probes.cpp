#include "amg/datasets/probes.hpp"

#include <algorithm>
#include <functional>

#include "amg/error.hpp"

namespace amg {

Tensor fused_embeddings(std::span<const Record> corpus, const Embedder& audio, const EmbeddingIndex& index) {
  if (corpus.empty()) throw DomainError("fused_embeddings: empty corpus");
  std::vector<Tensor> rows;
  rows.reserve(corpus.size());
  for (const auto& r : corpus) {
    const Tensor a = audio.embed(r.clip);
    const Tensor p = embed_caption(index, r.caption);
    std::vector<double> joined(a.values());
    joined.insert(joined.end(), p.values().begin(), p.values().end());
    rows.push_back(normalized(Tensor::vector(std::move(joined))));
  }
  return stack_rows(rows);
}

std::vector<double> density_scores(std::span<const std::size_t> assignments, const Tensor& embeddings) {
  if (embeddings.rank() != 2 || embeddings.rows() != assignments.size()) {
    throw ShapeError("density_scores: one embedding row per assignment");
  }
  const auto n = assignments.size();
  std::vector<Tensor> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back(embeddings.row(i));
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> sims;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && assignments[j] == assignments[i]) sims.push_back(cosine_sim(rows[i], rows[j]));
    }
    if (sims.empty()) continue;
    const auto take = std::min(kDensityNeighbors, sims.size());
    std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(take), sims.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t k = 0; k < take; ++k) s += sims[k];
    out[i] = s / static_cast<double>(take);
  }
  return out;
}

std::vector<RecordId> select_probes(std::span<const std::size_t> assignments, const Tensor& embeddings,
                                    std::span<const Record> records, std::size_t m_per_cluster) {
  if (records.size() != assignments.size()) throw ShapeError("select_probes: one record per assignment");
  if (m_per_cluster < 1) throw DomainError("select_probes: m_per_cluster must be >= 1");
  if (assignments.empty()) throw DomainError("select_probes: no points");
  const auto scores = density_scores(assignments, embeddings);
  const auto clusters = *std::max_element(assignments.begin(), assignments.end()) + 1;
  std::vector<RecordId> out;
  for (std::size_t c = 0; c < clusters; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      if (assignments[i] == c) members.push_back(i);
    }
    if (members.empty()) throw DomainError("select_probes: cluster " + std::to_string(c) + " is empty");
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return records[a].id < records[b].id;
    });
    const auto take = std::min(m_per_cluster, members.size());
    for (std::size_t k = 0; k < take; ++k) out.push_back(records[members[k]].id);
  }
  return out;
}

}  // namespace amg
