#include "amg/metrics/self_similarity.hpp"

#include <cstdlib>

#include "amg/error.hpp"

namespace amg {
namespace {

std::vector<Tensor> window_embeddings(const Tensor& clip, std::size_t window, std::size_t hop, const Embedder& e) {
  std::vector<Tensor> out;
  for (std::size_t start = 0; start + window <= clip.size(); start += hop) {
    Tensor segment(Shape{window});
    for (std::size_t i = 0; i < window; ++i) segment[i] = clip[start + i];
    out.push_back(e.embed(segment));
  }
  return out;
}

std::size_t distance(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

}  // namespace

SelfSimMatrix self_similarity(const Tensor& reference, const Tensor& generated, std::size_t window, std::size_t hop,
                              const Embedder& embedder) {
  if (hop < 1) throw DomainError("self_similarity: hop must be >= 1");
  if (window == 0 || window > reference.size() || window > generated.size()) {
    throw DomainError("self_similarity: window longer than the clip");
  }
  const Embedder windowed = embedder.with_input_length(window);
  const auto rows = window_embeddings(reference, window, hop, windowed);
  const auto cols = window_embeddings(generated, window, hop, windowed);

  SelfSimMatrix out;
  out.window = window;
  out.hop = hop;
  out.values = Tensor(Shape{rows.size(), cols.size()});
  out.argmax.resize(rows.size());
  std::size_t on_diagonal = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::size_t best = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double v = cosine_sim(rows[r], cols[c]);
      out.values.at(r, c) = v;
      const double current = out.values.at(r, best);
      if (c == 0 || v > current || (v == current && distance(c, r) < distance(best, r))) best = c;
    }
    out.argmax[r] = best;
    on_diagonal += best == r ? 1 : 0;
  }
  out.diagonality = static_cast<double>(on_diagonal) / static_cast<double>(rows.size());
  return out;
}

}  // namespace amg
