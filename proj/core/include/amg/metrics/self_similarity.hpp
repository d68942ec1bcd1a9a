#pragma once

#include <cstddef>
#include <vector>

#include "amg/embedding/embedder.hpp"

namespace amg {

struct SelfSimMatrix {
  std::size_t window = 0;
  std::size_t hop = 0;
  Tensor values;                     // [reference windows, generated windows]
  std::vector<std::size_t> argmax;   // per row; ties resolve toward the diagonal
  double diagonality = 0.0;          // fraction of rows whose argmax is the row index
};

/// Cosine similarity between windowed embeddings of a reference clip (rows)
/// and a generated clip (columns).
SelfSimMatrix self_similarity(const Tensor& reference, const Tensor& generated, std::size_t window, std::size_t hop,
                              const Embedder& embedder);

}  // namespace amg
