#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "amg/numerics/tensor.hpp"

namespace amg {

struct KMeansResult {
  std::vector<std::size_t> assignments;
  Tensor centroids;                    // [k, d]
  std::vector<double> inertia_history;  // after each assignment pass
  std::size_t iterations = 0;
  double inertia() const { return inertia_history.empty() ? 0.0 : inertia_history.back(); }
};

/// Lloyd iterations from k-means++ seeding over the rows of `points`.
/// Stops when assignments repeat or after `max_iterations`. Ties in
/// assignment go to the lowest centroid index; an emptied cluster keeps its
/// previous centroid.
KMeansResult kmeans(const Tensor& points, std::size_t k, std::uint64_t seed, std::size_t max_iterations = 100);

}  // namespace amg
