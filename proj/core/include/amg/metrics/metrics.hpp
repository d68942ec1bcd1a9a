#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "amg/embedding/index.hpp"

namespace amg {

/// Mean over clips of the cosine similarity between each clip's embedding and
/// its nearest training neighbour.
double mean_similarity(std::span<const Tensor> clips, const EmbeddingIndex& index, const Embedder& embedder);

/// Per-clip nearest-neighbour similarities (the values behind mean_similarity).
std::vector<double> neighbor_similarities(std::span<const Tensor> clips, const EmbeddingIndex& index,
                                          const Embedder& embedder);

/// Mean cosine similarity between clip embeddings and their caption prototypes.
double prompt_adherence(std::span<const Tensor> clips, std::span<const CaptionId> captions,
                        const EmbeddingIndex& index, const Embedder& embedder);

/// ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2}) over the rows of two
/// [n, d] sets, with a 1e-6 ridge on both covariances. The cross term uses the
/// symmetric form (S_a^{1/2} S_b S_a^{1/2})^{1/2}.
double frechet_distance(const Tensor& a, const Tensor& b);

/// Same quantity from given moments, no ridge.
double frechet_from_moments(const Tensor& mean_a, const Tensor& cov_a, const Tensor& mean_b, const Tensor& cov_b);

/// Unbiased MMD^2 with a Gaussian kernel whose bandwidth is the median
/// pairwise distance over both sets. A singleton set contributes its
/// self-similarity (1) as the within-set term.
double kernel_distance(const Tensor& a, const Tensor& b);

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<std::size_t> counts;
  double mean = 0.0;
};

/// Equal-width bins over [min, max] of the values (last bin closed).
Histogram histogram(std::span<const double> values, std::size_t bins);
/// Equal-width bins over a fixed range; values outside are clamped in.
Histogram histogram(std::span<const double> values, std::size_t bins, double lo, double hi);

struct Projection2d {
  Tensor coords;                     // [n, 2]
  std::vector<double> variances;     // top-2 eigenvalues of the covariance
  Tensor components;                 // [d, 2]
  Tensor mean;                       // [d]
};

/// Projection onto the top two principal components. Each component's
/// largest-magnitude loading is made positive.
Projection2d pca_2d(const Tensor& points);

struct SignTest {
  std::size_t wins = 0;    // pairs where the first value is smaller
  std::size_t losses = 0;  // pairs where the first value is larger
  std::size_t ties = 0;
  double p_value = 1.0;    // one-sided, ties dropped
};

/// One-sided paired sign test of "first < second".
SignTest sign_test_less(std::span<const double> first, std::span<const double> second);

double median(std::vector<double> values);
double mean_of(std::span<const double> values);

}  // namespace amg
