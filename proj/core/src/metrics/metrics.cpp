#include "amg/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amg/error.hpp"
#include "amg/numerics/linalg.hpp"

namespace amg {
namespace {

void require_points(const Tensor& t, const char* what) {
  if (t.rank() != 2) throw ShapeError(std::string(what) + ": expected an [n, d] matrix");
}

double squared_distance(const Tensor& a, std::size_t i, const Tensor& b, std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const double d = a.at(i, k) - b.at(j, k);
    s += d * d;
  }
  return s;
}

Tensor symmetrized(const Tensor& m) { return 0.5 * (m + transpose(m)); }

}  // namespace

std::vector<double> neighbor_similarities(std::span<const Tensor> clips, const EmbeddingIndex& index,
                                          const Embedder& embedder) {
  if (clips.empty()) throw DomainError("neighbor_similarities: empty clip set");
  std::vector<double> out;
  out.reserve(clips.size());
  for (const auto& clip : clips) {
    const Tensor e = embedder.embed(clip);
    out.push_back(cosine_sim(e, nearest_neighbor(index, e).embedding));
  }
  return out;
}

double mean_similarity(std::span<const Tensor> clips, const EmbeddingIndex& index, const Embedder& embedder) {
  const auto sims = neighbor_similarities(clips, index, embedder);
  return mean_of(sims);
}

double prompt_adherence(std::span<const Tensor> clips, std::span<const CaptionId> captions,
                        const EmbeddingIndex& index, const Embedder& embedder) {
  if (clips.empty()) throw DomainError("prompt_adherence: empty clip set");
  if (clips.size() != captions.size()) throw ShapeError("prompt_adherence: one caption per clip");
  double total = 0.0;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const Tensor proto = embed_caption(index, captions[i]);
    total += cosine_sim(embedder.embed(clips[i]), proto);
  }
  return total / static_cast<double>(clips.size());
}

double frechet_from_moments(const Tensor& mean_a, const Tensor& cov_a, const Tensor& mean_b, const Tensor& cov_b) {
  require_same_shape(mean_a, mean_b, "frechet: means");
  require_same_shape(cov_a, cov_b, "frechet: covariances");
  if (cov_a.rank() != 2 || cov_a.rows() != cov_a.cols() || cov_a.rows() != mean_a.size()) {
    throw ShapeError("frechet: covariance must be [d, d] matching the mean");
  }
  const Tensor diff = mean_a - mean_b;
  const Tensor root_a = matrix_sqrt_psd(cov_a);
  const Tensor inner = symmetrized(matmul(matmul(root_a, cov_b), root_a));
  const auto eig = jacobi_eigen(inner);
  double cross = 0.0;
  for (double v : eig.values) cross += std::sqrt(std::max(v, 0.0));
  const double d = dot(diff, diff) + trace(cov_a) + trace(cov_b) - 2.0 * cross;
  return std::max(d, 0.0);
}

double frechet_distance(const Tensor& a, const Tensor& b) {
  require_points(a, "frechet_distance");
  require_points(b, "frechet_distance");
  if (a.cols() != b.cols()) throw ShapeError("frechet_distance: dimension mismatch");
  const auto d = a.cols();
  if (a.rows() < d + 1 || b.rows() < d + 1) {
    throw DomainError("frechet_distance: need at least dim + 1 = " + std::to_string(d + 1) + " samples per set");
  }
  constexpr double kRidge = 1e-6;
  const Tensor ridge = kRidge * Tensor::identity(d);
  return frechet_from_moments(row_mean(a), covariance(a) + ridge, row_mean(b), covariance(b) + ridge);
}

double kernel_distance(const Tensor& a, const Tensor& b) {
  require_points(a, "kernel_distance");
  require_points(b, "kernel_distance");
  if (a.cols() != b.cols()) throw ShapeError("kernel_distance: dimension mismatch");
  const std::size_t n = a.rows(), m = b.rows();
  if (n == 0 || m == 0) throw DomainError("kernel_distance: empty set");

  std::vector<double> dists;
  dists.reserve((n + m) * (n + m - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dists.push_back(std::sqrt(squared_distance(a, i, a, j)));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) dists.push_back(std::sqrt(squared_distance(b, i, b, j)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) dists.push_back(std::sqrt(squared_distance(a, i, b, j)));
  const double h = median(dists);
  if (h == 0.0) return 0.0;
  const double inv = 1.0 / (2.0 * h * h);
  auto k = [inv](double d2) { return std::exp(-d2 * inv); };

  auto within = [&](const Tensor& x) {
    const std::size_t r = x.rows();
    if (r == 1) return 1.0;
    double s = 0.0;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = i + 1; j < r; ++j) s += 2.0 * k(squared_distance(x, i, x, j));
    return s / static_cast<double>(r * (r - 1));
  };
  double cross = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) cross += k(squared_distance(a, i, b, j));
  cross /= static_cast<double>(n * m);
  return within(a) + within(b) - 2.0 * cross;
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw DomainError("histogram: empty input");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return histogram(values, bins, *lo, *hi);
}

Histogram histogram(std::span<const double> values, std::size_t bins, double lo, double hi) {
  if (values.empty()) throw DomainError("histogram: empty input");
  if (bins < 1) throw DomainError("histogram: bins must be >= 1");
  if (!(hi >= lo)) throw DomainError("histogram: invalid range");
  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double v : values) {
    std::size_t bin = 0;
    if (width > 0.0) {
      const double pos = (std::clamp(v, lo, hi) - lo) / width;
      bin = std::min(static_cast<std::size_t>(pos), bins - 1);
    }
    ++h.counts[bin];
  }
  h.mean = mean_of(values);
  return h;
}

Projection2d pca_2d(const Tensor& points) {
  require_points(points, "pca_2d");
  const std::size_t n = points.rows(), d = points.cols();
  if (n < 3) throw DomainError("pca_2d: need at least 3 points");
  if (d < 2) throw DomainError("pca_2d: need at least 2 dimensions");
  Projection2d out;
  out.mean = row_mean(points);
  const auto eig = jacobi_eigen(covariance(points));
  const double scale = std::max(std::abs(eig.values.front()), 1e-300);
  if (eig.values[1] <= 1e-12 * scale) throw DomainError("pca_2d: points have rank < 2 after centering");

  out.components = Tensor(Shape{d, 2});
  for (std::size_t c = 0; c < 2; ++c) {
    std::size_t arg = 0;
    for (std::size_t r = 1; r < d; ++r) {
      if (std::abs(eig.vectors.at(r, c)) > std::abs(eig.vectors.at(arg, c))) arg = r;
    }
    const double sign = eig.vectors.at(arg, c) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < d; ++r) out.components.at(r, c) = sign * eig.vectors.at(r, c);
    out.variances.push_back(eig.values[c]);
  }
  out.coords = Tensor(Shape{n, 2});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < 2; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < d; ++r) s += (points.at(i, r) - out.mean[r]) * out.components.at(r, c);
      out.coords.at(i, c) = s;
    }
  }
  return out;
}

SignTest sign_test_less(std::span<const double> first, std::span<const double> second) {
  if (first.size() != second.size()) throw ShapeError("sign_test_less: unpaired inputs");
  if (first.empty()) throw DomainError("sign_test_less: no pairs");
  SignTest t;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i] < second[i]) {
      ++t.wins;
    } else if (first[i] > second[i]) {
      ++t.losses;
    } else {
      ++t.ties;
    }
  }
  const std::size_t n = t.wins + t.losses;
  if (n == 0) return t;
  // P(X >= wins) for X ~ Binomial(n, 1/2).
  double p = 0.0;
  for (std::size_t k = t.wins; k <= n; ++k) {
    const double log_choose = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                              std::lgamma(static_cast<double>(n - k) + 1.0);
    p += std::exp(log_choose - static_cast<double>(n) * std::log(2.0));
  }
  t.p_value = std::min(p, 1.0);
  return t;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median: empty input");
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double mean_of(std::span<const double> values) {
  if (values.empty()) throw DomainError("mean_of: empty input");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace amg
