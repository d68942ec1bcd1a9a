#include "amg/datasets/kmeans.hpp"

#include <limits>

#include "amg/error.hpp"
#include "amg/numerics/rng.hpp"

namespace amg {
namespace {

double sq_dist(const Tensor& a, std::size_t i, const Tensor& b, std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const double d = a.at(i, k) - b.at(j, k);
    s += d * d;
  }
  return s;
}

std::vector<std::size_t> plus_plus_seeds(const Tensor& x, std::size_t k, RngStream& rng) {
  const auto n = x.rows();
  std::vector<std::size_t> chosen{static_cast<std::size_t>(rng.uniform_index(n))};
  std::vector<bool> taken(n, false);
  taken[chosen[0]] = true;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(x, i, x, chosen[0]);
  while (chosen.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += taken[i] ? 0.0 : d2[i];
    std::size_t pick = n;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i] || d2[i] == 0.0) continue;
        pick = i;
        target -= d2[i];
        if (target < 0.0) break;
      }
    } else {
      // Remaining points coincide with centers already chosen.
      for (std::size_t i = 0; i < n && pick == n; ++i) {
        if (!taken[i]) pick = i;
      }
    }
    taken[pick] = true;
    chosen.push_back(pick);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(x, i, x, pick));
  }
  return chosen;
}

}  // namespace

KMeansResult kmeans(const Tensor& points, std::size_t k, std::uint64_t seed, std::size_t max_iterations) {
  if (points.rank() != 2) throw ShapeError("kmeans: expected an [n, d] matrix");
  if (k < 1) throw DomainError("kmeans: k must be >= 1");
  const auto n = points.rows(), d = points.cols();
  if (k > n) throw DomainError("kmeans: k exceeds the number of points");
  if (max_iterations < 1) throw DomainError("kmeans: max_iterations must be >= 1");

  RngStream rng(seed);
  KMeansResult out;
  out.centroids = Tensor(Shape{k, d});
  const auto seeds = plus_plus_seeds(points, k, rng);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < d; ++j) out.centroids.at(c, j) = points.at(seeds[c], j);

  out.assignments.assign(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = sq_dist(points, i, out.centroids, 0);
      for (std::size_t c = 1; c < k; ++c) {
        const double dc = sq_dist(points, i, out.centroids, c);
        if (dc < best_d) {
          best = c;
          best_d = dc;
        }
      }
      changed |= out.assignments[i] != best;
      out.assignments[i] = best;
      inertia += best_d;
    }
    out.inertia_history.push_back(inertia);
    out.iterations = iter + 1;
    if (!changed) break;

    Tensor sums(Shape{k, d});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[out.assignments[i]];
      for (std::size_t j = 0; j < d; ++j) sums.at(out.assignments[i], j) += points.at(i, j);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < d; ++j) out.centroids.at(c, j) = sums.at(c, j) / static_cast<double>(counts[c]);
    }
  }
  return out;
}

}  // namespace amg
