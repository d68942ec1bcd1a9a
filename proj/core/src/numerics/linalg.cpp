#include "amg/numerics/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amg/error.hpp"

namespace amg {
namespace {

constexpr double kSymmetryTolerance = 1e-8;
constexpr double kNegativeTolerance = 1e-10;

void require_square(const Tensor& m, const char* what) {
  if (m.rank() != 2 || m.rows() != m.cols()) {
    throw ShapeError(std::string(what) + ": expected a square matrix, got " + shape_string(m.shape()));
  }
}

double max_abs(const Tensor& m) {
  double s = 0.0;
  for (double v : m.data()) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

SymmetricEigen jacobi_eigen(const Tensor& symmetric, double tolerance, int max_sweeps) {
  require_square(symmetric, "jacobi_eigen");
  const auto n = symmetric.rows();
  Tensor a = symmetric;
  Tensor v = Tensor::identity(n);

  const double total = norm(a);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a.at(p, q) * a.at(p, q);
    if (std::sqrt(off) <= tolerance * std::max(total, 1e-300)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (apq == 0.0) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a.at(k, p);
          const double akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a.at(p, k);
          const double aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v.at(k, p);
          const double vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * vkq;
          v.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a.at(i, i) > a.at(j, j); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Tensor(Shape{n, n});
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a.at(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors.at(r, k) = v.at(r, order[k]);
  }
  return out;
}

Tensor matrix_sqrt_psd(const Tensor& m) {
  require_square(m, "matrix_sqrt_psd");
  const auto n = m.rows();
  const double scale = std::max(max_abs(m), 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m.at(i, j) - m.at(j, i)) > kSymmetryTolerance * scale) {
        throw DomainError("matrix_sqrt_psd: matrix is not symmetric");
      }
    }
  Tensor sym = m;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sym.at(i, j) = sym.at(j, i) = 0.5 * (m.at(i, j) + m.at(j, i));

  auto eig = jacobi_eigen(sym);
  for (double& lambda : eig.values) {
    if (lambda < -kNegativeTolerance * scale) {
      throw DomainError("matrix_sqrt_psd: matrix is indefinite (eigenvalue " + std::to_string(lambda) + ")");
    }
    lambda = std::sqrt(std::max(lambda, 0.0));
  }
  Tensor out(Shape{n, n});
  for (std::size_t k = 0; k < n; ++k) {
    const double root = eig.values[k];
    if (root == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = root * eig.vectors.at(i, k);
      for (std::size_t j = 0; j < n; ++j) out.at(i, j) += vik * eig.vectors.at(j, k);
    }
  }
  return out;
}

double trace(const Tensor& m) {
  require_square(m, "trace");
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += m.at(i, i);
  return s;
}

Tensor row_mean(const Tensor& points) {
  const auto n = points.rows(), d = points.cols();
  if (n == 0) throw DomainError("row_mean of an empty set");
  Tensor mu(Shape{d});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mu[j] += points.at(i, j);
  for (auto& v : mu.data()) v /= static_cast<double>(n);
  return mu;
}

Tensor covariance(const Tensor& points) {
  const auto n = points.rows(), d = points.cols();
  if (n < 2) throw DomainError("covariance needs at least two points");
  const Tensor mu = row_mean(points);
  Tensor cov(Shape{d, d});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a) {
      const double da = points.at(i, a) - mu[a];
      for (std::size_t b = a; b < d; ++b) cov.at(a, b) += da * (points.at(i, b) - mu[b]);
    }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      cov.at(a, b) /= static_cast<double>(n - 1);
      cov.at(b, a) = cov.at(a, b);
    }
  return cov;
}

}  // namespace amg
