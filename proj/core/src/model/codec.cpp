#include "amg/model/codec.hpp"

#include <cmath>

#include "amg/error.hpp"
#include "amg/numerics/linalg.hpp"

namespace amg {

Codec Codec::identity(std::size_t signal_dim) {
  Codec c;
  c.identity_ = true;
  c.signal_dim_ = signal_dim;
  c.latent_dim_ = signal_dim;
  return c;
}

Codec Codec::linear(Tensor encoder, Tensor decoder, Tensor mean) {
  if (encoder.rank() != 2 || decoder.rank() != 2 || encoder.rows() != decoder.cols() ||
      encoder.cols() != decoder.rows() || mean.size() != encoder.cols()) {
    throw ShapeError("codec: inconsistent encoder/decoder/mean shapes");
  }
  Codec c;
  c.identity_ = false;
  c.latent_dim_ = encoder.rows();
  c.signal_dim_ = encoder.cols();
  c.encoder_ = std::move(encoder);
  c.decoder_ = std::move(decoder);
  c.mean_ = mean.reshaped(Shape{c.signal_dim_});
  return c;
}

Tensor Codec::encode(const Tensor& x) const {
  if (x.size() != signal_dim_) throw ShapeError("encode: clip length " + std::to_string(x.size()));
  if (identity_) return x.reshaped(Shape{signal_dim_});
  const Tensor centered = x.reshaped(Shape{signal_dim_}) - mean_;
  return matmul(encoder_, centered.reshaped(Shape{signal_dim_, 1})).reshaped(Shape{latent_dim_});
}

Tensor Codec::decode(const Tensor& z) const {
  if (z.size() != latent_dim_) throw ShapeError("decode: latent length " + std::to_string(z.size()));
  if (identity_) return z.reshaped(Shape{signal_dim_});
  return matmul(decoder_, z.reshaped(Shape{latent_dim_, 1})).reshaped(Shape{signal_dim_}) + mean_;
}

Var Codec::decode(Tape& tape, const Var& z) const {
  if (z.value().size() != latent_dim_) throw ShapeError("decode: latent length mismatch");
  const Var flat = z.value().rank() == 1 ? z : reshape(z, Shape{latent_dim_});
  if (identity_) return flat;
  return add(matmul(tape.constant_ref(decoder_), flat), tape.constant_ref(mean_));
}

bool operator==(const Codec& a, const Codec& b) {
  return a.identity_ == b.identity_ && a.signal_dim_ == b.signal_dim_ && a.latent_dim_ == b.latent_dim_ &&
         (a.identity_ || (a.encoder_ == b.encoder_ && a.decoder_ == b.decoder_ && a.mean_ == b.mean_));
}

Codec fit_codec(std::span<const Tensor> clips, std::size_t latent_dim) {
  if (clips.empty()) throw DomainError("fit_codec: no clips");
  const auto n = clips.front().size();
  if (latent_dim == 0) throw DomainError("fit_codec: latent_dim must be positive");
  if (latent_dim > n) {
    throw DomainError("fit_codec: latent_dim " + std::to_string(latent_dim) + " exceeds clip length " +
                      std::to_string(n));
  }
  if (latent_dim == n) return Codec::identity(n);

  const Tensor data = stack_rows(clips);
  const auto m = data.rows();
  const Tensor mu = row_mean(data);
  Tensor centered = data;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) centered.at(i, j) -= mu[j];

  // Principal directions from the m x m Gram matrix: covariance eigenvectors
  // are X^T u / sqrt(lambda).
  const Tensor gram = matmul(centered, transpose(centered));
  const auto eig = jacobi_eigen(gram);
  const double floor = 1e-12 * std::max(eig.values.front(), 1e-300);

  std::vector<Tensor> basis;
  std::vector<double> variances;
  for (std::size_t k = 0; k < m && basis.size() < latent_dim; ++k) {
    if (eig.values[k] <= floor) break;
    Tensor dir(Shape{n});
    for (std::size_t i = 0; i < m; ++i) {
      const double u = eig.vectors.at(i, k);
      for (std::size_t j = 0; j < n; ++j) dir[j] += u * centered.at(i, j);
    }
    // Re-orthogonalize against earlier directions to clean up rounding.
    for (const auto& b : basis) {
      const double proj = dot(dir, b);
      for (std::size_t j = 0; j < n; ++j) dir[j] -= proj * b[j];
    }
    basis.push_back(normalized(dir));
    variances.push_back(eig.values[k] / static_cast<double>(std::max<std::size_t>(m - 1, 1)));
  }
  // Complete the basis with standard directions when the data rank is short.
  for (std::size_t e = 0; e < n && basis.size() < latent_dim; ++e) {
    Tensor dir(Shape{n});
    dir[e] = 1.0;
    for (const auto& b : basis) {
      const double proj = dot(dir, b);
      for (std::size_t j = 0; j < n; ++j) dir[j] -= proj * b[j];
    }
    if (norm(dir) < 1e-6) continue;
    basis.push_back(normalized(dir));
    variances.push_back(0.0);
  }

  double total = 0.0;
  for (double v : variances) total += v;
  const double scale = total > 0.0 ? std::sqrt(static_cast<double>(latent_dim) / total) : 1.0;

  Tensor encoder(Shape{latent_dim, n});
  Tensor decoder(Shape{n, latent_dim});
  for (std::size_t k = 0; k < latent_dim; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      encoder.at(k, j) = scale * basis[k][j];
      decoder.at(j, k) = basis[k][j] / scale;
    }
  return Codec::linear(std::move(encoder), std::move(decoder), mu);
}

}  // namespace amg
