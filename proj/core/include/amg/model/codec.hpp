#pragma once

#include <cstddef>
#include <span>

#include "amg/numerics/tape.hpp"
#include "amg/numerics/tensor.hpp"

namespace amg {

/// Affine latent codec. encode(x) = E (x - mean), decode(z) = D z + mean.
/// The identity codec skips both maps.
class Codec {
 public:
  static Codec identity(std::size_t signal_dim);
  static Codec linear(Tensor encoder, Tensor decoder, Tensor mean);

  bool is_identity() const { return identity_; }
  std::size_t signal_dim() const { return signal_dim_; }
  std::size_t latent_dim() const { return latent_dim_; }
  const Tensor& encoder() const { return encoder_; }  // [latent, signal]
  const Tensor& decoder() const { return decoder_; }  // [signal, latent]
  const Tensor& mean() const { return mean_; }

  Tensor encode(const Tensor& x) const;
  Tensor decode(const Tensor& z) const;
  Var decode(Tape& tape, const Var& z) const;

  friend bool operator==(const Codec& a, const Codec& b);

 private:
  bool identity_ = true;
  std::size_t signal_dim_ = 0;
  std::size_t latent_dim_ = 0;
  Tensor encoder_;
  Tensor decoder_;
  Tensor mean_;
};

/// Identity codec when latent_dim equals the clip length, otherwise truncated
/// PCA of the clips. Latents are scaled by one global factor so their mean
/// per-component variance over the training clips is 1.
Codec fit_codec(std::span<const Tensor> clips, std::size_t latent_dim);

}  // namespace amg
