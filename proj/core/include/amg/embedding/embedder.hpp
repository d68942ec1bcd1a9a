#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "amg/numerics/tape.hpp"
#include "amg/numerics/tensor.hpp"

namespace amg {

enum class EmbedderKind { kSpectral, kRandomProjection };

std::string to_string(EmbedderKind kind);
EmbedderKind embedder_kind_from_string(const std::string& name);

struct EmbedderConfig {
  EmbedderKind kind = EmbedderKind::kSpectral;
  std::size_t input_length = 256;
  std::size_t frame = 64;
  std::size_t hop = 32;
  std::size_t dim = 16;
  std::uint64_t seed = 1234;
  double eps_mag = 1e-8;

  void validate() const;
};

/// Fixed differentiable descriptor: clip -> unit vector.
///
/// spectral: Hann-windowed frames, DFT as two matrix products, magnitude
/// sqrt(re^2 + im^2 + eps_mag), log1p, a seeded projection with the bin mean
/// removed (so a global gain mostly cancels), mean over frames, normalize.
///
/// random_projection: seeded Gaussian projection of the raw samples, normalize.
class Embedder {
 public:
  explicit Embedder(const EmbedderConfig& config);

  const EmbedderConfig& config() const { return config_; }
  EmbedderKind kind() const { return config_.kind; }
  std::size_t dim() const { return config_.dim; }
  std::size_t input_length() const { return config_.input_length; }

  /// Same descriptor applied to inputs of another length (used for
  /// windowed self-similarity). Spectral projections are unchanged.
  Embedder with_input_length(std::size_t length) const;

  Tensor embed(const Tensor& clip) const;
  Var embed(Tape& tape, const Var& clip) const;

 private:
  EmbedderConfig config_;
  Tensor dft_cos_;     // [frame, bins]
  Tensor dft_sin_;     // [frame, bins]
  Tensor projection_;  // [bins or input_length, dim]
};

/// a.b / (|a||b|), clamped to [-1, 1]. Throws NumericError on a zero vector.
double cosine_sim(const Tensor& a, const Tensor& b);

}  // namespace amg
