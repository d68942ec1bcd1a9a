#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "amg/diffusion/process.hpp"
#include "amg/diffusion/schedule.hpp"
#include "amg/numerics/rng.hpp"
#include "amg/numerics/tape.hpp"

namespace amg {

struct DenoiserConfig {
  std::size_t latent_dim = 64;
  std::size_t hidden = 256;
  std::size_t time_features = 16;
  std::size_t condition_dim = 32;
  std::size_t caption_count = 8;
  /// Number of diffusion levels; scales the sinusoidal timestep features.
  std::size_t steps = 100;

  std::size_t input_dim() const { return latent_dim + time_features + condition_dim; }
  void validate() const;
};

/// Weights of a two-hidden-layer tanh MLP predicting noise from
/// z_t ++ timestep features ++ condition embedding. Row `caption_count` of
/// the condition table is the null (unconditional) caption.
///
/// The output also carries a fixed linear term, the noise posterior mean under
/// a Gaussian prior N(m_k, v_k) on each latent component:
///   eps += (z_t - sqrt(ab_t) m_k) * sqrt(1 - ab_t) / (ab_t v_k + 1 - ab_t)
/// Without it the MLP must realise gains near 1/sqrt(1 - ab_t) on
/// low-variance components, which it fits poorly at small t. Empty tensors
/// switch the term off. These are not trained.
struct DenoiserParams {
  DenoiserConfig config;
  Tensor condition_table;  // [caption_count + 1, condition_dim]
  Tensor w1, b1;           // [input, hidden], [hidden]
  Tensor w2, b2;           // [hidden, hidden], [hidden]
  Tensor w3, b3;           // [hidden, latent], [latent]
  Tensor prior_mean;       // [latent] or empty
  Tensor prior_variance;   // [latent] or empty
  Tensor alpha_bar;        // [steps + 1], index t, or empty

  static DenoiserParams zeros(const DenoiserConfig& config);
  static DenoiserParams random(const DenoiserConfig& config, RngStream& rng);

  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  std::size_t null_row() const { return config.caption_count; }
  bool all_finite() const;
  bool has_linear_skip() const { return prior_variance.size() != 0; }
  /// Sets the skip term's prior moments for use under `sched`.
  void set_linear_skip(const Tensor& mean, const Tensor& variance, const NoiseSchedule& sched);
  /// [B, latent] gains on z_t for each timestep.
  Tensor skip_coefficients(std::span<const std::size_t> t) const;
  /// [B, latent] constant part, -sqrt(ab_t) m_k times the gain.
  Tensor skip_offsets(std::span<const std::size_t> t) const;

  friend bool operator==(const DenoiserParams& a, const DenoiserParams& b);
};

/// Sinusoidal features for each timestep, [B, dim].
Tensor timestep_features(std::span<const std::size_t> t, std::size_t dim, std::size_t steps);

class MlpDenoiser final : public NoisePredictor {
 public:
  explicit MlpDenoiser(const DenoiserParams& params) : params_(&params) {}

  std::size_t latent_dim() const override { return params_->config.latent_dim; }
  std::size_t caption_count() const override { return params_->config.caption_count; }
  std::vector<Var> bind_parameters(Tape& tape) const override;
  Var predict(Tape& tape, std::span<const Var> params, const Var& z_t, std::span<const std::size_t> t,
              std::span<const CaptionId> captions) const override;

  /// Forward pass with the weights recorded as constants; z_t may be a tape
  /// leaf so gradients reach it. z_t is [B, D].
  Var predict_constant(Tape& tape, const Var& z_t, std::span<const std::size_t> t,
                       std::span<const CaptionId> captions) const;

  const DenoiserParams& params() const { return *params_; }

 private:
  std::size_t condition_row(CaptionId caption) const;

  const DenoiserParams* params_;
};

/// eps_theta(z_t, t, caption) for one latent vector.
Tensor denoise(const DenoiserParams& params, const Tensor& z_t, std::size_t t, CaptionId caption);

/// One row per caption, all at the same z_t and t. Each row is bit-identical
/// to the corresponding single denoise() call.
Tensor denoise_many(const DenoiserParams& params, const Tensor& z_t, std::size_t t,
                    std::span<const CaptionId> captions);

}  // namespace amg
