#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "amg/diffusion/schedule.hpp"
#include "amg/numerics/rng.hpp"
#include "amg/numerics/tape.hpp"
#include "amg/numerics/tensor.hpp"

namespace amg {

using CaptionId = std::uint32_t;
inline constexpr CaptionId kNullCaption = 0xFFFFFFFFu;

struct LatentState {
  Tensor z;
  std::size_t t = 0;
};

/// z_t = sqrt(abar_t) z0 + sqrt(1 - abar_t) eps.
Tensor forward_sample(const Tensor& z0, std::size_t t, const Tensor& eps, const NoiseSchedule& sched);

/// Clean-latent estimate from a noisy latent and a noise prediction.
Tensor predict_z0(const Tensor& z_t, const Tensor& eps_hat, std::size_t t, const NoiseSchedule& sched);
Var predict_z0(const Var& z_t, const Var& eps_hat, std::size_t t, const NoiseSchedule& sched);

/// Deterministic DDIM update from level t to level t - 1.
LatentState ddim_step(const Tensor& z_t, const Tensor& eps_hat, std::size_t t, const NoiseSchedule& sched);

/// Anything that predicts noise for a batch of noisy latents. Parameters are
/// bound to a tape as leaves so the training loss can differentiate them.
class NoisePredictor {
 public:
  virtual ~NoisePredictor() = default;

  virtual std::size_t latent_dim() const = 0;
  /// Caption ids accepted besides kNullCaption.
  virtual std::size_t caption_count() const = 0;

  virtual std::vector<Var> bind_parameters(Tape& tape) const = 0;
  /// z_t is [B, latent_dim]; returns [B, latent_dim].
  virtual Var predict(Tape& tape, std::span<const Var> params, const Var& z_t, std::span<const std::size_t> t,
                      std::span<const CaptionId> captions) const = 0;
};

struct TrainingExample {
  Tensor z0;
  CaptionId caption = kNullCaption;
};

struct TrainingLoss {
  double value = 0.0;
  /// One gradient per bound parameter, in bind order.
  std::vector<Tensor> gradients;
};

/// Mean over the batch of ||eps - eps_theta(z_t, t, y)||^2 with t uniform on
/// [1, T]; each caption is replaced by the null caption with probability
/// p_uncond.
TrainingLoss training_loss(const NoisePredictor& predictor, std::span<const TrainingExample> batch,
                           const NoiseSchedule& sched, RngStream& rng, double p_uncond);

}  // namespace amg
