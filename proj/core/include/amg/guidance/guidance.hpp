#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "amg/diffusion/schedule.hpp"
#include "amg/embedding/index.hpp"
#include "amg/model/codec.hpp"
#include "amg/model/denoiser.hpp"

namespace amg {

enum class SimGradMode { kFullChain, kKernelOnly };

std::string to_string(SimGradMode mode);
SimGradMode sim_grad_mode_from_string(const std::string& name);

struct GuidanceConfig {
  double s0 = 7.0;
  double c1 = 6.0;
  double c2 = 6.0;
  double c3 = 1000.0;
  double lambda_min = 0.4;
  double lambda_max = 0.5;
  double lambda_exponent = 2.0;
  bool enable_spe = true;
  bool enable_dup = true;
  bool enable_sim = true;
  std::size_t nn_refresh_stride = 1;
  SimGradMode sim_grad_mode = SimGradMode::kFullChain;

  void validate() const;
  bool any_enabled() const { return enable_spe || enable_dup || enable_sim; }
};

/// eps_uncond + s0 * (eps_cond - eps_uncond). Multiplicative on purpose: an
/// additive s0 would shift every component and leave no meaning to the
/// s0 - 1 budget shared by the despecification and deduplication scales.
Tensor cfg_epsilon(const Tensor& eps_uncond, const Tensor& eps_cond, double s0);

/// Threshold at level t: lambda_min + (lambda_max - lambda_min) (1 - t/T)^p.
/// Largest at the clean end, smallest at t = T.
double lambda_at(std::size_t t, std::size_t steps, const GuidanceConfig& config);

/// s1 = max(min(c1 sigma, s0 - 1), 0).
double despec_scale(double sigma, double c1, double s0);
/// g_spe = -s1 (eps_cond - eps_uncond).
Tensor despec_guidance(const Tensor& eps_cond, const Tensor& eps_uncond, double s1);

/// s2 = max(min(c2 sigma, s0 - s1 - 1), 0); s1 must lie in [0, s0 - 1].
double dedup_scale(double sigma, double c2, double s0, double s1);
/// g_dup = -s2 (eps_nu - eps_uncond), eps_nu conditioned on the neighbour's caption.
Tensor dedup_guidance(const Tensor& eps_nu, const Tensor& eps_uncond, double s2);

/// Everything the sampler reads but never mutates.
struct SamplerContext {
  const DenoiserParams* params = nullptr;
  const Codec* codec = nullptr;
  const Embedder* embedder = nullptr;
  const EmbeddingIndex* index = nullptr;
  const NoiseSchedule* schedule = nullptr;
};

struct DissimilarityResult {
  Tensor g_sim;
  double sigma = 0.0;
  NeighborHit neighbor;
};

/// Similarity of the decoded clean-latent prediction to the neighbour nu and
/// g_sim = c3 sqrt(1 - abar_t) d(sigma)/d(z_t). With kFullChain the gradient
/// runs through the classifier-free noise prediction eps(z_t); kKernelOnly
/// holds eps_hat fixed. nu is searched unless `frozen` is given; it is held
/// constant inside the gradient either way.
DissimilarityResult dissim_guidance(const SamplerContext& ctx, const Tensor& z_t, std::size_t t,
                                    const Tensor& eps_hat, CaptionId caption, const GuidanceConfig& config,
                                    const NeighborHit* frozen = nullptr);

/// sigma_t(z_t) as a plain function, for finite-difference checks.
double similarity_at(const SamplerContext& ctx, const Tensor& z_t, std::size_t t, const Tensor& eps_hat,
                     CaptionId caption, const GuidanceConfig& config, const Tensor& neighbor_embedding);

/// eps_hat + 1{sigma > lambda} (g_spe + g_dup + g_sim). Pass zero vectors for
/// disabled strategies. When the indicator is off the input is returned
/// unchanged.
Tensor amg_step(const Tensor& eps_hat, double sigma, double lambda, const Tensor& g_spe, const Tensor& g_dup,
                const Tensor& g_sim);

}  // namespace amg
