#include "amg/guidance/guidance.hpp"

#include <algorithm>
#include <cmath>

#include "amg/diffusion/process.hpp"
#include "amg/error.hpp"

namespace amg {

std::string to_string(SimGradMode mode) { return mode == SimGradMode::kFullChain ? "full_chain" : "kernel_only"; }

SimGradMode sim_grad_mode_from_string(const std::string& name) {
  if (name == "full_chain") return SimGradMode::kFullChain;
  if (name == "kernel_only") return SimGradMode::kKernelOnly;
  throw ConfigError("unknown sim_grad_mode '" + name + "'");
}

void GuidanceConfig::validate() const {
  if (!(s0 >= 1.0)) throw ConfigError("guidance.s0 must be >= 1");
  if (!(c1 >= 0.0) || !(c2 >= 0.0) || !(c3 >= 0.0)) throw ConfigError("guidance coefficients must be >= 0");
  if (!(lambda_min >= 0.0 && lambda_min <= lambda_max && lambda_max <= 1.0)) {
    throw ConfigError("guidance needs 0 <= lambda_min <= lambda_max <= 1");
  }
  if (!(lambda_exponent > 0.0)) throw ConfigError("guidance.lambda_exponent must be positive");
  if (nn_refresh_stride < 1) throw ConfigError("guidance.nn_refresh_stride must be >= 1");
}

Tensor cfg_epsilon(const Tensor& eps_uncond, const Tensor& eps_cond, double s0) {
  require_same_shape(eps_uncond, eps_cond, "cfg_epsilon");
  Tensor out(eps_uncond.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = eps_uncond[i] + s0 * (eps_cond[i] - eps_uncond[i]);
  return out;
}

double lambda_at(std::size_t t, std::size_t steps, const GuidanceConfig& config) {
  if (steps == 0 || t > steps) throw DomainError("lambda_at: timestep out of range");
  const double remaining = 1.0 - static_cast<double>(t) / static_cast<double>(steps);
  return config.lambda_min + (config.lambda_max - config.lambda_min) * std::pow(remaining, config.lambda_exponent);
}

double despec_scale(double sigma, double c1, double s0) { return std::max(std::min(c1 * sigma, s0 - 1.0), 0.0); }

Tensor despec_guidance(const Tensor& eps_cond, const Tensor& eps_uncond, double s1) {
  require_same_shape(eps_cond, eps_uncond, "despec_guidance");
  Tensor out(eps_cond.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -s1 * (eps_cond[i] - eps_uncond[i]);
  return out;
}

double dedup_scale(double sigma, double c2, double s0, double s1) {
  if (!(s1 >= 0.0 && s1 <= s0 - 1.0)) throw DomainError("dedup_scale: s1 outside [0, s0 - 1]");
  return std::max(std::min(c2 * sigma, s0 - s1 - 1.0), 0.0);
}

Tensor dedup_guidance(const Tensor& eps_nu, const Tensor& eps_uncond, double s2) {
  require_same_shape(eps_nu, eps_uncond, "dedup_guidance");
  Tensor out(eps_nu.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -s2 * (eps_nu[i] - eps_uncond[i]);
  return out;
}

namespace {

void require_context(const SamplerContext& ctx) {
  if (!ctx.params || !ctx.codec || !ctx.embedder || !ctx.index || !ctx.schedule) {
    throw DomainError("sampler context is incomplete");
  }
}

// sigma_t as a tape expression of a z_t leaf.
struct SimilarityChain {
  Var z;
  Var embedding;
};

SimilarityChain build_chain(Tape& tape, const SamplerContext& ctx, const Tensor& z_t, std::size_t t,
                            const Tensor& eps_hat, CaptionId caption, const GuidanceConfig& config) {
  const auto dim = ctx.params->config.latent_dim;
  const Var z = tape.leaf(z_t.reshaped(Shape{dim}));
  Var eps;
  if (config.sim_grad_mode == SimGradMode::kFullChain) {
    const MlpDenoiser model(*ctx.params);
    const Var row = reshape(z, Shape{1, dim});
    const std::size_t steps[] = {t};
    const CaptionId null_caption[] = {kNullCaption};
    const CaptionId cond_caption[] = {caption};
    const Var eps_u = reshape(model.predict_constant(tape, row, steps, null_caption), Shape{dim});
    const Var eps_c = reshape(model.predict_constant(tape, row, steps, cond_caption), Shape{dim});
    eps = add(eps_u, scale(sub(eps_c, eps_u), config.s0));
  } else {
    eps = tape.constant(eps_hat.reshaped(Shape{dim}));
  }
  const Var z0 = predict_z0(z, eps, t, *ctx.schedule);
  const Var clip = ctx.codec->decode(tape, z0);
  return {z, ctx.embedder->embed(tape, clip)};
}

}  // namespace

DissimilarityResult dissim_guidance(const SamplerContext& ctx, const Tensor& z_t, std::size_t t,
                                    const Tensor& eps_hat, CaptionId caption, const GuidanceConfig& config,
                                    const NeighborHit* frozen) {
  require_context(ctx);
  const double abar = ctx.schedule->alpha_bar(t);
  if (!(abar > 0.0)) throw NumericError("dissim_guidance: alpha_bar is zero at t=" + std::to_string(t));

  Tape tape;
  const auto chain = build_chain(tape, ctx, z_t, t, eps_hat, caption, config);
  DissimilarityResult out;
  out.neighbor = frozen ? *frozen : nearest_neighbor(*ctx.index, chain.embedding.value());
  const Var sigma = cosine_similarity(chain.embedding, tape.constant(out.neighbor.embedding));
  out.sigma = sigma.value().item();
  const auto grads = tape.backward(sigma);
  out.g_sim = (config.c3 * std::sqrt(1.0 - abar)) * grads.of(chain.z);
  if (!out.g_sim.all_finite()) {
    throw NumericError("dissim_guidance: non-finite gradient at t=" + std::to_string(t));
  }
  return out;
}

double similarity_at(const SamplerContext& ctx, const Tensor& z_t, std::size_t t, const Tensor& eps_hat,
                     CaptionId caption, const GuidanceConfig& config, const Tensor& neighbor_embedding) {
  require_context(ctx);
  Tape tape;
  const auto chain = build_chain(tape, ctx, z_t, t, eps_hat, caption, config);
  return cosine_sim(chain.embedding.value(), neighbor_embedding);
}

Tensor amg_step(const Tensor& eps_hat, double sigma, double lambda, const Tensor& g_spe, const Tensor& g_dup,
                const Tensor& g_sim) {
  require_same_shape(eps_hat, g_spe, "amg_step");
  require_same_shape(eps_hat, g_dup, "amg_step");
  require_same_shape(eps_hat, g_sim, "amg_step");
  if (!(sigma > lambda)) return eps_hat;
  Tensor out(eps_hat.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = eps_hat[i] + (g_spe[i] + g_dup[i] + g_sim[i]);
  return out;
}

}  // namespace amg
