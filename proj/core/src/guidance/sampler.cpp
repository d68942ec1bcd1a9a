#include "amg/guidance/sampler.hpp"

#include <cstdio>
#include <sstream>

#include "amg/diffusion/process.hpp"
#include "amg/error.hpp"
#include "amg/numerics/rng.hpp"

namespace amg {

std::size_t SamplerTrace::fired_steps() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.fired ? 1 : 0;
  return n;
}

namespace {

template <typename E>
[[noreturn]] void rethrow_at(const E& e, std::size_t t) {
  throw E(std::string(e.what()) + " (sampling step t=" + std::to_string(t) + ")");
}

}  // namespace

SamplerTrace guided_sample(const SamplerContext& ctx, CaptionId caption, const GuidanceConfig& config,
                           std::uint64_t seed) {
  config.validate();
  if (!ctx.params || !ctx.codec || !ctx.embedder || !ctx.index || !ctx.schedule) {
    throw DomainError("guided_sample: incomplete context");
  }
  const auto& sched = *ctx.schedule;
  const auto steps = sched.steps();
  const auto dim = ctx.params->config.latent_dim;
  if (caption == kNullCaption || caption >= ctx.params->config.caption_count) {
    throw DomainError("guided_sample: unknown caption id " + std::to_string(caption));
  }

  RngStream rng(seed);
  SamplerTrace trace;
  trace.caption = caption;
  trace.seed = seed;
  trace.steps.reserve(steps);
  Tensor z = gaussian_sample(Shape{dim}, rng);

  std::optional<NeighborHit> neighbor;
  double sigma = 0.0;
  const Tensor zero(Shape{dim});

  for (std::size_t t = steps; t >= 1; --t) {
    try {
      StepRecord rec;
      rec.t = t;
      rec.z_t = z;

      const CaptionId pair[] = {kNullCaption, caption};
      const Tensor both = denoise_many(*ctx.params, z, t, pair);
      const Tensor eps_u = both.row(0);
      const Tensor eps_c = both.row(1);
      const Tensor eps_hat = cfg_epsilon(eps_u, eps_c, config.s0);
      rec.eps_before = eps_hat;

      if ((steps - t) % config.nn_refresh_stride == 0 || !neighbor) {
        const Tensor clip = ctx.codec->decode(predict_z0(z, eps_hat, t, sched));
        const Tensor e = ctx.embedder->embed(clip);
        neighbor = nearest_neighbor(*ctx.index, e);
        sigma = neighbor->similarity;
      }
      rec.sigma = sigma;
      rec.neighbor = neighbor->record_id;
      rec.neighbor_caption = neighbor->caption;
      rec.lambda = lambda_at(t, steps, config);
      rec.fired = sigma > rec.lambda;

      Tensor eps_after = eps_hat;
      if (rec.fired && config.any_enabled()) {
        Tensor g_spe = zero, g_dup = zero, g_sim = zero;
        if (config.enable_spe) {
          rec.s1 = despec_scale(sigma, config.c1, config.s0);
          g_spe = despec_guidance(eps_c, eps_u, rec.s1);
        }
        if (config.enable_dup) {
          rec.s2 = dedup_scale(sigma, config.c2, config.s0, rec.s1);
          if (rec.s2 > 0.0) {
            const Tensor eps_nu = neighbor->caption == caption ? eps_c : denoise(*ctx.params, z, t, neighbor->caption);
            g_dup = dedup_guidance(eps_nu, eps_u, rec.s2);
          }
        }
        if (config.enable_sim && config.c3 > 0.0) {
          g_sim = dissim_guidance(ctx, z, t, eps_hat, caption, config, &*neighbor).g_sim;
        }
        rec.norm_spe = norm(g_spe);
        rec.norm_dup = norm(g_dup);
        rec.norm_sim = norm(g_sim);
        eps_after = amg_step(eps_hat, sigma, rec.lambda, g_spe, g_dup, g_sim);
      }
      rec.eps_after = eps_after;

      z = ddim_step(z, eps_after, t, sched).z;
      if (!z.all_finite()) throw NumericError("latent became non-finite");
      trace.steps.push_back(std::move(rec));
    } catch (const NumericError& e) {
      rethrow_at(e, t);
    } catch (const DomainError& e) {
      rethrow_at(e, t);
    } catch (const ShapeError& e) {
      rethrow_at(e, t);
    }
  }
  trace.final_latent = z;
  trace.clip = ctx.codec->decode(z);
  return trace;
}

Tensor cfg_sample(const DenoiserParams& params, const Codec& codec, const NoiseSchedule& sched, CaptionId caption,
                  double s0, std::uint64_t seed) {
  RngStream rng(seed);
  Tensor z = gaussian_sample(Shape{params.config.latent_dim}, rng);
  for (std::size_t t = sched.steps(); t >= 1; --t) {
    const Tensor eps_u = denoise(params, z, t, kNullCaption);
    const Tensor eps_c = denoise(params, z, t, caption);
    z = ddim_step(z, cfg_epsilon(eps_u, eps_c, s0), t, sched).z;
  }
  return codec.decode(z);
}

std::string trace_to_csv(const SamplerTrace& trace) {
  std::ostringstream os;
  os << "t,sigma,lambda,fired,s1,s2,norm_spe,norm_dup,norm_sim,neighbor,neighbor_caption,eps_before_norm,"
        "eps_after_norm\n";
  char buf[512];
  for (const auto& s : trace.steps) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%llu,%u,%.17g,%.17g\n", s.t,
                  s.sigma, s.lambda, s.fired ? 1 : 0, s.s1, s.s2, s.norm_spe, s.norm_dup, s.norm_sim,
                  static_cast<unsigned long long>(s.neighbor), s.neighbor_caption, norm(s.eps_before),
                  norm(s.eps_after));
    os << buf;
  }
  return os.str();
}

}  // namespace amg
