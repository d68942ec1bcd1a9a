#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amg/guidance/guidance.hpp"

namespace amg {

struct StepRecord {
  std::size_t t = 0;
  Tensor z_t;
  Tensor eps_before;
  Tensor eps_after;
  double sigma = 0.0;
  double lambda = 0.0;
  bool fired = false;
  double s1 = 0.0;
  double s2 = 0.0;
  double norm_spe = 0.0;
  double norm_dup = 0.0;
  double norm_sim = 0.0;
  RecordId neighbor = 0;
  CaptionId neighbor_caption = 0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct SamplerTrace {
  CaptionId caption = 0;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;  // in sampling order, t = T .. 1
  Tensor final_latent;
  Tensor clip;

  std::size_t fired_steps() const;
  friend bool operator==(const SamplerTrace&, const SamplerTrace&) = default;
};

/// Guided reverse process from z_T ~ N(0, I) seeded by `seed`. Errors from
/// any component are rethrown with the failing step in the message.
SamplerTrace guided_sample(const SamplerContext& ctx, CaptionId caption, const GuidanceConfig& config,
                           std::uint64_t seed);

/// Plain classifier-free DDIM sampling with no similarity monitoring; the
/// reference that guided_sample must reproduce when guidance cannot act.
Tensor cfg_sample(const DenoiserParams& params, const Codec& codec, const NoiseSchedule& sched, CaptionId caption,
                  double s0, std::uint64_t seed);

/// Per-step scalars as CSV (no latent snapshots).
std::string trace_to_csv(const SamplerTrace& trace);

}  // namespace amg
