#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "amg/diffusion/schedule.hpp"
#include "amg/model/codec.hpp"
#include "amg/model/denoiser.hpp"

namespace amg {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  DenoiserParams params;
  Codec codec;
  NoiseSchedule schedule;
};

std::vector<std::uint8_t> encode_checkpoint(const DenoiserParams& params, const Codec& codec,
                                            const NoiseSchedule& sched);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& file);

void save_checkpoint(const DenoiserParams& params, const Codec& codec, const NoiseSchedule& sched,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace amg
