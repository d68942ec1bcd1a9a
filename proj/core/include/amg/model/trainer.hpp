#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "amg/diffusion/process.hpp"
#include "amg/diffusion/schedule.hpp"
#include "amg/model/codec.hpp"
#include "amg/model/denoiser.hpp"

namespace amg {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t batch_size = 32;
  std::size_t steps = 6000;
  double p_uncond = 0.1;
  std::uint64_t seed = 7;

  void validate() const;
};

struct LabeledClip {
  Tensor clip;
  CaptionId caption = 0;
};

struct TrainResult {
  DenoiserParams params;
  std::vector<double> losses;
};

/// Adam on the noise-prediction loss over the encoded clips. Minibatches are
/// drawn with replacement. Throws NumericError naming the step if the loss
/// or any parameter becomes non-finite. The linear skip is fitted to the
/// latent means and (population) variances before the first step.
TrainResult train(std::span<const LabeledClip> corpus, const Codec& codec, const NoiseSchedule& sched,
                  const DenoiserConfig& model, const TrainConfig& config);

/// Continues training from given parameters; used by train().
TrainResult train_from(DenoiserParams params, std::span<const TrainingExample> examples, const NoiseSchedule& sched,
                       const TrainConfig& config);

}  // namespace amg
