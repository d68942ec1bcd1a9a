#include "amg/model/trainer.hpp"

#include <cmath>

#include "amg/error.hpp"

namespace amg {

void TrainConfig::validate() const {
  if (steps < 1) throw ConfigError("train.steps must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("train.learning_rate must be >= 0");
  if (batch_size < 1) throw ConfigError("train.batch_size must be at least 1");
  if (!(p_uncond >= 0.0 && p_uncond <= 1.0)) throw ConfigError("train.p_uncond must lie in [0, 1]");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(adam_epsilon > 0.0)) {
    throw ConfigError("train: invalid Adam moments");
  }
}

TrainResult train_from(DenoiserParams params, std::span<const TrainingExample> examples, const NoiseSchedule& sched,
                       const TrainConfig& config) {
  config.validate();
  if (examples.empty()) throw DomainError("train: empty corpus");

  RngStream rng(config.seed);
  const MlpDenoiser model(params);
  auto tensors = params.tensors();
  std::vector<Tensor> m1, m2;
  for (const auto* t : tensors) {
    m1.emplace_back(t->shape());
    m2.emplace_back(t->shape());
  }

  TrainResult result;
  result.losses.reserve(config.steps);
  std::vector<TrainingExample> batch(config.batch_size);
  double bias1 = 1.0, bias2 = 1.0;
  for (std::size_t step = 0; step < config.steps; ++step) {
    for (auto& ex : batch) ex = examples[rng.uniform_index(examples.size())];
    const auto loss = training_loss(model, batch, sched, rng, config.p_uncond);
    if (!std::isfinite(loss.value)) {
      throw NumericError("training diverged: non-finite loss at step " + std::to_string(step));
    }
    result.losses.push_back(loss.value);

    bias1 *= config.beta1;
    bias2 *= config.beta2;
    const double lr = config.learning_rate * std::sqrt(1.0 - bias2) / (1.0 - bias1);
    for (std::size_t k = 0; k < tensors.size(); ++k) {
      auto w = tensors[k]->data();
      auto a = m1[k].data();
      auto b = m2[k].data();
      const auto g = loss.gradients[k].data();
      for (std::size_t i = 0; i < w.size(); ++i) {
        a[i] = config.beta1 * a[i] + (1.0 - config.beta1) * g[i];
        b[i] = config.beta2 * b[i] + (1.0 - config.beta2) * g[i] * g[i];
        w[i] -= lr * a[i] / (std::sqrt(b[i]) + config.adam_epsilon);
      }
      if (!tensors[k]->all_finite()) {
        throw NumericError("training diverged: non-finite parameter at step " + std::to_string(step));
      }
    }
  }
  result.params = std::move(params);
  return result;
}

TrainResult train(std::span<const LabeledClip> corpus, const Codec& codec, const NoiseSchedule& sched,
                  const DenoiserConfig& model, const TrainConfig& config) {
  config.validate();
  model.validate();
  if (corpus.empty()) throw DomainError("train: empty corpus");
  if (model.latent_dim != codec.latent_dim()) throw ConfigError("train: codec and denoiser latent sizes differ");
  if (model.steps != sched.steps()) throw ConfigError("train: denoiser and schedule step counts differ");

  std::vector<TrainingExample> examples;
  examples.reserve(corpus.size());
  for (const auto& item : corpus) {
    if (item.caption >= model.caption_count) throw DomainError("train: caption id out of range");
    examples.push_back({codec.encode(item.clip), item.caption});
  }
  const double n = static_cast<double>(examples.size());
  Tensor mean(Shape{model.latent_dim});
  Tensor variance(Shape{model.latent_dim});
  for (const auto& ex : examples) {
    for (std::size_t k = 0; k < model.latent_dim; ++k) mean[k] += ex.z0[k] / n;
  }
  for (const auto& ex : examples) {
    for (std::size_t k = 0; k < model.latent_dim; ++k) variance[k] += (ex.z0[k] - mean[k]) * (ex.z0[k] - mean[k]) / n;
  }

  RngStream init(RngStream::derive(config.seed, 1));
  auto params = DenoiserParams::random(model, init);
  params.set_linear_skip(mean, variance, sched);
  return train_from(std::move(params), examples, sched, config);
}

}  // namespace amg
