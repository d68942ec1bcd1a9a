#include "amg/model/denoiser.hpp"

#include <cmath>

#include "amg/error.hpp"

namespace amg {

void DenoiserConfig::validate() const {
  if (latent_dim == 0 || hidden == 0 || condition_dim == 0) throw ConfigError("denoiser dimensions must be positive");
  if (time_features == 0 || time_features % 2 != 0) throw ConfigError("time_features must be a positive even number");
  if (caption_count == 0) throw ConfigError("denoiser needs at least one caption");
  if (steps < 2) throw ConfigError("denoiser steps must be at least 2");
}

DenoiserParams DenoiserParams::zeros(const DenoiserConfig& config) {
  config.validate();
  DenoiserParams p;
  p.config = config;
  p.condition_table = Tensor(Shape{config.caption_count + 1, config.condition_dim});
  p.w1 = Tensor(Shape{config.input_dim(), config.hidden});
  p.b1 = Tensor(Shape{config.hidden});
  p.w2 = Tensor(Shape{config.hidden, config.hidden});
  p.b2 = Tensor(Shape{config.hidden});
  p.w3 = Tensor(Shape{config.hidden, config.latent_dim});
  p.b3 = Tensor(Shape{config.latent_dim});
  p.prior_mean = Tensor(Shape{0});
  p.prior_variance = Tensor(Shape{0});
  p.alpha_bar = Tensor(Shape{0});
  return p;
}

DenoiserParams DenoiserParams::random(const DenoiserConfig& config, RngStream& rng) {
  auto p = zeros(config);
  auto fill = [&](Tensor& t, double stddev) {
    for (auto& v : t.data()) v = stddev * rng.normal();
  };
  fill(p.condition_table, 1.0);
  fill(p.w1, 1.0 / std::sqrt(static_cast<double>(config.input_dim())));
  fill(p.w2, 1.0 / std::sqrt(static_cast<double>(config.hidden)));
  fill(p.w3, 1.0 / std::sqrt(static_cast<double>(config.hidden)));
  return p;
}

std::vector<Tensor*> DenoiserParams::tensors() { return {&condition_table, &w1, &b1, &w2, &b2, &w3, &b3}; }

std::vector<const Tensor*> DenoiserParams::tensors() const {
  return {&condition_table, &w1, &b1, &w2, &b2, &w3, &b3};
}

bool DenoiserParams::all_finite() const {
  for (const auto* t : tensors()) {
    if (!t->all_finite()) return false;
  }
  return prior_mean.all_finite() && prior_variance.all_finite() && alpha_bar.all_finite();
}

void DenoiserParams::set_linear_skip(const Tensor& mean, const Tensor& variance, const NoiseSchedule& sched) {
  if (mean.size() != config.latent_dim || variance.size() != config.latent_dim) {
    throw ShapeError("linear skip: moments have the wrong length");
  }
  if (!mean.all_finite()) throw DomainError("linear skip: mean must be finite");
  if (sched.steps() != config.steps) throw ConfigError("linear skip: schedule and denoiser step counts differ");
  for (double v : variance.data()) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("linear skip: variances must be finite and non-negative");
  }
  prior_mean = mean.reshaped(Shape{config.latent_dim});
  prior_variance = variance.reshaped(Shape{config.latent_dim});
  alpha_bar = Tensor(Shape{config.steps + 1});
  for (std::size_t t = 0; t <= config.steps; ++t) alpha_bar[t] = sched.alpha_bar(t);
}

Tensor DenoiserParams::skip_coefficients(std::span<const std::size_t> t) const {
  const auto dim = config.latent_dim;
  Tensor out(Shape{t.size(), dim});
  if (!has_linear_skip()) return out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const double ab = alpha_bar[t[r]];
    const double s = std::sqrt(1.0 - ab);
    // At t = 0 with a zero-variance component the ratio is 0/0; the noise
    // contributes nothing there, so use 0.
    for (std::size_t k = 0; k < dim; ++k) {
      const double den = ab * prior_variance[k] + 1.0 - ab;
      out.at(r, k) = den > 0.0 ? s / den : 0.0;
    }
  }
  return out;
}

bool operator==(const DenoiserParams& a, const DenoiserParams& b) {
  const auto ta = a.tensors();
  const auto tb = b.tensors();
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (!(*ta[i] == *tb[i])) return false;
  }
  return a.prior_mean == b.prior_mean && a.prior_variance == b.prior_variance && a.alpha_bar == b.alpha_bar;
}

Tensor timestep_features(std::span<const std::size_t> t, std::size_t dim, std::size_t steps) {
  const auto half = dim / 2;
  Tensor out(Shape{t.size(), dim});
  for (std::size_t r = 0; r < t.size(); ++r) {
    // Position in [0, 1000] keeps the usual frequency ladder meaningful.
    const double pos = 1000.0 * static_cast<double>(t[r]) / static_cast<double>(steps);
    for (std::size_t k = 0; k < half; ++k) {
      const double freq = std::exp(-std::log(10000.0) * static_cast<double>(k) / static_cast<double>(half));
      out.at(r, k) = std::sin(pos * freq);
      out.at(r, half + k) = std::cos(pos * freq);
    }
  }
  return out;
}

Tensor DenoiserParams::skip_offsets(std::span<const std::size_t> t) const {
  Tensor out = skip_coefficients(t);
  if (!has_linear_skip()) return out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const double root = std::sqrt(alpha_bar[t[r]]);
    for (std::size_t k = 0; k < config.latent_dim; ++k) out.at(r, k) *= -root * prior_mean[k];
  }
  return out;
}

std::size_t MlpDenoiser::condition_row(CaptionId caption) const {
  if (caption == kNullCaption) return params_->null_row();
  if (caption >= params_->config.caption_count) {
    throw DomainError("unknown caption id " + std::to_string(caption));
  }
  return caption;
}

std::vector<Var> MlpDenoiser::bind_parameters(Tape& tape) const {
  std::vector<Var> out;
  for (const auto* t : params_->tensors()) out.push_back(tape.leaf_ref(*t));
  return out;
}

Var MlpDenoiser::predict(Tape& tape, std::span<const Var> p, const Var& z_t, std::span<const std::size_t> t,
                         std::span<const CaptionId> captions) const {
  const auto& cfg = params_->config;
  const auto& zv = z_t.value();
  if (zv.rank() != 2 || zv.shape()[1] != cfg.latent_dim) {
    throw ShapeError("denoiser input must be [B, " + std::to_string(cfg.latent_dim) + "], got " +
                     shape_string(zv.shape()));
  }
  const auto batch = zv.shape()[0];
  if (t.size() != batch || captions.size() != batch) throw ShapeError("denoiser: batch metadata size mismatch");
  for (auto step : t) {
    if (step > cfg.steps) throw DomainError("denoiser: timestep out of range");
  }
  std::vector<std::size_t> rows(batch);
  for (std::size_t r = 0; r < batch; ++r) rows[r] = condition_row(captions[r]);

  const Var time = tape.constant(timestep_features(t, cfg.time_features, cfg.steps));
  const Var cond = gather_rows(p[0], rows);
  const Var parts[] = {z_t, time, cond};
  const Var x = concat_cols(parts);
  const Var h1 = tanh(add_row(matmul(x, p[1]), p[2]));
  const Var h2 = tanh(add_row(matmul(h1, p[3]), p[4]));
  const Var out = add_row(matmul(h2, p[5]), p[6]);
  if (!params_->has_linear_skip()) return out;
  return out + z_t * tape.constant(params_->skip_coefficients(t)) + tape.constant(params_->skip_offsets(t));
}

Var MlpDenoiser::predict_constant(Tape& tape, const Var& z_t, std::span<const std::size_t> t,
                                  std::span<const CaptionId> captions) const {
  std::vector<Var> consts;
  for (const auto* tensor : params_->tensors()) consts.push_back(tape.constant_ref(*tensor));
  return predict(tape, consts, z_t, t, captions);
}

Tensor denoise_many(const DenoiserParams& params, const Tensor& z_t, std::size_t t,
                    std::span<const CaptionId> captions) {
  const auto dim = params.config.latent_dim;
  if (z_t.size() != dim) throw ShapeError("denoise: latent has " + std::to_string(z_t.size()) + " entries");
  const auto batch = captions.size();
  Tensor zs(Shape{batch, dim});
  for (std::size_t r = 0; r < batch; ++r)
    for (std::size_t c = 0; c < dim; ++c) zs.at(r, c) = z_t[c];
  std::vector<std::size_t> steps(batch, t);
  Tape tape;
  const MlpDenoiser model(params);
  const Var out = model.predict_constant(tape, tape.constant(std::move(zs)), steps, captions);
  return out.value();
}

Tensor denoise(const DenoiserParams& params, const Tensor& z_t, std::size_t t, CaptionId caption) {
  const CaptionId one[] = {caption};
  return denoise_many(params, z_t, t, one).reshaped(Shape{params.config.latent_dim});
}

}  // namespace amg
