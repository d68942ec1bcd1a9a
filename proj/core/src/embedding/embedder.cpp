#include "amg/embedding/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "amg/error.hpp"
#include "amg/numerics/rng.hpp"

namespace amg {

std::string to_string(EmbedderKind kind) {
  return kind == EmbedderKind::kSpectral ? "spectral" : "random_projection";
}

EmbedderKind embedder_kind_from_string(const std::string& name) {
  if (name == "spectral") return EmbedderKind::kSpectral;
  if (name == "random_projection") return EmbedderKind::kRandomProjection;
  throw ConfigError("unknown embedder kind '" + name + "'");
}

void EmbedderConfig::validate() const {
  if (dim == 0) throw ConfigError("embedder dim must be positive");
  if (input_length == 0) throw ConfigError("embedder input_length must be positive");
  if (kind == EmbedderKind::kSpectral) {
    if (frame < 2 || hop == 0) throw ConfigError("spectral embedder needs frame >= 2 and hop >= 1");
    if (frame > input_length) throw ConfigError("spectral frame longer than the input");
  }
  if (!(eps_mag > 0.0)) throw ConfigError("eps_mag must be positive");
}

Embedder::Embedder(const EmbedderConfig& config) : config_(config) {
  config_.validate();
  if (config_.kind == EmbedderKind::kSpectral) {
    const auto w = config_.frame;
    const auto bins = w / 2 + 1;
    dft_cos_ = Tensor(Shape{w, bins});
    dft_sin_ = Tensor(Shape{w, bins});
    for (std::size_t n = 0; n < w; ++n) {
      const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(w));
      for (std::size_t k = 0; k < bins; ++k) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(n * k % w) / static_cast<double>(w);
        dft_cos_.at(n, k) = hann * std::cos(phase);
        dft_sin_.at(n, k) = -hann * std::sin(phase);
      }
    }
    RngStream rng(config_.seed);
    projection_ = Tensor(Shape{bins, config_.dim});
    const double s = 1.0 / std::sqrt(static_cast<double>(bins));
    for (auto& v : projection_.data()) v = s * rng.normal();
    for (std::size_t d = 0; d < config_.dim; ++d) {
      double mean = 0.0;
      for (std::size_t k = 0; k < bins; ++k) mean += projection_.at(k, d);
      mean /= static_cast<double>(bins);
      for (std::size_t k = 0; k < bins; ++k) projection_.at(k, d) -= mean;
    }
  } else {
    RngStream rng(RngStream::derive(config_.seed, config_.input_length));
    projection_ = Tensor(Shape{config_.input_length, config_.dim});
    const double s = 1.0 / std::sqrt(static_cast<double>(config_.input_length));
    for (auto& v : projection_.data()) v = s * rng.normal();
  }
}

Embedder Embedder::with_input_length(std::size_t length) const {
  auto cfg = config_;
  cfg.input_length = length;
  return Embedder(cfg);
}

Var Embedder::embed(Tape& tape, const Var& clip) const {
  const auto& x = clip.value();
  if (x.size() != config_.input_length) {
    throw ShapeError("embed: clip has " + std::to_string(x.size()) + " samples, embedder expects " +
                     std::to_string(config_.input_length));
  }
  bool silent = true;
  for (double v : x.data()) silent = silent && v == 0.0;
  if (silent) throw DomainError("embed: all-zero clip has no direction");

  const Var flat = x.rank() == 1 ? clip : reshape(clip, Shape{config_.input_length});
  if (config_.kind == EmbedderKind::kRandomProjection) {
    return normalize(matmul(flat, tape.constant_ref(projection_)));
  }
  const Var frames = frame(flat, config_.frame, config_.hop);
  const Var re = matmul(frames, tape.constant_ref(dft_cos_));
  const Var im = matmul(frames, tape.constant_ref(dft_sin_));
  const Var power = add_scalar(add(mul(re, re), mul(im, im)), config_.eps_mag);
  const Var level = log1p(sqrt(power));
  const Var pooled = mean_rows(matmul(level, tape.constant_ref(projection_)));
  return normalize(pooled);
}

Tensor Embedder::embed(const Tensor& clip) const {
  Tape tape;
  return embed(tape, tape.constant_ref(clip)).value();
}

double cosine_sim(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size()) throw ShapeError("cosine_sim: length mismatch");
  const double aa = dot(a, a);
  const double bb = dot(b, b);
  if (aa == 0.0 || bb == 0.0) throw NumericError("cosine_sim: zero vector");
  // sqrt(x * x) == x exactly, so a vector against itself gives 1.0.
  return std::clamp(dot(a, b) / std::sqrt(aa * bb), -1.0, 1.0);
}

}  // namespace amg
