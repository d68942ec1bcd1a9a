#include "amg/model/checkpoint.hpp"

#include "amg/error.hpp"
#include "amg/io/container.hpp"

namespace amg {

std::vector<std::uint8_t> encode_checkpoint(const DenoiserParams& params, const Codec& codec,
                                            const NoiseSchedule& sched) {
  BinaryWriter w;
  w.u32(sched.kind() == ScheduleKind::kLinear ? 0 : 1);
  w.u64(sched.steps());
  w.f64(sched.beta_min());
  w.f64(sched.beta_max());

  const auto& cfg = params.config;
  w.u64(cfg.latent_dim);
  w.u64(cfg.hidden);
  w.u64(cfg.time_features);
  w.u64(cfg.condition_dim);
  w.u64(cfg.caption_count);
  w.u64(cfg.steps);
  for (const auto* t : params.tensors()) w.tensor(*t);
  w.u32(params.has_linear_skip() ? 1 : 0);
  if (params.has_linear_skip()) {
    w.tensor(params.prior_mean);
    w.tensor(params.prior_variance);
    w.tensor(params.alpha_bar);
  }

  w.u32(codec.is_identity() ? 1 : 0);
  w.u64(codec.signal_dim());
  if (!codec.is_identity()) {
    w.tensor(codec.encoder());
    w.tensor(codec.decoder());
    w.tensor(codec.mean());
  }
  return encode_container(kCheckpointMagic, kCheckpointVersion, w.bytes());
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& file) {
  BinaryReader r(decode_container(file, kCheckpointMagic, kCheckpointVersion));
  const auto kind_code = r.u32();
  if (kind_code > 1) throw FormatError("unknown schedule kind in checkpoint");
  const auto steps = r.u64();
  const double beta_min = r.f64();
  const double beta_max = r.f64();
  auto sched = NoiseSchedule::make(kind_code == 0 ? ScheduleKind::kLinear : ScheduleKind::kCosine, steps, beta_min,
                                   beta_max);

  DenoiserConfig cfg;
  cfg.latent_dim = r.u64();
  cfg.hidden = r.u64();
  cfg.time_features = r.u64();
  cfg.condition_dim = r.u64();
  cfg.caption_count = r.u64();
  cfg.steps = r.u64();
  auto params = DenoiserParams::zeros(cfg);
  for (auto* t : params.tensors()) {
    Tensor loaded = r.tensor();
    if (loaded.shape() != t->shape()) throw FormatError("checkpoint tensor shape does not match its config");
    *t = std::move(loaded);
  }
  if (r.u32() == 1) {
    params.prior_mean = r.tensor();
    params.prior_variance = r.tensor();
    params.alpha_bar = r.tensor();
    if (params.prior_mean.shape() != Shape{cfg.latent_dim} || params.prior_variance.shape() != Shape{cfg.latent_dim} || params.alpha_bar.shape() != Shape{cfg.steps + 1}) {
      throw FormatError("checkpoint skip tensors do not match its config");
    }
  }

  const bool identity = r.u32() == 1;
  const auto signal = r.u64();
  Codec codec = Codec::identity(signal);
  if (!identity) {
    Tensor enc = r.tensor();
    Tensor dec = r.tensor();
    Tensor mean = r.tensor();
    codec = Codec::linear(std::move(enc), std::move(dec), std::move(mean));
  }
  r.expect_end();
  return {std::move(params), std::move(codec), std::move(sched)};
}

void save_checkpoint(const DenoiserParams& params, const Codec& codec, const NoiseSchedule& sched,
                     const std::filesystem::path& path) {
  write_file_bytes(path, encode_checkpoint(params, codec, sched));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file_bytes(path)); }

}  // namespace amg
