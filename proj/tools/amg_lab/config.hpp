#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "amg/datasets/corpus.hpp"
#include "amg/diffusion/schedule.hpp"
#include "amg/embedding/embedder.hpp"
#include "amg/guidance/guidance.hpp"
#include "amg/model/denoiser.hpp"
#include "amg/model/trainer.hpp"

namespace amg::lab {

struct ScheduleConfig {
  ScheduleKind kind = ScheduleKind::kLinear;
  std::size_t steps = 100;
  double beta_min = 1e-3;
  double beta_max = 0.1;
};

struct ProbeConfig {
  std::size_t clusters = 12;
  std::size_t per_cluster = 1;
  std::uint64_t seed = 11;
};

struct AblationConfig {
  std::size_t generations = 30;
  std::size_t self_sim_window = 64;
  std::size_t self_sim_hop = 16;
  std::size_t histogram_bins = 20;
};

struct RunConfig {
  CorpusConfig corpus;
  DenoiserConfig model;
  ScheduleConfig schedule;
  TrainConfig train;
  EmbedderConfig embedder;  // kind is ignored; both kinds are built from it
  GuidanceConfig guidance;
  ProbeConfig probes;
  AblationConfig ablation;
  std::uint64_t seed = 1000;  // base seed for sampling
  std::string out = "run";

  /// Fills the derived fields (caption count, model steps) and validates
  /// every nested config. Throws ConfigError.
  void finalize();

  NoiseSchedule make_schedule() const;
  EmbedderConfig embedder_for(EmbedderKind kind) const;
};

/// Strict JSON: every key optional, unknown keys rejected, types checked.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& config);

}  // namespace amg::lab
