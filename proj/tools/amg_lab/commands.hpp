#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "amg/datasets/record.hpp"
#include "amg/embedding/index.hpp"
#include "amg/guidance/sampler.hpp"
#include "amg/model/checkpoint.hpp"
#include "config.hpp"

namespace amg::lab {

// Exit codes of the amg-lab tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,
  kExitConfig = 2,    // malformed config, bad flags or environment
  kExitIo = 3,        // unreadable/unwritable files, corrupt containers
  kExitNumeric = 4,   // divergence, non-finite values
  kExitArgument = 5,  // well-formed request the data cannot satisfy (e.g. unknown caption)
};

/// Maps the exception currently being handled to an exit code.
int exit_code_for_current_exception();

struct RunPaths {
  std::filesystem::path dir;
  std::filesystem::path corpus() const { return dir / "corpus.amgc"; }
  std::filesystem::path manifest() const { return dir / "manifest.csv"; }
  std::filesystem::path checkpoint() const { return dir / "model.amgl"; }
  std::filesystem::path losses() const { return dir / "loss.csv"; }
  std::filesystem::path index() const { return dir / "index.amgi"; }
  std::filesystem::path samples() const { return dir / "samples"; }
  std::filesystem::path ablation() const { return dir / "ablation"; }
  std::filesystem::path report() const { return dir / "report.md"; }
};

struct Condition {
  std::string name;
  bool spe = false;
  bool dup = false;
  bool sim = false;
};

/// Baseline, each strategy alone, each pair, all three.
const std::vector<Condition>& ablation_conditions();
GuidanceConfig guidance_for(const GuidanceConfig& base, const Condition& condition);

/// Everything loaded from a run directory that sampling needs.
struct Workspace {
  Corpus corpus;
  Checkpoint checkpoint;
  Embedder spectral;
  Embedder projection;
  EmbeddingIndex spectral_index;
  EmbeddingIndex projection_index;

  SamplerContext context() const;
};

Workspace load_workspace(const RunConfig& config);

struct Generation {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  CaptionId caption = 0;
  SamplerTrace trace;
  double sim_spectral = 0.0;
  double sim_projection = 0.0;
  double adherence = 0.0;
  RecordId neighbor = 0;
  RecordId waveform_neighbor = 0;  // nearest under the projection embedder
  double diagonality = 0.0;
};

struct MetricsRow {
  std::string condition;
  double mean_sim_spectral = 0.0;
  double mean_sim_projection = 0.0;
  double adherence = 0.0;
  double frechet_spectral = 0.0;
  double frechet_projection = 0.0;
  double kernel_spectral = 0.0;
  std::size_t samples = 0;
  std::vector<std::uint64_t> seeds;
};

struct ConditionResult {
  Condition condition;
  std::vector<Generation> generations;
  MetricsRow row;
};

struct Probe {
  std::size_t cluster = 0;
  RecordId record = 0;
  CaptionId caption = 0;
  double density = 0.0;
};

struct AblationResult {
  std::vector<Probe> probes;
  std::vector<ConditionResult> conditions;
};

std::vector<Probe> choose_probes(const Workspace& ws, const RunConfig& config);

/// Generation i of every condition uses caption probes[i % P] and seed
/// config.seed + i, so conditions are compared on paired seeds.
AblationResult run_ablation(const Workspace& ws, const RunConfig& config);

std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::string metrics_text(const std::vector<MetricsRow>& rows);

// Subcommands. Each reads and writes under config.out.
void cmd_gen_data(const RunConfig& config);
void cmd_train(const RunConfig& config);

struct SampleOptions {
  CaptionId caption = 0;
  std::size_t count = 1;
  std::uint64_t seed = 0;
};
void cmd_sample(const RunConfig& config, const SampleOptions& options);
void cmd_ablate(const RunConfig& config);
void cmd_report(const std::filesystem::path& run_dir);

}  // namespace amg::lab
