#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "amg/datasets/record.hpp"

namespace amg {

enum class Envelope { kFlat, kDecay, kRise, kPulse };

std::string to_string(Envelope e);
Envelope envelope_from_string(const std::string& name);

struct ClassSpec {
  std::string name;
  std::vector<double> frequencies;  // cycles per sample, in (0, 0.5)
  Envelope envelope = Envelope::kFlat;
  double noise_floor = 0.02;
};

struct Duplication {
  RecordId record = 0;
  std::size_t copies = 1;
};

struct CorpusConfig {
  std::vector<ClassSpec> classes = default_classes();
  std::size_t records_per_class = 8;
  std::vector<Duplication> duplicates{{0, 32}};
  std::size_t clip_length = 256;
  std::uint64_t seed = 2024;

  std::size_t class_count() const { return classes.size(); }
  void validate() const;

  static std::vector<ClassSpec> default_classes();
};

std::string caption_text_for(const std::string& class_name);

/// Base records only, class-major: record id = class * records_per_class + j.
Corpus synth_corpus(const CorpusConfig& config);

/// Appends bit-identical copies after the existing records, in plan order,
/// with fresh ids continuing from the largest existing id.
Corpus inject_duplicates(const Corpus& records, const std::vector<Duplication>& plan);

/// synth_corpus followed by the config's duplication plan.
Corpus build_corpus(const CorpusConfig& config);

inline constexpr std::uint32_t kCorpusVersion = 1;

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_corpus(const Corpus& corpus);
Corpus decode_corpus(const std::vector<std::uint8_t>& file);

/// record_id,caption_id,caption_text,duplicate_of
std::string corpus_manifest_csv(const Corpus& corpus);

}  // namespace amg
