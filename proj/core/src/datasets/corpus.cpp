#include "amg/datasets/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "amg/error.hpp"
#include "amg/io/container.hpp"
#include "amg/numerics/rng.hpp"

namespace amg {
namespace {

constexpr double kPeak = 0.9;

double envelope_at(Envelope e, double u) {
  switch (e) {
    case Envelope::kFlat:
      return 1.0;
    case Envelope::kDecay:
      return std::exp(-3.0 * u);
    case Envelope::kRise:
      return 0.2 + 0.8 * u;
    case Envelope::kPulse:
      return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * u);
  }
  return 1.0;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_string(Envelope e) {
  switch (e) {
    case Envelope::kFlat:
      return "flat";
    case Envelope::kDecay:
      return "decay";
    case Envelope::kRise:
      return "rise";
    case Envelope::kPulse:
      return "pulse";
  }
  return "flat";
}

Envelope envelope_from_string(const std::string& name) {
  if (name == "flat") return Envelope::kFlat;
  if (name == "decay") return Envelope::kDecay;
  if (name == "rise") return Envelope::kRise;
  if (name == "pulse") return Envelope::kPulse;
  throw ConfigError("unknown envelope '" + name + "' (expected flat, decay, rise or pulse)");
}

std::vector<ClassSpec> CorpusConfig::default_classes() {
  return {
      {"bell", {0.05, 0.13, 0.29}, Envelope::kDecay, 0.02},
      {"drone", {0.03, 0.06}, Envelope::kFlat, 0.02},
      {"whistle", {0.21, 0.42}, Envelope::kPulse, 0.02},
      {"buzz", {0.11, 0.22, 0.33, 0.44}, Envelope::kFlat, 0.02},
      {"chime", {0.17, 0.36}, Envelope::kDecay, 0.02},
      {"hum", {0.08, 0.16, 0.24}, Envelope::kRise, 0.02},
      {"siren", {0.27, 0.38}, Envelope::kPulse, 0.02},
      {"pluck", {0.09, 0.19, 0.47}, Envelope::kDecay, 0.02},
  };
}

void CorpusConfig::validate() const {
  if (classes.empty()) throw ConfigError("corpus: at least one class is required");
  if (records_per_class < 1) throw ConfigError("corpus: records_per_class must be >= 1");
  if (clip_length < 2) throw ConfigError("corpus: clip_length must be >= 2");
  std::set<std::string> names;
  for (const auto& c : classes) {
    if (c.name.empty()) throw ConfigError("corpus: class name must not be empty");
    if (!names.insert(c.name).second) throw ConfigError("corpus: duplicate class name '" + c.name + "'");
    if (c.frequencies.size() < 2 || c.frequencies.size() > 4) {
      throw ConfigError("corpus: class '" + c.name + "' needs 2 to 4 frequencies");
    }
    for (double f : c.frequencies) {
      if (!(f > 0.0 && f < 0.5)) {
        throw ConfigError("corpus: class '" + c.name + "' frequency " + std::to_string(f) +
                          " is not in (0, 0.5)");
      }
    }
    if (!(c.noise_floor >= 0.0) || !std::isfinite(c.noise_floor)) {
      throw ConfigError("corpus: class '" + c.name + "' noise_floor must be >= 0");
    }
  }
  const auto base = classes.size() * records_per_class;
  for (const auto& d : duplicates) {
    if (d.copies < 1) throw ConfigError("corpus: duplication copy count must be >= 1");
    if (d.record >= base) throw ConfigError("corpus: duplication references unknown record " + std::to_string(d.record));
  }
}

std::string caption_text_for(const std::string& class_name) { return "the sound of a " + class_name; }

Corpus synth_corpus(const CorpusConfig& config) {
  config.validate();
  Corpus out;
  out.reserve(config.class_count() * config.records_per_class);
  const auto n = config.clip_length;
  for (std::size_t c = 0; c < config.class_count(); ++c) {
    const auto& spec = config.classes[c];
    for (std::size_t j = 0; j < config.records_per_class; ++j) {
      const RecordId id = c * config.records_per_class + j;
      RngStream rng(RngStream::derive(config.seed, id));
      std::vector<double> phases;
      for (std::size_t k = 0; k < spec.frequencies.size(); ++k) phases.push_back(2.0 * std::numbers::pi * rng.uniform());
      Tensor clip(Shape{n});
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < spec.frequencies.size(); ++k) {
          s += std::sin(2.0 * std::numbers::pi * spec.frequencies[k] * static_cast<double>(i) + phases[k]) /
               static_cast<double>(k + 1);
        }
        const double u = static_cast<double>(i) / static_cast<double>(n - 1);
        clip[i] = envelope_at(spec.envelope, u) * s + spec.noise_floor * rng.normal();
      }
      double peak = 0.0;
      for (double v : clip.data()) peak = std::max(peak, std::abs(v));
      if (peak == 0.0) throw NumericError("synth_corpus: silent record " + std::to_string(id));
      clip = (kPeak / peak) * clip;
      Record r;
      r.id = id;
      r.clip = std::move(clip);
      r.caption = static_cast<CaptionId>(c);
      r.caption_text = caption_text_for(spec.name);
      out.push_back(std::move(r));
    }
  }
  return out;
}

Corpus inject_duplicates(const Corpus& records, const std::vector<Duplication>& plan) {
  Corpus out = records;
  RecordId next = 0;
  for (const auto& r : records) next = std::max(next, r.id + 1);
  for (const auto& d : plan) {
    const auto it = std::find_if(records.begin(), records.end(), [&](const Record& r) { return r.id == d.record; });
    if (it == records.end()) throw DomainError("inject_duplicates: unknown record id " + std::to_string(d.record));
    if (d.copies < 1) throw DomainError("inject_duplicates: copy count must be >= 1");
    for (std::size_t k = 0; k < d.copies; ++k) {
      Record copy = *it;
      copy.id = next++;
      copy.duplicate_of = it->id;
      out.push_back(std::move(copy));
    }
  }
  return out;
}

Corpus build_corpus(const CorpusConfig& config) { return inject_duplicates(synth_corpus(config), config.duplicates); }

std::vector<std::uint8_t> encode_corpus(const Corpus& corpus) {
  BinaryWriter w;
  w.u64(corpus.size());
  for (const auto& r : corpus) {
    w.u64(r.id);
    w.u32(r.caption);
    w.str(r.caption_text);
    w.u32(r.duplicate_of ? 1 : 0);
    w.u64(r.duplicate_of.value_or(0));
    w.tensor(r.clip);
  }
  return encode_container(kCorpusMagic, kCorpusVersion, w.bytes());
}

Corpus decode_corpus(const std::vector<std::uint8_t>& file) {
  BinaryReader rd(decode_container(file, kCorpusMagic, kCorpusVersion));
  const auto count = rd.u64();
  Corpus out;
  for (std::uint64_t i = 0; i < count; ++i) {
    Record r;
    r.id = rd.u64();
    r.caption = rd.u32();
    r.caption_text = rd.str();
    const auto has_dup = rd.u32();
    const auto dup = rd.u64();
    if (has_dup > 1) throw FormatError("corpus: bad duplicate flag");
    if (has_dup) r.duplicate_of = dup;
    r.clip = rd.tensor();
    if (r.clip.rank() != 1) throw FormatError("corpus: clip must be a vector");
    out.push_back(std::move(r));
  }
  rd.expect_end();
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file_bytes(path, encode_corpus(corpus));
}

Corpus load_corpus(const std::filesystem::path& path) { return decode_corpus(read_file_bytes(path)); }

std::string corpus_manifest_csv(const Corpus& corpus) {
  std::ostringstream os;
  os << "record_id,caption_id,caption_text,duplicate_of\n";
  for (const auto& r : corpus) {
    os << r.id << ',' << r.caption << ',' << csv_field(r.caption_text) << ',';
    if (r.duplicate_of) os << *r.duplicate_of;
    os << '\n';
  }
  return os.str();
}

}  // namespace amg
