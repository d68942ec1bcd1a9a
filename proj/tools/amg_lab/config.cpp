#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "amg/error.hpp"

namespace amg::lab {
namespace {

using nlohmann::json;

// Reads the members of one JSON object, remembering which keys were used so
// that leftovers can be reported.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    const json* v = take(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw ConfigError("");
        out = v->get<bool>();
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw ConfigError("");
        out = v->get<double>();
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_unsigned()) throw ConfigError("");
        out = v->get<T>();
      } else {
        if (!v->is_string()) throw ConfigError("");
        out = v->get<std::string>();
      }
    } catch (const ConfigError&) {
      throw ConfigError(where(key) + " has the wrong type");
    }
  }

  const json* take(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const std::string& key = "") const {
    const std::string base = path_.empty() ? "config" : path_;
    return key.empty() ? base : base + "." + key;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown key " + where(k));
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> read_numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(where + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void read_corpus(const json& j, CorpusConfig& c) {
  Section s(j, "corpus");
  s.read("records_per_class", c.records_per_class);
  s.read("clip_length", c.clip_length);
  s.read("seed", c.seed);
  if (const json* classes = s.take("classes")) {
    if (!classes->is_array()) throw ConfigError("corpus.classes must be an array");
    c.classes.clear();
    for (std::size_t i = 0; i < classes->size(); ++i) {
      const std::string path = "corpus.classes[" + std::to_string(i) + "]";
      Section cs((*classes)[i], path);
      ClassSpec spec;
      spec.frequencies.clear();
      cs.read("name", spec.name);
      if (const json* f = cs.take("frequencies")) spec.frequencies = read_numbers(*f, path + ".frequencies");
      std::string env = to_string(spec.envelope);
      cs.read("envelope", env);
      spec.envelope = envelope_from_string(env);
      cs.read("noise_floor", spec.noise_floor);
      cs.finish();
      c.classes.push_back(std::move(spec));
    }
  }
  if (const json* dups = s.take("duplicates")) {
    if (!dups->is_array()) throw ConfigError("corpus.duplicates must be an array");
    c.duplicates.clear();
    for (std::size_t i = 0; i < dups->size(); ++i) {
      Section ds((*dups)[i], "corpus.duplicates[" + std::to_string(i) + "]");
      Duplication d;
      ds.read("record", d.record);
      ds.read("copies", d.copies);
      ds.finish();
      c.duplicates.push_back(d);
    }
  }
  s.finish();
}

json corpus_json(const CorpusConfig& c) {
  json classes = json::array();
  for (const auto& spec : c.classes) {
    classes.push_back({{"name", spec.name},
                       {"frequencies", spec.frequencies},
                       {"envelope", to_string(spec.envelope)},
                       {"noise_floor", spec.noise_floor}});
  }
  json dups = json::array();
  for (const auto& d : c.duplicates) dups.push_back({{"record", d.record}, {"copies", d.copies}});
  return {{"classes", classes},
          {"records_per_class", c.records_per_class},
          {"duplicates", dups},
          {"clip_length", c.clip_length},
          {"seed", c.seed}};
}

}  // namespace

void RunConfig::finalize() {
  corpus.validate();
  model.caption_count = corpus.class_count();
  model.steps = schedule.steps;
  model.validate();
  make_schedule();
  train.validate();
  embedder.input_length = corpus.clip_length;
  embedder.validate();
  guidance.validate();
  if (model.latent_dim > corpus.clip_length) {
    throw ConfigError("model.latent_dim must not exceed corpus.clip_length");
  }
  if (probes.clusters < 1) throw ConfigError("probes.clusters must be >= 1");
  if (probes.per_cluster < 1) throw ConfigError("probes.per_cluster must be >= 1");
  if (ablation.generations < 1) throw ConfigError("ablation.generations must be >= 1");
  if (ablation.self_sim_hop < 1) throw ConfigError("ablation.self_sim_hop must be >= 1");
  if (ablation.self_sim_window < embedder.frame || ablation.self_sim_window > corpus.clip_length) {
    throw ConfigError("ablation.self_sim_window must lie in [embedder.frame, corpus.clip_length]");
  }
  if (ablation.histogram_bins < 1) throw ConfigError("ablation.histogram_bins must be >= 1");
  if (out.empty()) throw ConfigError("out must not be empty");
}

NoiseSchedule RunConfig::make_schedule() const {
  try {
    return NoiseSchedule::make(schedule.kind, schedule.steps, schedule.beta_min, schedule.beta_max);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
}

EmbedderConfig RunConfig::embedder_for(EmbedderKind kind) const {
  EmbedderConfig e = embedder;
  e.kind = kind;
  return e;
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  RunConfig c;
  Section root(j, "");
  root.read("seed", c.seed);
  root.read("out", c.out);
  if (const json* v = root.take("corpus")) read_corpus(*v, c.corpus);
  if (const json* v = root.take("model")) {
    Section s(*v, "model");
    s.read("latent_dim", c.model.latent_dim);
    s.read("hidden", c.model.hidden);
    s.read("time_features", c.model.time_features);
    s.read("condition_dim", c.model.condition_dim);
    s.finish();
  }
  if (const json* v = root.take("schedule")) {
    Section s(*v, "schedule");
    std::string kind = to_string(c.schedule.kind);
    s.read("kind", kind);
    try {
      c.schedule.kind = schedule_kind_from_string(kind);
    } catch (const Error& e) {
      throw ConfigError(std::string("schedule.kind: ") + e.what());
    }
    s.read("steps", c.schedule.steps);
    s.read("beta_min", c.schedule.beta_min);
    s.read("beta_max", c.schedule.beta_max);
    s.finish();
  }
  if (const json* v = root.take("train")) {
    Section s(*v, "train");
    s.read("learning_rate", c.train.learning_rate);
    s.read("beta1", c.train.beta1);
    s.read("beta2", c.train.beta2);
    s.read("adam_epsilon", c.train.adam_epsilon);
    s.read("batch_size", c.train.batch_size);
    s.read("steps", c.train.steps);
    s.read("p_uncond", c.train.p_uncond);
    s.read("seed", c.train.seed);
    s.finish();
  }
  if (const json* v = root.take("embedder")) {
    Section s(*v, "embedder");
    s.read("frame", c.embedder.frame);
    s.read("hop", c.embedder.hop);
    s.read("dim", c.embedder.dim);
    s.read("seed", c.embedder.seed);
    s.read("eps_mag", c.embedder.eps_mag);
    s.finish();
  }
  if (const json* v = root.take("guidance")) {
    Section s(*v, "guidance");
    auto& g = c.guidance;
    s.read("s0", g.s0);
    s.read("c1", g.c1);
    s.read("c2", g.c2);
    s.read("c3", g.c3);
    s.read("lambda_min", g.lambda_min);
    s.read("lambda_max", g.lambda_max);
    s.read("lambda_exponent", g.lambda_exponent);
    s.read("enable_spe", g.enable_spe);
    s.read("enable_dup", g.enable_dup);
    s.read("enable_sim", g.enable_sim);
    s.read("nn_refresh_stride", g.nn_refresh_stride);
    std::string mode = to_string(g.sim_grad_mode);
    s.read("sim_grad_mode", mode);
    try {
      g.sim_grad_mode = sim_grad_mode_from_string(mode);
    } catch (const Error& e) {
      throw ConfigError(std::string("guidance.sim_grad_mode: ") + e.what());
    }
    s.finish();
  }
  if (const json* v = root.take("probes")) {
    Section s(*v, "probes");
    s.read("clusters", c.probes.clusters);
    s.read("per_cluster", c.probes.per_cluster);
    s.read("seed", c.probes.seed);
    s.finish();
  }
  if (const json* v = root.take("ablation")) {
    Section s(*v, "ablation");
    s.read("generations", c.ablation.generations);
    s.read("self_sim_window", c.ablation.self_sim_window);
    s.read("self_sim_hop", c.ablation.self_sim_hop);
    s.read("histogram_bins", c.ablation.histogram_bins);
    s.finish();
  }
  root.finish();
  try {
    c.finalize();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  const auto& g = c.guidance;
  json j = {
      {"seed", c.seed},
      {"out", c.out},
      {"corpus", corpus_json(c.corpus)},
      {"model",
       {{"latent_dim", c.model.latent_dim},
        {"hidden", c.model.hidden},
        {"time_features", c.model.time_features},
        {"condition_dim", c.model.condition_dim}}},
      {"schedule",
       {{"kind", to_string(c.schedule.kind)},
        {"steps", c.schedule.steps},
        {"beta_min", c.schedule.beta_min},
        {"beta_max", c.schedule.beta_max}}},
      {"train",
       {{"learning_rate", c.train.learning_rate},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2},
        {"adam_epsilon", c.train.adam_epsilon},
        {"batch_size", c.train.batch_size},
        {"steps", c.train.steps},
        {"p_uncond", c.train.p_uncond},
        {"seed", c.train.seed}}},
      {"embedder",
       {{"frame", c.embedder.frame},
        {"hop", c.embedder.hop},
        {"dim", c.embedder.dim},
        {"seed", c.embedder.seed},
        {"eps_mag", c.embedder.eps_mag}}},
      {"guidance",
       {{"s0", g.s0},
        {"c1", g.c1},
        {"c2", g.c2},
        {"c3", g.c3},
        {"lambda_min", g.lambda_min},
        {"lambda_max", g.lambda_max},
        {"lambda_exponent", g.lambda_exponent},
        {"enable_spe", g.enable_spe},
        {"enable_dup", g.enable_dup},
        {"enable_sim", g.enable_sim},
        {"nn_refresh_stride", g.nn_refresh_stride},
        {"sim_grad_mode", to_string(g.sim_grad_mode)}}},
      {"probes", {{"clusters", c.probes.clusters}, {"per_cluster", c.probes.per_cluster}, {"seed", c.probes.seed}}},
      {"ablation",
       {{"generations", c.ablation.generations},
        {"self_sim_window", c.ablation.self_sim_window},
        {"self_sim_hop", c.ablation.self_sim_hop},
        {"histogram_bins", c.ablation.histogram_bins}}},
  };
  return j.dump(2) + "\n";
}

}  // namespace amg::lab
