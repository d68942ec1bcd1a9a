#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "amg/datasets/corpus.hpp"
#include "amg/datasets/kmeans.hpp"
#include "amg/datasets/probes.hpp"
#include "amg/error.hpp"
#include "amg/io/container.hpp"
#include "amg/metrics/metrics.hpp"
#include "amg/metrics/self_similarity.hpp"
#include "amg/model/codec.hpp"
#include "amg/model/trainer.hpp"
#include "log.hpp"
#include "svg.hpp"

namespace amg::lab {
namespace fs = std::filesystem;

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string g17(double v) { return fmt("%.17g", v); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

void require_file(const fs::path& path, const char* what) {
  if (!fs::is_regular_file(path)) {
    throw IoError(std::string(what) + " not found at " + path.string());
  }
}

std::string clip_csv(const Tensor& clip) {
  std::ostringstream os;
  os << "i,value\n";
  for (std::size_t i = 0; i < clip.size(); ++i) os << i << ',' << g17(clip[i]) << '\n';
  return os.str();
}

std::string caption_list(const Corpus& corpus) {
  std::map<CaptionId, std::string> names;
  for (const auto& r : corpus) names.emplace(r.caption, r.caption_text);
  std::string out;
  for (const auto& [id, text] : names) {
    if (!out.empty()) out += ", ";
    out += std::to_string(id) + " (" + text + ")";
  }
  return out;
}

Tensor embed_all(const std::vector<Tensor>& clips, const Embedder& e) {
  std::vector<Tensor> rows;
  rows.reserve(clips.size());
  for (const auto& c : clips) rows.push_back(e.embed(c));
  return stack_rows(rows);
}

Tensor corpus_embeddings(const Corpus& corpus, const Embedder& e) {
  std::vector<Tensor> clips;
  for (const auto& r : corpus) clips.push_back(r.clip);
  return embed_all(clips, e);
}

double frechet_or_nan(const Tensor& a, const Tensor& b) {
  if (a.rows() < a.cols() + 1 || b.rows() < b.cols() + 1) return std::nan("");
  return frechet_distance(a, b);
}

template <typename E>
[[noreturn]] void rethrow_in(const E& e, const std::string& where) {
  throw E(where + ": " + e.what());
}

}  // namespace

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return kExitConfig;
  } catch (const IoError&) {
    return kExitIo;
  } catch (const FormatError&) {
    return kExitIo;
  } catch (const NumericError&) {
    return kExitNumeric;
  } catch (const DomainError&) {
    return kExitArgument;
  } catch (const ShapeError&) {
    return kExitArgument;
  } catch (...) {
    return kExitUnexpected;
  }
}

const std::vector<Condition>& ablation_conditions() {
  static const std::vector<Condition> kConditions = {
      {"baseline", false, false, false}, {"spe", true, false, false},    {"dup", false, true, false},
      {"sim", false, false, true},       {"spe+dup", true, true, false}, {"spe+sim", true, false, true},
      {"dup+sim", false, true, true},    {"full", true, true, true},
  };
  return kConditions;
}

GuidanceConfig guidance_for(const GuidanceConfig& base, const Condition& condition) {
  GuidanceConfig g = base;
  g.enable_spe = condition.spe;
  g.enable_dup = condition.dup;
  g.enable_sim = condition.sim;
  return g;
}

SamplerContext Workspace::context() const {
  return SamplerContext{&checkpoint.params, &checkpoint.codec, &spectral, &spectral_index, &checkpoint.schedule};
}

Workspace load_workspace(const RunConfig& config) {
  const RunPaths paths{config.out};
  require_file(paths.corpus(), "corpus (run gen-data first)");
  require_file(paths.checkpoint(), "checkpoint (run train first)");
  Corpus corpus = load_corpus(paths.corpus());
  if (corpus.empty()) throw FormatError("corpus file holds no records");
  Checkpoint ck = load_checkpoint(paths.checkpoint());
  const auto length = corpus.front().clip.size();
  if (ck.codec.signal_dim() != length) throw ConfigError("checkpoint codec does not match the corpus clip length");

  EmbedderConfig spec_cfg = config.embedder_for(EmbedderKind::kSpectral);
  EmbedderConfig proj_cfg = config.embedder_for(EmbedderKind::kRandomProjection);
  spec_cfg.input_length = proj_cfg.input_length = length;
  Embedder spectral(spec_cfg);
  Embedder projection(proj_cfg);
  EmbeddingIndex spectral_index =
      fs::is_regular_file(paths.index()) ? load_index(paths.index()) : build_index(corpus, spectral);
  if (spectral_index.size() != corpus.size() || spectral_index.dim() != spectral.dim()) {
    throw FormatError("index file does not match the corpus; rerun train");
  }
  EmbeddingIndex projection_index = build_index(corpus, projection);
  return Workspace{std::move(corpus), std::move(ck), std::move(spectral), std::move(projection),
                   std::move(spectral_index), std::move(projection_index)};
}

std::vector<Probe> choose_probes(const Workspace& ws, const RunConfig& config) {
  const Tensor fused = fused_embeddings(ws.corpus, ws.spectral, ws.spectral_index);
  const auto k = std::min(config.probes.clusters, ws.corpus.size());
  const auto km = kmeans(fused, k, config.probes.seed);
  const auto density = density_scores(km.assignments, fused);
  const auto ids = select_probes(km.assignments, fused, ws.corpus, config.probes.per_cluster);
  std::vector<Probe> out;
  for (const auto id : ids) {
    const auto row = ws.spectral_index.row_of(id);
    out.push_back(Probe{km.assignments[row], id, ws.corpus[row].caption, density[row]});
  }
  return out;
}

AblationResult run_ablation(const Workspace& ws, const RunConfig& config) {
  AblationResult result;
  result.probes = choose_probes(ws, config);
  const auto ctx = ws.context();
  const Tensor train_spec = corpus_embeddings(ws.corpus, ws.spectral);
  const Tensor train_proj = corpus_embeddings(ws.corpus, ws.projection);
  const auto window = config.ablation.self_sim_window;
  const auto hop = config.ablation.self_sim_hop;

  for (const auto& cond : ablation_conditions()) {
    spdlog::info("ablation: condition {}", cond.name);
    ConditionResult cr;
    cr.condition = cond;
    const auto guidance = guidance_for(config.guidance, cond);
    std::vector<Tensor> clips;
    std::vector<CaptionId> captions;
    try {
      for (std::size_t i = 0; i < config.ablation.generations; ++i) {
        Generation g;
        g.index = i;
        g.caption = result.probes[i % result.probes.size()].caption;
        g.seed = config.seed + i;
        g.trace = guided_sample(ctx, g.caption, guidance, g.seed);
        const Tensor e_spec = ws.spectral.embed(g.trace.clip);
        const auto hit = nearest_neighbor(ws.spectral_index, e_spec);
        g.sim_spectral = hit.similarity;
        g.neighbor = hit.record_id;
        const auto proj_hit = nearest_neighbor(ws.projection_index, ws.projection.embed(g.trace.clip));
        g.sim_projection = proj_hit.similarity;
        g.waveform_neighbor = proj_hit.record_id;
        g.adherence = cosine_sim(e_spec, embed_caption(ws.spectral_index, g.caption));
        // Spectral neighbours ignore phase, so any record of the class can win;
        // the time alignment only makes sense against the waveform match.
        const auto& ref = ws.corpus[ws.projection_index.row_of(proj_hit.record_id)].clip;
        g.diagonality = self_similarity(ref, g.trace.clip, window, hop, ws.projection).diagonality;
        spdlog::debug("  {} seed {} caption {} sim {:.4f} fired {}", cond.name, g.seed, g.caption, g.sim_spectral,
                      g.trace.fired_steps());
        clips.push_back(g.trace.clip);
        captions.push_back(g.caption);
        cr.generations.push_back(std::move(g));
      }
    } catch (const NumericError& e) {
      rethrow_in(e, "condition " + cond.name);
    } catch (const DomainError& e) {
      rethrow_in(e, "condition " + cond.name);
    } catch (const ShapeError& e) {
      rethrow_in(e, "condition " + cond.name);
    }

    auto& row = cr.row;
    row.condition = cond.name;
    std::vector<double> spec, proj, adh;
    for (const auto& g : cr.generations) {
      spec.push_back(g.sim_spectral);
      proj.push_back(g.sim_projection);
      adh.push_back(g.adherence);
      row.seeds.push_back(g.seed);
    }
    row.mean_sim_spectral = mean_of(spec);
    row.mean_sim_projection = mean_of(proj);
    row.adherence = mean_of(adh);
    const Tensor gen_spec = embed_all(clips, ws.spectral);
    const Tensor gen_proj = embed_all(clips, ws.projection);
    row.frechet_spectral = frechet_or_nan(gen_spec, train_spec);
    row.frechet_projection = frechet_or_nan(gen_proj, train_proj);
    row.kernel_spectral = kernel_distance(gen_spec, train_spec);
    row.samples = cr.generations.size();
    result.conditions.push_back(std::move(cr));
  }
  return result;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  os << "condition,mean_sim_spectral,mean_sim_projection,prompt_adherence,frechet_spectral,frechet_projection,"
        "kernel_spectral,samples,seeds\n";
  for (const auto& r : rows) {
    os << r.condition << ',' << fmt("%.6f", r.mean_sim_spectral) << ',' << fmt("%.6f", r.mean_sim_projection) << ','
       << fmt("%.6f", r.adherence) << ',' << fmt("%.6f", r.frechet_spectral) << ','
       << fmt("%.6f", r.frechet_projection) << ',' << fmt("%.6f", r.kernel_spectral) << ',' << r.samples << ',';
    for (std::size_t i = 0; i < r.seeds.size(); ++i) os << (i ? ";" : "") << r.seeds[i];
    os << '\n';
  }
  return os.str();
}

std::string metrics_text(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %9s %9s %9s %9s %9s %9s %5s\n", "condition", "sim_spec", "sim_proj", "adhere",
                "fd_spec", "fd_proj", "kd_spec", "n");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-10s %9.4f %9.4f %9.4f %9.4f %9.4f %9.4f %5zu\n", r.condition.c_str(),
                  r.mean_sim_spectral, r.mean_sim_projection, r.adherence, r.frechet_spectral, r.frechet_projection,
                  r.kernel_spectral, r.samples);
    os << buf;
  }
  return os.str();
}

void cmd_gen_data(const RunConfig& config) {
  const RunPaths paths{config.out};
  ensure_dir(paths.dir);
  const Corpus corpus = build_corpus(config.corpus);
  save_corpus(corpus, paths.corpus());
  write_text_file(paths.manifest(), corpus_manifest_csv(corpus));
  std::size_t dups = 0;
  for (const auto& r : corpus) dups += r.duplicate_of ? 1 : 0;
  std::cout << "records " << corpus.size() << " duplicates " << dups << " -> " << paths.corpus().string() << '\n';
}

void cmd_train(const RunConfig& config) {
  const RunPaths paths{config.out};
  require_file(paths.corpus(), "corpus (run gen-data first)");
  const Corpus corpus = load_corpus(paths.corpus());
  if (corpus.empty()) throw FormatError("corpus file holds no records");
  std::vector<Tensor> clips;
  std::vector<LabeledClip> labeled;
  for (const auto& r : corpus) {
    clips.push_back(r.clip);
    labeled.push_back({r.clip, r.caption});
  }
  DenoiserConfig model = config.model;
  if (clips.front().size() != config.corpus.clip_length) {
    throw ConfigError("corpus clip length differs from corpus.clip_length in the config");
  }
  const Codec codec = fit_codec(clips, model.latent_dim);
  const NoiseSchedule sched = config.make_schedule();
  spdlog::info("training {} steps on {} records", config.train.steps, corpus.size());
  const TrainResult res = train(labeled, codec, sched, model, config.train);
  save_checkpoint(res.params, codec, sched, paths.checkpoint());

  std::ostringstream loss;
  loss << "step,loss\n";
  for (std::size_t i = 0; i < res.losses.size(); ++i) loss << i << ',' << g17(res.losses[i]) << '\n';
  write_text_file(paths.losses(), loss.str());

  Embedder spectral(config.embedder_for(EmbedderKind::kSpectral));
  save_index(build_index(corpus, spectral), paths.index());

  const auto window = std::min<std::size_t>(50, res.losses.size());
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < window; ++i) {
    head += res.losses[i];
    tail += res.losses[res.losses.size() - 1 - i];
  }
  std::cout << "loss " << fmt("%.4f", head / window) << " -> " << fmt("%.4f", tail / window) << " -> "
            << paths.checkpoint().string() << '\n';
}

void cmd_sample(const RunConfig& config, const SampleOptions& options) {
  const Workspace ws = load_workspace(config);
  if (options.caption >= ws.checkpoint.params.config.caption_count) {
    throw DomainError("unknown caption " + std::to_string(options.caption) + "; valid captions: " +
                      caption_list(ws.corpus));
  }
  if (options.count < 1) throw ConfigError("--count must be at least 1");
  const RunPaths paths{config.out};
  ensure_dir(paths.samples());
  const auto ctx = ws.context();
  for (std::size_t k = 0; k < options.count; ++k) {
    const std::uint64_t seed = options.seed + k;
    const auto trace = guided_sample(ctx, options.caption, config.guidance, seed);
    const std::string stem = "c" + std::to_string(options.caption) + "_s" + std::to_string(seed);
    write_text_file(paths.samples() / (stem + ".clip.csv"), clip_csv(trace.clip));
    write_text_file(paths.samples() / (stem + ".trace.csv"), trace_to_csv(trace));
    const double sim = nearest_neighbor(ws.spectral_index, ws.spectral.embed(trace.clip)).similarity;
    std::cout << stem << " fired " << trace.fired_steps() << " nn_similarity " << fmt("%.4f", sim) << '\n';
  }
}

void cmd_ablate(const RunConfig& config) {
  const Workspace ws = load_workspace(config);
  const AblationResult res = run_ablation(ws, config);
  const RunPaths paths{config.out};
  const fs::path dir = paths.ablation();
  ensure_dir(dir);

  std::ostringstream probes;
  probes << "cluster,record_id,caption,density\n";
  for (const auto& p : res.probes) {
    probes << p.cluster << ',' << p.record << ',' << p.caption << ',' << fmt("%.6f", p.density) << '\n';
  }
  write_text_file(dir / "probes.csv", probes.str());

  std::vector<MetricsRow> rows;
  std::ostringstream gens;
  gens << "condition,index,seed,caption,sim_spectral,sim_projection,adherence,neighbor,waveform_neighbor,diagonality,fired_steps\n";
  for (const auto& cr : res.conditions) {
    rows.push_back(cr.row);
    const fs::path traces = dir / "traces" / cr.condition.name;
    ensure_dir(traces);
    for (const auto& g : cr.generations) {
      gens << cr.condition.name << ',' << g.index << ',' << g.seed << ',' << g.caption << ','
           << fmt("%.6f", g.sim_spectral) << ',' << fmt("%.6f", g.sim_projection) << ',' << fmt("%.6f", g.adherence)
           << ',' << g.neighbor << ',' << g.waveform_neighbor << ',' << fmt("%.6f", g.diagonality) << ',' << g.trace.fired_steps() << '\n';
      char name[32];
      std::snprintf(name, sizeof name, "g%03zu.csv", g.index);
      write_text_file(traces / name, trace_to_csv(g.trace));
    }
  }
  write_text_file(dir / "generations.csv", gens.str());
  write_text_file(dir / "table.csv", metrics_csv(rows));
  write_text_file(dir / "table.txt", metrics_text(rows));

  // Similarity histograms: each condition against the baseline.
  const auto bins = config.ablation.histogram_bins;
  auto sims_of = [](const ConditionResult& cr) {
    std::vector<double> v;
    for (const auto& g : cr.generations) v.push_back(g.sim_spectral);
    return v;
  };
  const auto& baseline = res.conditions.front();
  const Histogram base_hist = histogram(sims_of(baseline), bins, -1.0, 1.0);
  for (std::size_t c = 1; c < res.conditions.size(); ++c) {
    const auto& cr = res.conditions[c];
    const std::vector<HistogramSeries> series = {{"baseline", base_hist},
                                                 {cr.condition.name, histogram(sims_of(cr), bins, -1.0, 1.0)}};
    write_text_file(dir / ("hist_" + cr.condition.name + ".svg"),
                    histogram_svg("Nearest-neighbour similarity: baseline vs " + cr.condition.name, series));
  }

  // Self-similarity of the first generation (first probe) under baseline and full guidance.
  const auto window = config.ablation.self_sim_window;
  const auto hop = config.ablation.self_sim_hop;
  for (const auto* cr : {&res.conditions.front(), &res.conditions.back()}) {
    const auto& g = cr->generations.front();
    const auto& ref = ws.corpus[ws.projection_index.row_of(g.waveform_neighbor)].clip;
    const auto m = self_similarity(ref, g.trace.clip, window, hop, ws.projection);
    write_text_file(dir / ("selfsim_" + cr->condition.name + ".svg"),
                    heatmap_svg(cr->condition.name + ": record " + std::to_string(g.waveform_neighbor) + " vs generation", m));
  }

  // 2-D projection of training and generated embeddings.
  std::vector<Tensor> all;
  for (const auto& r : ws.corpus) all.push_back(ws.spectral.embed(r.clip));
  const std::size_t n_train = all.size();
  for (const auto* cr : {&res.conditions.front(), &res.conditions.back()}) {
    for (const auto& g : cr->generations) all.push_back(ws.spectral.embed(g.trace.clip));
  }
  const auto proj = pca_2d(stack_rows(all));
  std::vector<ScatterGroup> groups{{"training", {}, {}}, {"baseline", {}, {}}, {"full", {}, {}}};
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::size_t gi = i < n_train ? 0 : (i < n_train + res.conditions.front().generations.size() ? 1 : 2);
    groups[gi].x.push_back(proj.coords.at(i, 0));
    groups[gi].y.push_back(proj.coords.at(i, 1));
  }
  write_text_file(dir / "pca.svg", scatter_svg("Spectral embeddings, first two principal components", groups));

  std::cout << metrics_text(rows);
}

void cmd_report(const fs::path& run_dir) {
  const RunPaths paths{run_dir};
  const fs::path dir = paths.ablation();
  std::vector<std::string> required = {"table.csv", "probes.csv", "generations.csv", "pca.svg", "selfsim_baseline.svg",
                                       "selfsim_full.svg"};
  for (std::size_t c = 1; c < ablation_conditions().size(); ++c) {
    required.push_back("hist_" + ablation_conditions()[c].name + ".svg");
  }
  std::string missing;
  for (const auto& f : required) {
    if (!fs::is_regular_file(dir / f)) missing += (missing.empty() ? "" : ", ") + (dir / f).string();
  }
  if (!missing.empty()) throw IoError("report: missing inputs: " + missing);

  auto read_lines = [](const fs::path& p) {
    const auto bytes = read_file_bytes(p);
    std::vector<std::string> lines;
    std::string cur;
    for (auto b : bytes) {
      if (b == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += static_cast<char>(b);
      }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
  };
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  auto table = [&](const std::vector<std::string>& lines, std::size_t max_cols) {
    std::ostringstream os;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      auto cells = split(lines[i]);
      if (cells.size() > max_cols) cells.resize(max_cols);
      os << '|';
      for (const auto& c : cells) os << ' ' << c << " |";
      os << '\n';
      if (i == 0) {
        os << '|';
        for (std::size_t k = 0; k < cells.size(); ++k) os << " --- |";
        os << '\n';
      }
    }
    return os.str();
  };

  std::ostringstream md;
  md << "# Anti-memorization guidance ablation\n\n";
  md << "## Probes\n\n" << table(read_lines(dir / "probes.csv"), 4) << '\n';
  md << "## Guidance strategies\n\n";
  md << "Mean similarity is the cosine similarity of each generation to its nearest training record. "
        "Fréchet and kernel distances compare generated embeddings with the training set.\n\n";
  md << table(read_lines(dir / "table.csv"), 8) << '\n';
  md << "## Figures\n\n";
  md << "![Embedding projection](ablation/pca.svg)\n\n";
  md << "![Self-similarity, baseline](ablation/selfsim_baseline.svg)\n\n";
  md << "![Self-similarity, full guidance](ablation/selfsim_full.svg)\n\n";
  for (std::size_t c = 1; c < ablation_conditions().size(); ++c) {
    const auto& name = ablation_conditions()[c].name;
    md << "![Similarity histogram, " << name << "](ablation/hist_" << name << ".svg)\n\n";
  }
  md << "Per-generation values: `ablation/generations.csv`; per-step traces: `ablation/traces/`.\n";
  write_text_file(paths.report(), md.str());
  std::cout << "report -> " << paths.report().string() << '\n';
}

}  // namespace amg::lab
