// Runs the eleven acceptance criteria against a freshly generated default run
// and prints one PASS/FAIL line per criterion. Exit status is non-zero if any
// criterion fails.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "amg/diffusion/process.hpp"
#include "amg/embedding/index.hpp"
#include "amg/guidance/guidance.hpp"
#include "amg/guidance/sampler.hpp"
#include "amg/metrics/metrics.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace fs = std::filesystem;
using namespace amg;
using namespace amg::lab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int n, const std::string& name, const Verdict& v) {
  std::cout << "criterion " << (n < 10 ? " " : "") << n << "  " << (v.pass ? "PASS" : "FAIL") << "  " << name
            << ": " << v.detail << std::endl;
  if (!v.pass) ++failures;
}

// Exceptions inside a criterion count as a failure of that criterion only.
void check(int n, const std::string& name, const std::function<Verdict()>& body) {
  try {
    report(n, name, body());
  } catch (const std::exception& e) {
    report(n, name, Verdict{false, std::string("threw: ") + e.what()});
  }
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(AMG_LAB_EXE) + " " + args + " >> " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct PipelineRun {
  bool ok = false;
  double gen_and_train_seconds = 0.0;
  double total_seconds = 0.0;
  std::string failed_step;
};

PipelineRun run_pipeline(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path log = dir.string() + ".log";
  fs::remove(log);
  PipelineRun r;
  const auto start = Clock::now();
  for (const char* step : {"gen-data", "train", "ablate", "report"}) {
    if (run_cli(std::string(step) + " --out " + dir.string(), log) != 0) {
      r.failed_step = step;
      return r;
    }
    if (std::string(step) == "train") r.gen_and_train_seconds = seconds_since(start);
  }
  r.total_seconds = seconds_since(start);
  r.ok = true;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const ConditionResult& condition(const AblationResult& res, const std::string& name) {
  for (const auto& c : res.conditions) {
    if (c.condition.name == name) return c;
  }
  throw std::runtime_error("no condition " + name);
}

std::vector<double> column(const ConditionResult& c, double Generation::*field) {
  std::vector<double> out;
  for (const auto& g : c.generations) out.push_back(g.*field);
  return out;
}

std::string sign_summary(const SignTest& t) {
  return std::to_string(t.wins) + "/" + std::to_string(t.losses) + "/" + std::to_string(t.ties) +
         " p=" + fmt("%.2g", t.p_value);
}

// Central differences of a scalar function of a vector.
Tensor numeric_gradient(const std::function<double(const Tensor&)>& f, const Tensor& x, double h) {
  Tensor g(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Tensor a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double relative_error(const Tensor& a, const Tensor& b) {
  double scale = 0.0;
  for (double v : b.values()) scale = std::max(scale, std::abs(v));
  return max_abs_diff(a, b) / std::max(scale, 1e-300);
}

Tensor gaussian_points(std::size_t n, std::size_t d, RngStream& rng) {
  Tensor out(Shape{n, d});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out.at(i, j) = rng.normal();
  return out;
}

}  // namespace

int main() {
  const fs::path root = fs::current_path() / "acceptance_runs";
  fs::create_directories(root);
  const fs::path run_a = root / "run_a";
  const fs::path run_b = root / "run_b";

  std::cout << "pipeline run A ..." << std::endl;
  const PipelineRun a = run_pipeline(run_a);
  if (!a.ok) {
    const Verdict v{false, "pipeline run A failed at " + a.failed_step + "; see " + run_a.string() + ".log"};
    for (int n = 1; n <= 11; ++n) report(n, "pipeline", v);
    return 1;
  }

  RunConfig config;
  config.out = run_a.string();
  config.finalize();

  std::vector<const SamplerTrace*> all_traces;
  std::vector<SamplerTrace> c1_traces;
  const Workspace ws = load_workspace(config);
  const auto ctx = ws.context();

  check(1, "memorization induction", [&] {
    if (!a.ok) return Verdict{false, "pipeline failed"};
    const auto start = Clock::now();
    const auto& dup = ws.corpus.front();
    const Tensor dup_embedding = ws.spectral.embed(dup.clip);
    const GuidanceConfig g = guidance_for(config.guidance, ablation_conditions().front());
    std::vector<double> nn, direct;
    for (std::size_t i = 0; i < 30; ++i) {
      c1_traces.push_back(guided_sample(ctx, dup.caption, g, config.seed + i));
      const Tensor e = ws.spectral.embed(c1_traces.back().clip);
      nn.push_back(nearest_neighbor(ws.spectral_index, e).similarity);
      direct.push_back(cosine_sim(e, dup_embedding));
    }
    const double runtime = a.gen_and_train_seconds + seconds_since(start);
    const double m_nn = median(nn), m_direct = median(direct);
    return Verdict{m_nn >= 0.9 && m_direct >= 0.9 && runtime <= 120.0,
                   "median NN similarity " + fmt("%.4f", m_nn) + ", vs duplicated record " + fmt("%.4f", m_direct) +
                       " (>= 0.9); gen-data+train+sampling " + fmt("%.1f", runtime) + " s (<= 120 s)"};
  });
  for (const auto& t : c1_traces) all_traces.push_back(&t);

  AblationResult ablation;
  bool have_ablation = false;
  if (a.ok) {
    try {
      std::cout << "in-process ablation ..." << std::endl;
      ablation = run_ablation(ws, config);
      have_ablation = true;
      for (const auto& c : ablation.conditions)
        for (const auto& g : c.generations) all_traces.push_back(&g.trace);
    } catch (const std::exception& e) {
      std::cout << "ablation threw: " << e.what() << std::endl;
    }
  }

  check(2, "AMG lowers similarity", [&] {
    if (!have_ablation) return Verdict{false, "no ablation"};
    const auto& base = condition(ablation, "baseline");
    const auto& full = condition(ablation, "full");
    const auto bs = column(base, &Generation::sim_spectral), fs_ = column(full, &Generation::sim_spectral);
    const auto bp = column(base, &Generation::sim_projection), fp = column(full, &Generation::sim_projection);
    const double drop_s = mean_of(bs) - mean_of(fs_), drop_p = mean_of(bp) - mean_of(fp);
    const auto ts = sign_test_less(fs_, bs), tp = sign_test_less(fp, bp);
    const bool pass = drop_s >= 0.15 && drop_p > 0.0 && ts.p_value < 0.01 && tp.p_value < 0.01;
    return Verdict{pass, "spectral " + fmt("%.4f", mean_of(bs)) + " -> " + fmt("%.4f", mean_of(fs_)) + " (drop " +
                             fmt("%.4f", drop_s) + ", sign " + sign_summary(ts) + "); projection " +
                             fmt("%.4f", mean_of(bp)) + " -> " + fmt("%.4f", mean_of(fp)) + " (sign " +
                             sign_summary(tp) + ")"};
  });

  check(3, "ablation ordering", [&] {
    if (!have_ablation) return Verdict{false, "no ablation"};
    auto sims = [&](const std::string& name) { return column(condition(ablation, name), &Generation::sim_spectral); };
    bool pass = true;
    std::string detail;
    auto compare = [&](const std::string& lo, const std::string& hi) {
      const auto x = sims(lo), y = sims(hi);
      const auto t = sign_test_less(x, y);
      const bool ok = t.p_value < 0.05 && mean_of(x) <= mean_of(y);
      pass = pass && ok;
      detail += (detail.empty() ? "" : "; ") + lo + " " + fmt("%.4f", mean_of(x)) + " < " + hi + " " +
                fmt("%.4f", mean_of(y)) + " sign " + sign_summary(t) + (ok ? "" : " [miss]");
    };
    compare("sim", "spe");
    for (const char* single : {"spe", "dup", "sim"}) compare("full", single);
    return Verdict{pass, detail};
  });

  check(4, "adherence trade-off", [&] {
    if (!have_ablation) return Verdict{false, "no ablation"};
    const auto b = column(condition(ablation, "baseline"), &Generation::adherence);
    const auto f = column(condition(ablation, "full"), &Generation::adherence);
    const auto t = sign_test_less(f, b);
    return Verdict{t.p_value < 0.05 && mean_of(f) < mean_of(b),
                   "baseline " + fmt("%.4f", mean_of(b)) + " -> full " + fmt("%.4f", mean_of(f)) + ", sign " +
                       sign_summary(t)};
  });

  check(5, "indicator identity", [&] {
    if (!a.ok) return Verdict{false, "pipeline failed"};
    GuidanceConfig off = config.guidance;
    off.enable_spe = off.enable_dup = off.enable_sim = false;
    GuidanceConfig high = config.guidance;
    high.lambda_min = high.lambda_max = 1.0;
    std::size_t identical = 0;
    const CaptionId caption = ws.corpus.front().caption;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Tensor ref = cfg_sample(ws.checkpoint.params, ws.checkpoint.codec, ws.checkpoint.schedule, caption,
                                    config.guidance.s0, seed);
      if (guided_sample(ctx, caption, off, seed).clip == ref && guided_sample(ctx, caption, high, seed).clip == ref) {
        ++identical;
      }
    }
    return Verdict{identical == 10, std::to_string(identical) + "/10 seeds bit-identical in both settings"};
  });

  check(6, "scale-law bounds", [&] {
    if (all_traces.empty()) return Verdict{false, "no traces"};
    const double s0 = config.guidance.s0;
    std::size_t steps = 0, violations = 0, fired = 0;
    for (const auto* t : all_traces) {
      for (const auto& st : t->steps) {
        ++steps;
        fired += st.fired ? 1 : 0;
        if (!(st.s1 >= 0.0 && st.s1 <= s0 - 1.0)) ++violations;
        if (!(st.s2 >= 0.0 && st.s2 <= s0 - st.s1 - 1.0)) ++violations;
      }
    }
    return Verdict{violations == 0 && have_ablation, std::to_string(violations) + " violations over " +
                                                         std::to_string(steps) + " steps (" + std::to_string(fired) +
                                                         " fired) in " + std::to_string(all_traces.size()) + " traces"};
  });

  check(7, "gradient fidelity", [&] {
    if (!a.ok) return Verdict{false, "pipeline failed"};
    const auto& sched = ws.checkpoint.schedule;
    const auto& params = ws.checkpoint.params;
    RngStream rng(2718);
    struct State {
      Tensor z;
      std::size_t t;
      CaptionId caption;
      Tensor eps;
    };
    std::vector<State> states;
    for (int i = 0; i < 20; ++i) {
      State s;
      s.t = 1 + rng.uniform_index(sched.steps());
      s.caption = static_cast<CaptionId>(rng.uniform_index(params.config.caption_count));
      s.z = gaussian_sample(Shape{params.config.latent_dim}, rng);
      s.eps = cfg_epsilon(denoise(params, s.z, s.t, kNullCaption), denoise(params, s.z, s.t, s.caption),
                          config.guidance.s0);
      states.push_back(std::move(s));
    }
    double worst = 0.0;
    for (auto mode : {SimGradMode::kFullChain, SimGradMode::kKernelOnly}) {
      GuidanceConfig g = config.guidance;
      g.sim_grad_mode = mode;
      for (const auto& s : states) {
        const auto res = dissim_guidance(ctx, s.z, s.t, s.eps, s.caption, g);
        const double factor = g.c3 * std::sqrt(1.0 - sched.alpha_bar(s.t));
        const Tensor analytic = (1.0 / factor) * res.g_sim;
        const Tensor fd = numeric_gradient(
            [&](const Tensor& z) { return similarity_at(ctx, z, s.t, s.eps, s.caption, g, res.neighbor.embedding); },
            s.z, 1e-6);
        worst = std::max(worst, relative_error(analytic, fd));
      }
    }
    // First order: a small step along g_sim lowers sigma.
    GuidanceConfig g = config.guidance;
    g.sim_grad_mode = SimGradMode::kKernelOnly;
    std::size_t lowered = 0, moved = 0;
    for (const auto& s : states) {
      const auto res = dissim_guidance(ctx, s.z, s.t, s.eps, s.caption, g);
      if (norm(res.g_sim) == 0.0) continue;
      ++moved;
      const Tensor eps = s.eps + 1e-4 * res.g_sim;
      const Tensor clip = ws.checkpoint.codec.decode(predict_z0(s.z, eps, s.t, sched));
      if (cosine_sim(ws.spectral.embed(clip), res.neighbor.embedding) < res.sigma) ++lowered;
    }
    return Verdict{worst < 1e-4 && moved > 0 && lowered == moved,
                   "max relative error " + fmt("%.2e", worst) + " over 20 states x 2 modes; sigma lowered in " +
                       std::to_string(lowered) + "/" + std::to_string(moved) + " states at eta=1e-4"};
  });

  check(8, "diffusion algebra", [&] {
    const NoiseSchedule sched = config.make_schedule();
    RngStream rng(31415);
    double inv = 0.0, rollout = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Tensor z0 = gaussian_sample(Shape{32}, rng);
      const Tensor eps = gaussian_sample(Shape{32}, rng);
      for (std::size_t t = 1; t <= sched.steps(); ++t) {
        inv = std::max(inv, max_abs_diff(predict_z0(forward_sample(z0, t, eps, sched), eps, t, sched), z0));
      }
      Tensor z = forward_sample(z0, sched.steps(), eps, sched);
      for (std::size_t t = sched.steps(); t >= 1; --t) z = ddim_step(z, eps, t, sched).z;
      rollout = std::max(rollout, max_abs_diff(z, z0));
    }
    const Tensor z0 = Tensor::vector({1.5, -0.5, 0.0});
    const int n = 10000;
    std::size_t moment_misses = 0;
    for (std::size_t t : {std::size_t{1}, sched.steps() / 2, sched.steps()}) {
      const double ab = sched.alpha_bar(t);
      std::vector<double> sum(3, 0.0), sq(3, 0.0);
      for (int i = 0; i < n; ++i) {
        const Tensor z = forward_sample(z0, t, gaussian_sample(Shape{3}, rng), sched);
        for (int k = 0; k < 3; ++k) {
          sum[k] += z[k];
          sq[k] += z[k] * z[k];
        }
      }
      for (int k = 0; k < 3; ++k) {
        const double mean = sum[k] / n;
        const double var = (sq[k] - n * mean * mean) / (n - 1);
        const double v = 1.0 - ab;
        if (std::abs(mean - std::sqrt(ab) * z0[k]) > 3.0 * std::sqrt(v / n)) ++moment_misses;
        if (std::abs(var - v) > 3.0 * v * std::sqrt(2.0 / (n - 1))) ++moment_misses;
      }
    }
    return Verdict{inv < 1e-12 && rollout < 1e-10 && moment_misses == 0,
                   "inverse error " + fmt("%.2e", inv) + " (< 1e-12), rollout error " + fmt("%.2e", rollout) +
                       " (< 1e-10), " + std::to_string(moment_misses) + "/18 moments outside 3 sigma"};
  });

  check(9, "metric correctness", [&] {
    RngStream rng(161);
    const Tensor x = gaussian_points(40, 4, rng);
    const double self = frechet_distance(x, x);
    const Tensor one = Tensor::matrix(1, 1, {1.0});
    const double closed = frechet_from_moments(Tensor::vector({0.0}), one, Tensor::vector({1.0}), one);

    std::vector<double> null;
    for (int i = 0; i < 200; ++i) {
      const Tensor p = gaussian_points(12, 3, rng), q = gaussian_points(12, 3, rng);
      null.push_back(kernel_distance(p, q));
    }
    const double m = mean_of(null);
    double var = 0.0;
    for (double v : null) var += (v - m) * (v - m);
    const double se = std::sqrt(var / static_cast<double>(null.size() - 1) / static_cast<double>(null.size()));

    const Corpus corpus = build_corpus(config.corpus);
    const Embedder e(config.embedder_for(EmbedderKind::kSpectral));
    const auto idx = build_index(corpus, e);
    std::size_t mismatches = 0;
    for (int q = 0; q < 1000; ++q) {
      const Tensor query = normalized(gaussian_sample(Shape{idx.dim()}, rng));
      std::size_t best = 0;
      double best_sim = -2.0;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < idx.dim(); ++j) s += query[j] * idx.rows().at(i, j);
        if (s > best_sim) {
          best_sim = s;
          best = i;
        }
      }
      if (nearest_neighbor(idx, query).record_id != idx.ids()[best]) ++mismatches;
    }
    const bool pass = self < 1e-8 && closed == 1.0 && std::abs(m) < 3.0 * se && mismatches == 0;
    return Verdict{pass, "FD(x, x) " + fmt("%.2e", self) + ", 1-D closed form " + fmt("%.17g", closed) +
                             ", MMD null mean " + fmt("%.2e", m) + " (3 se " + fmt("%.2e", 3.0 * se) + "), " +
                             std::to_string(mismatches) + "/1000 NN mismatches"};
  });

  check(10, "self-similarity diagonality", [&] {
    if (!have_ablation) return Verdict{false, "no ablation"};
    const auto b = column(condition(ablation, "baseline"), &Generation::diagonality);
    const auto f = column(condition(ablation, "full"), &Generation::diagonality);
    const auto t = sign_test_less(f, b);
    return Verdict{t.p_value < 0.05 && t.wins > t.losses,
                   "baseline mean " + fmt("%.4f", mean_of(b)) + ", full mean " + fmt("%.4f", mean_of(f)) +
                       ", sign " + sign_summary(t)};
  });

  check(11, "end-to-end reproducibility", [&] {
    if (!a.ok) return Verdict{false, "run A failed at " + a.failed_step};
    std::cout << "pipeline run B ..." << std::endl;
    const PipelineRun b = run_pipeline(run_b);
    if (!b.ok) return Verdict{false, "run B failed at " + b.failed_step};
    std::size_t compared = 0, differing = 0;
    std::string first_diff;
    for (const auto& entry : fs::recursive_directory_iterator(run_a)) {
      if (!entry.is_regular_file()) continue;
      const auto ext = entry.path().extension();
      if (ext != ".csv" && ext != ".svg" && ext != ".md") continue;
      const fs::path other = run_b / fs::relative(entry.path(), run_a);
      ++compared;
      if (!fs::is_regular_file(other) || slurp(entry.path()) != slurp(other)) {
        ++differing;
        if (first_diff.empty()) first_diff = fs::relative(entry.path(), run_a).string();
      }
    }
    const double slowest = std::max(a.total_seconds, b.total_seconds);
    return Verdict{differing == 0 && compared > 0 && slowest <= 600.0,
                   std::to_string(compared) + " CSV/SVG/MD files, " + std::to_string(differing) + " differ" +
                       (first_diff.empty() ? "" : " (first: " + first_diff + ")") + "; slowest run " +
                       fmt("%.1f", slowest) + " s (<= 600 s)"};
  });

  std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criterion(s) FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
