#include <cstdlib>
#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "log.hpp"

using namespace amg::lab;

int main(int argc, char** argv) {
  CLI::App app{"amg-lab: anti-memorization guidance for diffusion sampling, at desk scale"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool no_spe = false, no_dup = false, no_sim = false, full_amg = false;
  std::size_t count = 1;
  std::uint32_t caption = 0;
  std::size_t stride = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration");
    cmd->add_option("--out", out_dir, "Run directory (overrides the config's \"out\")");
    cmd->add_option("--seed", seed, "Base seed (overrides the config's \"seed\")");
  };
  auto* gen = app.add_subcommand("gen-data", "Synthesize the corpus and its manifest");
  auto* train = app.add_subcommand("train", "Fit the codec and train the denoiser");
  auto* sample = app.add_subcommand("sample", "Generate clips with per-step traces");
  auto* ablate = app.add_subcommand("ablate", "Run all eight guidance conditions and write tables and figures");
  auto* report = app.add_subcommand("report", "Collect ablation outputs into report.md");
  for (auto* cmd : {gen, train, sample, ablate, report}) add_common(cmd);
  for (auto* cmd : {sample, ablate}) {
    cmd->add_flag("--no-spe", no_spe, "Disable despecification guidance");
    cmd->add_flag("--no-dup", no_dup, "Disable caption deduplication guidance");
    cmd->add_flag("--no-sim", no_sim, "Disable dissimilarity guidance");
    cmd->add_flag("--full-amg", full_amg, "Enable all three strategies");
    cmd->add_option("--stride", stride, "Steps between nearest-neighbour refreshes")->check(CLI::PositiveNumber);
  }
  sample->add_option("--count", count, "Number of clips (seeds base .. base+count-1)")->check(CLI::PositiveNumber);
  sample->add_option("--caption", caption, "Caption id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    init_logging();
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out_dir.empty()) config.out = out_dir;
    for (auto* cmd : {gen, train, sample, ablate, report}) {
      if (app.got_subcommand(cmd) && cmd->count("--seed") > 0) config.seed = seed;
    }
    if (full_amg) {
      config.guidance.enable_spe = config.guidance.enable_dup = config.guidance.enable_sim = true;
    }
    if (no_spe) config.guidance.enable_spe = false;
    if (no_dup) config.guidance.enable_dup = false;
    if (no_sim) config.guidance.enable_sim = false;
    if (stride > 0) config.guidance.nn_refresh_stride = stride;
    config.finalize();

    if (app.got_subcommand(gen)) {
      cmd_gen_data(config);
    } else if (app.got_subcommand(train)) {
      cmd_train(config);
    } else if (app.got_subcommand(sample)) {
      cmd_sample(config, SampleOptions{caption, count, config.seed});
    } else if (app.got_subcommand(ablate)) {
      cmd_ablate(config);
    } else if (app.got_subcommand(report)) {
      cmd_report(config.out);
    }
  } catch (const std::exception& e) {
    const int rc = exit_code_for_current_exception();
    std::cerr << "error: " << e.what() << '\n';
    return rc;
  }
  return kExitOk;
}
