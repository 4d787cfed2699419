#include <CLI11.hpp>

#include <iostream>

#include "meltpinn/cli_io/commands.hpp"
#include "meltpinn/parallel.hpp"

int main(int argc, char** argv) {
  using namespace meltpinn;
  CLI::App app{"Physics-informed solver for phase-change thermal-fluid problems", "meltpinn"};
  app.require_subcommand(1);

  io::CommandOptions opts;
  std::uint64_t seed = 0;
  std::string bench_id;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON run configuration");
    sub->add_option("--out", opts.out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "overrides the training and network seeds");
    sub->add_flag("--full-scale", opts.full_scale, "allow full-size 3D runs");
  };
  auto* train = app.add_subcommand("train", "train a network and write checkpoints and history");
  common(train);
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a grid");
  common(eval);
  eval->add_option("--checkpoint", opts.checkpoint, "checkpoint to evaluate (default <out>/model.ckpt)");
  auto* bench = app.add_subcommand("bench", "run a named benchmark");
  common(bench);
  bench->add_option("id", bench_id, "fem-refine | pinn-refine | hard-vs-soft | mms")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return io::kExitUsage;
  }
  for (auto* sub : {train, eval, bench})
    if (sub->count("--seed")) opts.seed = seed;

  try {
    opts.threads = thread_count_from_env();
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kExitUsage;
  }
  if (*train) return io::cmd_train(opts, std::cerr);
  if (*eval) return io::cmd_eval(opts, std::cerr);
  return io::cmd_bench(bench_id, opts, std::cerr);
}
