// Command-line front end: mask generation and inspection, training runs,
// sweeps, report emission, and raw trajectory dumps.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sparseq/harness.hpp"
#include "sparseq/mask_pipelines.hpp"

using namespace sparseq;

namespace {

std::vector<int> parse_action_list(const std::string& csv) {
  std::vector<int> actions;
  std::stringstream in(csv);
  std::string token;
  while (std::getline(in, token, ',')) actions.push_back(std::stoi(token));
  return actions;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse hidden-layer DQN toolkit"};
  app.require_subcommand(1);

  // gen-mask <kind> --env --out --seed [--steps] [--beta] [--neighborhoods-out]
  auto* gen = app.add_subcommand("gen-mask", "generate a hidden-layer mask file");
  std::string gen_kind, gen_env = "breakout", gen_out, gen_nbhd_out;
  std::uint64_t gen_seed = 0;
  long gen_steps = 5'000'000;
  double gen_beta = -1.0;
  gen->add_option("kind", gen_kind, "random | spatial | predictive | l1")->required();
  gen->add_option("--env", gen_env, "breakout | space_invaders")->required();
  gen->add_option("--out", gen_out, "output mask path")->required();
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--steps", gen_steps, "phase-one training steps (predictive, l1)");
  gen->add_option("--beta", gen_beta, "L1 regularization coefficient (l1 only)");
  gen->add_option("--neighborhoods-out", gen_nbhd_out,
                  "also export the learned neighborhoods (predictive only)");

  // mask stats <file>
  auto* mask_cmd = app.add_subcommand("mask", "mask file utilities");
  auto* stats_cmd = mask_cmd->add_subcommand("stats", "print mask statistics");
  std::string stats_path;
  stats_cmd->add_option("file", stats_path, "SPMASK1 file")->required();

  // train --config <file>
  auto* train = app.add_subcommand("train", "run an experiment from a config file");
  std::string train_config;
  train->add_option("--config", train_config, "experiment config file")->required();

  // sweep --config <file> [--l1] [--grid a,b,c]
  auto* sweep = app.add_subcommand("sweep", "step-size sweep (default) or L1 beta sweep");
  std::string sweep_config, sweep_grid;
  bool sweep_l1 = false;
  sweep->add_option("--config", sweep_config, "experiment config file")->required();
  sweep->add_flag("--l1", sweep_l1, "sweep the L1 coefficient instead of step sizes");
  sweep->add_option("--grid", sweep_grid, "comma-separated grid values");

  // report <dir>
  auto* report = app.add_subcommand("report", "emit figure data and a summary table");
  std::string report_dir;
  report->add_option("dir", report_dir, "results directory with aggregate CSVs")->required();

  // env-dump --env --seed --steps | --actions
  auto* dump = app.add_subcommand("env-dump", "dump a raw trajectory");
  std::string dump_env = "breakout", dump_actions, dump_out;
  std::uint64_t dump_seed = 0;
  long dump_steps = 0;
  dump->add_option("--env", dump_env)->required();
  dump->add_option("--seed", dump_seed);
  dump->add_option("--steps", dump_steps, "number of no-op steps");
  dump->add_option("--actions", dump_actions, "comma-separated action sequence");
  dump->add_option("--out", dump_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      std::unique_ptr<Environment> env = make_environment(gen_env);
      const ObsSpec spec = env->spec();
      const int repeat = default_grouping_repeat(gen_env);
      Mask mask;
      if (gen_kind == "random") {
        mask = gen_random(spec.flat_size(), spec.flat_size(), spec.c, 9, repeat, gen_seed);
      } else if (gen_kind == "spatial") {
        mask = gen_spatial(spec.h, spec.w, spec.c, 3, repeat);
      } else if (gen_kind == "predictive") {
        PanConfig config;
        config.steps = gen_steps;
        NeighborhoodSet set = pan_run(*env, config, gen_seed);
        if (!gen_nbhd_out.empty()) save_neighborhoods(set, gen_nbhd_out);
        mask = neighborhoods_to_mask(set, spec.h, spec.w, spec.c, repeat);
      } else if (gen_kind == "l1") {
        L1Config config;
        config.beta = gen_beta > 0.0 ? gen_beta : (gen_env == "breakout" ? 2.5e-5 : 2e-5);
        config.agent.total_steps = gen_steps;
        config.agent.step_size = default_step_size(gen_env, "learned", "dense");
        config.seed = gen_seed;
        auto [l1_mask, sparsity] = gen_l1(gen_env, config);
        std::printf("achieved sparsity: %.6f\n", sparsity);
        mask = std::move(l1_mask);
      } else {
        std::fprintf(stderr, "unknown mask kind: %s\n", gen_kind.c_str());
        return 1;
      }
      save_mask(mask, gen_out);
      std::printf("wrote %s (%dx%d, sparsity %.4f)\n", gen_out.c_str(), mask.rows(),
                  mask.cols(), mask_sparsity(mask));
    } else if (*stats_cmd) {
      const Mask mask = load_mask(stats_path);
      const MaskStats s = mask_stats(mask);
      std::printf("rows (d):          %d\n", s.rows);
      std::printf("cols (n):          %d\n", s.cols);
      std::printf("grouping repeat:   %d\n", s.grouping_repeat);
      std::printf("ones:              %ld\n", s.ones);
      std::printf("sparsity:          %.6f\n", s.sparsity);
      std::printf("col ones min/mean/max: %d / %.2f / %d\n", s.col_ones_min, s.col_ones_mean,
                  s.col_ones_max);
      std::printf("grouping structure:    %s\n", s.grouping_structure_ok ? "ok" : "violated");
    } else if (*train) {
      run_experiment(load_experiment_config(train_config));
    } else if (*sweep) {
      const ExperimentConfig config = load_experiment_config(sweep_config);
      if (sweep_l1) {
        std::vector<double> grid{1e-6, 1e-5, 2.5e-5, 1e-4};
        if (!sweep_grid.empty()) {
          grid.clear();
          std::stringstream in(sweep_grid);
          std::string token;
          while (std::getline(in, token, ',')) grid.push_back(std::stod(token));
        }
        L1SweepBudget budget;
        budget.trials = config.sweep_trials;
        budget.master_seed = config.master_seed;
        budget.agent = config.agent;
        budget.agent.total_steps = config.total_steps;
        budget.agent.step_size = default_step_size(config.env_name, "learned", "dense");
        const L1SweepResult result = sweep_l1_beta(config.env_name, grid, budget);
        const std::string table = l1_sweep_table_text(result);
        atomic_write_file(config.out_dir + "/l1_sweep_" + config.env_name + ".csv", table);
        std::fputs(table.c_str(), stdout);
        std::printf("selected beta: %.10g\n", result.selected_beta);
      } else {
        std::vector<double> grid{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
        if (!sweep_grid.empty()) {
          grid.clear();
          std::stringstream in(sweep_grid);
          std::string token;
          while (std::getline(in, token, ',')) grid.push_back(std::stod(token));
        }
        const StepSizeSweepResult result = sweep_step_sizes(config, grid);
        std::string table = "arch,step_size,final_performance\n";
        for (const auto& [arch, alpha, perf] : result.table) {
          char line[120];
          std::snprintf(line, sizeof(line), "%s,%.10g,%.10g\n", arch.c_str(), alpha, perf);
          table += line;
        }
        atomic_write_file(config.out_dir + "/step_size_sweep.csv", table);
        std::fputs(table.c_str(), stdout);
        for (const auto& [arch, alpha] : result.selected)
          std::printf("selected %s: %.10g\n", arch.c_str(), alpha);
      }
    } else if (*report) {
      write_report(report_dir);
      std::printf("report written under %s\n", report_dir.c_str());
    } else if (*dump) {
      std::unique_ptr<Environment> env = make_environment(dump_env);
      std::vector<int> actions;
      if (!dump_actions.empty()) actions = parse_action_list(dump_actions);
      else actions.assign(static_cast<std::size_t>(dump_steps), 0);
      if (dump_out.empty()) {
        dump_trajectory(*env, dump_seed, actions, std::cout);
      } else {
        std::ofstream out(dump_out, std::ios::binary);
        dump_trajectory(*env, dump_seed, actions, out);
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
