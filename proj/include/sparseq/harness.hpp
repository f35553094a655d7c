#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparseq/agent.hpp"

namespace sparseq {

// One architecture row of an experiment. step_size 0 means "use the default
// for (env, mode, arch)"; mask_path is required for predictive and l1.
struct ArchSpec {
  std::string name;       // dense | random | spatial | predictive | l1
  double step_size = 0.0;
  std::string mask_path;
};

struct ExperimentConfig {
  std::string env_name = "breakout";
  std::string mode = "learned";  // learned | frozen
  std::vector<ArchSpec> architectures;
  int trials = 30;
  long total_steps = 5'000'000;
  std::uint64_t master_seed = 0;
  std::string out_dir = "results";
  int sweep_trials = 5;       // reduced budget for step-size sweeps
  AgentConfig agent;          // gamma/epsilon/buffer/batch/sync/start/sample_period
};

// Published step-size defaults per (environment, hidden mode, architecture).
double default_step_size(const std::string& env_name, const std::string& mode,
                         const std::string& arch);

// Flat key-value text with one [arch] section per architecture; '#' comments.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

// Canonicalized (sorted keys) key=value rendering of the full experiment and
// its fingerprint.
std::string experiment_canonical_text(const ExperimentConfig& config);
std::string experiment_fingerprint(const ExperimentConfig& config);

// Seam for tests: anything that behaves like run_trial.
using TrialRunner = std::function<TrialResult(
    const std::string& env_name, const std::string& mask_source, const AgentConfig& config,
    std::uint64_t seed)>;
TrialRunner default_trial_runner();

// mask_source string for an architecture ("dense", "random", "spatial",
// "predictive:<path>", "l1:<path>").
std::string arch_mask_source(const ArchSpec& arch);

// Resolved AgentConfig for one architecture of an experiment.
AgentConfig arch_agent_config(const ExperimentConfig& config, const ArchSpec& arch);

struct AggregateCurve {
  std::vector<long> steps;
  std::vector<double> means;
  std::vector<double> stderrs;
  int trials = 0;
  std::string config_hash;
};

// Pointwise mean and standard error (sample stdev / sqrt(trials), 0 for a
// single trial) across trials. Summation is over sorted values, so the result
// is invariant to trial order. All trials must share the config hash and the
// sample grid.
AggregateCurve aggregate_trials(const std::vector<TrialResult>& trials);

struct AggregateFile {
  std::string env_name, arch, mode;
  long total_steps = 0;
  AggregateCurve curve;
};
void write_aggregate_csv(const AggregateFile& agg, const std::string& path);
AggregateFile read_aggregate_csv(const std::string& path);

// Runs trials x architectures (bounded worker pool, SPARSE_RL_WORKERS), writes
// per-trial CSVs and one aggregate CSV per architecture into out_dir.
// Mask files are validated before any trial launches. Deterministic: byte
// -identical outputs for identical (config, seeds), serial or parallel.
void run_experiment(const ExperimentConfig& config, const TrialRunner& runner = {});

// Final performance of a curve: mean over its last (up to) 5 sample points.
double final_performance(const AggregateCurve& curve);

struct StepSizeSweepResult {
  // arch -> step size maximizing final performance (ties to the smaller size)
  std::map<std::string, double> selected;
  // rows (arch, step_size, final_performance) in evaluation order
  std::vector<std::tuple<std::string, double, double>> table;
};
StepSizeSweepResult sweep_step_sizes(const ExperimentConfig& config,
                                     const std::vector<double>& grid,
                                     const TrialRunner& runner = {});

// Per-trial L1 statistics of a trained dense network: (mean |phi|, fraction of
// entries strictly below the mean magnitude). Seam for tests.
using L1StatsFn = std::function<std::pair<double, double>(double beta, std::uint64_t seed)>;

struct L1SweepRow {
  double beta = 0.0;
  double mean_abs_phi = 0.0, mean_abs_phi_stderr = 0.0;
  double sparsity = 0.0, sparsity_stderr = 0.0;
};
struct L1SweepResult {
  std::vector<L1SweepRow> rows;
  double selected_beta = 0.0;  // sparsity closest to the 91% target line
};

struct L1SweepBudget {
  int trials = 3;
  std::uint64_t master_seed = 0;
  AgentConfig agent;  // training settings for the dense L1 runs
  double target_sparsity = 0.91;
};

L1SweepResult sweep_l1_beta(const std::string& env_name, const std::vector<double>& grid,
                            const L1SweepBudget& budget, const L1StatsFn& stats = {});
std::string l1_sweep_table_text(const L1SweepResult& result);

// Reads every aggregate CSV under results_dir and emits per-mode figure data
// files (step, mean, mean-stderr, mean+stderr; one block per architecture)
// plus summary.csv with final performance per (arch, mode) and, when a frozen
// aggregate exists for the arch, the frozen curve's final sample as the
// horizontal-baseline column.
void write_report(const std::string& results_dir);

// Bounded worker pool running fn(0..count-1); worker count is
// min(SPARSE_RL_WORKERS or hardware concurrency, count).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace sparseq
