#include "sparseq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sparseq/mask_pipelines.hpp"

namespace fs = std::filesystem;

namespace sparseq {

namespace {

std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_mean(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

double default_step_size(const std::string& env_name, const std::string& mode,
                         const std::string& arch) {
  if (env_name == "breakout") return mode == "frozen" ? 0.1 : 1e-4;
  if (env_name == "space_invaders") {
    if (mode == "frozen") return 1e-4;
    return (arch == "spatial" || arch == "l1") ? 1e-5 : 1e-4;
  }
  return 1e-4;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  ArchSpec* current = nullptr;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[' && line.back() == ']') {
      ArchSpec arch;
      arch.name = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known{"dense", "random", "spatial", "predictive", "l1"};
      if (!known.count(arch.name))
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": unknown architecture [" + arch.name + "]");
      config.architectures.push_back(arch);
      current = &config.architectures.back();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (current) {
      if (key == "step_size") current->step_size = std::stod(value);
      else if (key == "mask") current->mask_path = value;
      else
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": unknown architecture key " + key);
      continue;
    }
    if (key == "env") config.env_name = value;
    else if (key == "mode") config.mode = value;
    else if (key == "trials") config.trials = std::stoi(value);
    else if (key == "total_steps") config.total_steps = std::stol(value);
    else if (key == "master_seed") config.master_seed = std::stoull(value);
    else if (key == "out_dir") config.out_dir = value;
    else if (key == "sweep_trials") config.sweep_trials = std::stoi(value);
    else if (key == "gamma") config.agent.gamma = std::stod(value);
    else if (key == "epsilon") config.agent.epsilon = std::stod(value);
    else if (key == "buffer_capacity") config.agent.buffer_capacity = std::stoi(value);
    else if (key == "batch_size") config.agent.batch_size = std::stoi(value);
    else if (key == "target_sync_period") config.agent.target_sync_period = std::stol(value);
    else if (key == "learning_start") config.agent.learning_start = std::stol(value);
    else if (key == "sample_period") config.agent.sample_period = std::stol(value);
    else
      throw std::runtime_error("config line " + std::to_string(line_no) + ": unknown key " + key);
  }

  if (config.mode != "learned" && config.mode != "frozen")
    throw std::runtime_error("config: mode must be 'learned' or 'frozen'");
  if (config.trials < 1) throw std::runtime_error("config: trials must be >= 1");
  if (config.architectures.empty())
    throw std::runtime_error("config: at least one [architecture] section required");
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_file(path));
}

std::string arch_mask_source(const ArchSpec& arch) {
  if (arch.name == "predictive" || arch.name == "l1") {
    if (arch.mask_path.empty())
      throw std::runtime_error("architecture " + arch.name + " requires a mask path");
    return arch.name + ":" + arch.mask_path;
  }
  return arch.name;
}

AgentConfig arch_agent_config(const ExperimentConfig& config, const ArchSpec& arch) {
  AgentConfig agent = config.agent;
  agent.total_steps = config.total_steps;
  agent.hidden_frozen = (config.mode == "frozen");
  agent.step_size = arch.step_size > 0.0
                        ? arch.step_size
                        : default_step_size(config.env_name, config.mode, arch.name);
  agent.l1_beta = 0.0;  // the l1 architecture trains with the plain loss; beta only shapes its mask
  return agent;
}

std::string experiment_canonical_text(const ExperimentConfig& config) {
  std::map<std::string, std::string> kv{
      {"env", config.env_name},
      {"mode", config.mode},
      {"trials", std::to_string(config.trials)},
      {"total_steps", std::to_string(config.total_steps)},
      {"master_seed", std::to_string(config.master_seed)},
      {"gamma", format_num(config.agent.gamma)},
      {"epsilon", format_num(config.agent.epsilon)},
      {"buffer_capacity", std::to_string(config.agent.buffer_capacity)},
      {"batch_size", std::to_string(config.agent.batch_size)},
      {"target_sync_period", std::to_string(config.agent.target_sync_period)},
      {"learning_start", std::to_string(config.agent.learning_start)},
      {"sample_period", std::to_string(config.agent.sample_period)},
  };
  for (const ArchSpec& arch : config.architectures) {
    kv["arch." + arch.name + ".step_size"] =
        format_num(arch.step_size > 0.0
                       ? arch.step_size
                       : default_step_size(config.env_name, config.mode, arch.name));
    if (!arch.mask_path.empty()) kv["arch." + arch.name + ".mask"] = arch.mask_path;
  }
  return canonical_text(kv);
}

std::string experiment_fingerprint(const ExperimentConfig& config) {
  return to_hex(fnv1a(experiment_canonical_text(config)));
}

TrialRunner default_trial_runner() {
  return [](const std::string& env_name, const std::string& mask_source,
            const AgentConfig& config, std::uint64_t seed) {
    return run_trial<float>(env_name, mask_source, config, seed);
  };
}

AggregateCurve aggregate_trials(const std::vector<TrialResult>& trials) {
  if (trials.empty()) throw std::invalid_argument("aggregate_trials: no trials");
  const std::size_t samples = trials.front().samples.size();
  AggregateCurve curve;
  curve.trials = static_cast<int>(trials.size());
  curve.config_hash = trials.front().config_hash;
  for (const TrialResult& t : trials) {
    if (t.config_hash != curve.config_hash)
      throw std::runtime_error("aggregate_trials: mixing trials from different config fingerprints");
    if (t.samples.size() != samples)
      throw std::runtime_error("aggregate_trials: trials disagree on the sample grid");
  }

  std::vector<double> values(trials.size());
  for (std::size_t s = 0; s < samples; ++s) {
    const long step = trials.front().samples[s].step;
    for (std::size_t t = 0; t < trials.size(); ++t) {
      if (trials[t].samples[s].step != step)
        throw std::runtime_error("aggregate_trials: trials disagree on the sample grid");
      values[t] = trials[t].samples[s].mean_return;
    }
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double stderr_ = 0.0;
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      const double stdev = std::sqrt(ss / static_cast<double>(values.size() - 1));
      stderr_ = stdev / std::sqrt(static_cast<double>(values.size()));
    }
    curve.steps.push_back(step);
    curve.means.push_back(mean);
    curve.stderrs.push_back(stderr_);
  }
  return curve;
}

void write_aggregate_csv(const AggregateFile& agg, const std::string& path) {
  std::string out = "# env=" + agg.env_name + " arch=" + agg.arch + " mode=" + agg.mode +
                    " total_steps=" + std::to_string(agg.total_steps) +
                    " trials=" + std::to_string(agg.curve.trials) +
                    " config=" + agg.curve.config_hash + "\n";
  out += "step,mean_return,stderr,trials,config_hash\n";
  char line[160];
  for (std::size_t i = 0; i < agg.curve.steps.size(); ++i) {
    std::snprintf(line, sizeof(line), "%ld,%.10g,%.10g,%d,%s\n", agg.curve.steps[i],
                  agg.curve.means[i], agg.curve.stderrs[i], agg.curve.trials,
                  agg.curve.config_hash.c_str());
    out += line;
  }
  atomic_write_file(path, out);
}

AggregateFile read_aggregate_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw std::runtime_error("read_aggregate_csv: " + path + ": missing metadata line");

  AggregateFile agg;
  std::istringstream meta(line.substr(2));
  std::string token;
  while (meta >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
    if (key == "env") agg.env_name = value;
    else if (key == "arch") agg.arch = value;
    else if (key == "mode") agg.mode = value;
    else if (key == "total_steps") agg.total_steps = std::stol(value);
    else if (key == "trials") agg.curve.trials = std::stoi(value);
    else if (key == "config") agg.curve.config_hash = value;
  }
  if (agg.env_name.empty() || agg.arch.empty() || agg.mode.empty())
    throw std::runtime_error("read_aggregate_csv: " + path + ": incomplete metadata");

  if (!std::getline(in, line) || line != "step,mean_return,stderr,trials,config_hash")
    throw std::runtime_error("read_aggregate_csv: " + path + ": bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long step = 0;
    int trials = 0;
    double mean = 0.0, se = 0.0;
    char hash[64] = {0};
    if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%d,%63s", &step, &mean, &se, &trials, hash) != 5)
      throw std::runtime_error("read_aggregate_csv: " + path + ": bad row: " + line);
    if (hash != agg.curve.config_hash)
      throw std::runtime_error("read_aggregate_csv: " + path + ": inconsistent config hash");
    agg.curve.steps.push_back(step);
    agg.curve.means.push_back(mean);
    agg.curve.stderrs.push_back(se);
  }
  return agg;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  std::size_t workers = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("SPARSE_RL_WORKERS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) workers = static_cast<std::size_t>(parsed);
  }
  workers = std::max<std::size_t>(1, std::min(workers, count));

  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::string trial_file_name(const std::string& arch, const std::string& mode, int trial) {
  return "trial_" + arch + "_" + mode + "_" + std::to_string(trial) + ".csv";
}

std::string aggregate_file_name(const std::string& arch, const std::string& mode) {
  return "agg_" + arch + "_" + mode + ".csv";
}

}  // namespace

void run_experiment(const ExperimentConfig& config, const TrialRunner& runner_in) {
  const TrialRunner runner = runner_in ? runner_in : default_trial_runner();

  // Fail fast on bad or missing masks before any trial starts.
  auto probe_env = make_environment(config.env_name);
  for (const ArchSpec& arch : config.architectures)
    build_trial_mask(config.env_name, arch_mask_source(arch), probe_env->spec(),
                     derive_seed(config.master_seed, 0));

  fs::create_directories(config.out_dir);

  struct Job {
    const ArchSpec* arch;
    int trial;
  };
  std::vector<Job> jobs;
  for (const ArchSpec& arch : config.architectures)
    for (int t = 0; t < config.trials; ++t) jobs.push_back({&arch, t});

  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    const AgentConfig agent = arch_agent_config(config, *job.arch);
    const std::uint64_t seed = derive_seed(config.master_seed, job.trial);
    const TrialResult result =
        runner(config.env_name, arch_mask_source(*job.arch), agent, seed);
    write_trial_csv(result, (fs::path(config.out_dir) /
                             trial_file_name(job.arch->name, config.mode, job.trial))
                                .string());
  });

  for (const ArchSpec& arch : config.architectures) {
    std::vector<TrialResult> trials;
    for (int t = 0; t < config.trials; ++t)
      trials.push_back(read_trial_csv(
          (fs::path(config.out_dir) / trial_file_name(arch.name, config.mode, t)).string()));
    AggregateFile agg;
    agg.env_name = config.env_name;
    agg.arch = arch.name;
    agg.mode = config.mode;
    agg.total_steps = config.total_steps;
    agg.curve = aggregate_trials(trials);
    write_aggregate_csv(
        agg, (fs::path(config.out_dir) / aggregate_file_name(arch.name, config.mode)).string());
  }
}

double final_performance(const AggregateCurve& curve) {
  if (curve.means.empty()) throw std::invalid_argument("final_performance: empty curve");
  const std::size_t window = std::min<std::size_t>(5, curve.means.size());
  double sum = 0.0;
  for (std::size_t i = curve.means.size() - window; i < curve.means.size(); ++i)
    sum += curve.means[i];
  return sum / static_cast<double>(window);
}

StepSizeSweepResult sweep_step_sizes(const ExperimentConfig& config,
                                     const std::vector<double>& grid,
                                     const TrialRunner& runner_in) {
  if (grid.empty()) throw std::invalid_argument("sweep_step_sizes: empty grid");
  const TrialRunner runner = runner_in ? runner_in : default_trial_runner();

  std::vector<double> sorted_grid = grid;
  std::sort(sorted_grid.begin(), sorted_grid.end());

  struct Job {
    const ArchSpec* arch;
    double alpha;
    int trial;
  };
  std::vector<Job> jobs;
  for (const ArchSpec& arch : config.architectures)
    for (double alpha : sorted_grid)
      for (int t = 0; t < config.sweep_trials; ++t) jobs.push_back({&arch, alpha, t});

  std::vector<TrialResult> results(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    AgentConfig agent = arch_agent_config(config, *job.arch);
    agent.step_size = job.alpha;
    results[i] =
        runner(config.env_name, arch_mask_source(*job.arch), agent, derive_seed(config.master_seed, job.trial));
  });

  StepSizeSweepResult out;
  std::size_t cursor = 0;
  for (const ArchSpec& arch : config.architectures) {
    double best_alpha = 0.0, best_perf = 0.0;
    bool have_best = false;
    for (double alpha : sorted_grid) {
      std::vector<TrialResult> trials;
      for (int t = 0; t < config.sweep_trials; ++t) trials.push_back(results[cursor++]);
      const double perf = final_performance(aggregate_trials(trials));
      out.table.emplace_back(arch.name, alpha, perf);
      if (!have_best || perf > best_perf) {  // ascending grid keeps the smaller size on ties
        best_perf = perf;
        best_alpha = alpha;
        have_best = true;
      }
    }
    out.selected[arch.name] = best_alpha;
  }
  return out;
}

L1SweepResult sweep_l1_beta(const std::string& env_name, const std::vector<double>& grid,
                            const L1SweepBudget& budget, const L1StatsFn& stats_in) {
  if (grid.empty()) throw std::invalid_argument("sweep_l1_beta: empty grid");

  L1StatsFn stats = stats_in;
  if (!stats) {
    stats = [&env_name, &budget](double beta, std::uint64_t seed) {
      std::unique_ptr<Environment> env = make_environment(env_name);
      const int d = env->spec().flat_size();
      const Mask dense = all_ones(d, d * default_grouping_repeat(env_name));
      AgentConfig agent_config = budget.agent;
      agent_config.hidden_frozen = false;
      agent_config.l1_beta = beta;
      DqnAgent<float> agent(*env, dense, agent_config, seed);
      for (long step = 0; step < agent_config.total_steps; ++step) agent.train_step();
      const Matrix<double> abs_phi = agent.net().phi.cwiseAbs().cast<double>();
      const double mean_abs = abs_phi.mean();
      const double below =
          static_cast<double>((abs_phi.array() < mean_abs).count()) /
          static_cast<double>(abs_phi.size());
      return std::make_pair(mean_abs, below);
    };
  }

  std::vector<double> sorted_grid = grid;
  std::sort(sorted_grid.begin(), sorted_grid.end());

  std::vector<std::pair<double, double>> cells(sorted_grid.size() * budget.trials);
  parallel_for(cells.size(), [&](std::size_t i) {
    const double beta = sorted_grid[i / budget.trials];
    const int trial = static_cast<int>(i % budget.trials);
    cells[i] = stats(beta, derive_seed(budget.master_seed, trial));
  });

  L1SweepResult out;
  for (std::size_t b = 0; b < sorted_grid.size(); ++b) {
    L1SweepRow row;
    row.beta = sorted_grid[b];
    std::vector<double> mags(budget.trials), fracs(budget.trials);
    for (int t = 0; t < budget.trials; ++t) {
      mags[t] = cells[b * budget.trials + t].first;
      fracs[t] = cells[b * budget.trials + t].second;
    }
    auto mean_stderr = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      double sum = 0.0;
      for (double x : v) sum += x;
      const double mean = sum / static_cast<double>(v.size());
      double se = 0.0;
      if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        se = std::sqrt(ss / static_cast<double>(v.size() - 1)) /
             std::sqrt(static_cast<double>(v.size()));
      }
      return std::make_pair(mean, se);
    };
    std::tie(row.mean_abs_phi, row.mean_abs_phi_stderr) = mean_stderr(mags);
    std::tie(row.sparsity, row.sparsity_stderr) = mean_stderr(fracs);
    out.rows.push_back(row);
  }

  double best_gap = 0.0;
  bool have_best = false;
  for (const L1SweepRow& row : out.rows) {  // ascending betas keep the smaller on ties
    const double gap = std::abs(row.sparsity - budget.target_sparsity);
    if (!have_best || gap < best_gap) {
      best_gap = gap;
      out.selected_beta = row.beta;
      have_best = true;
    }
  }
  return out;
}

std::string l1_sweep_table_text(const L1SweepResult& result) {
  std::string out = "beta,mean_abs_phi,mean_abs_phi_stderr,sparsity,sparsity_stderr,selected\n";
  char line[200];
  for (const L1SweepRow& row : result.rows) {
    std::snprintf(line, sizeof(line), "%.10g,%.10g,%.10g,%.10g,%.10g,%d\n", row.beta,
                  row.mean_abs_phi, row.mean_abs_phi_stderr, row.sparsity,
                  row.sparsity_stderr, row.beta == result.selected_beta ? 1 : 0);
    out += line;
  }
  return out;
}

void write_report(const std::string& results_dir) {
  std::vector<AggregateFile> aggregates;
  if (fs::is_directory(results_dir)) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(results_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("agg_", 0) == 0 && name.size() > 8 && name.ends_with(".csv"))
        names.push_back(entry.path().string());
    }
    std::sort(names.begin(), names.end());
    for (const std::string& name : names) aggregates.push_back(read_aggregate_csv(name));
  }
  if (aggregates.empty())
    throw std::runtime_error("write_report: no aggregate files (expected " + results_dir +
                             "/agg_<arch>_<mode>.csv); run an experiment first");

  const std::string env_name = aggregates.front().env_name;
  for (const AggregateFile& agg : aggregates)
    if (agg.env_name != env_name)
      throw std::runtime_error("write_report: aggregates mix environments (" + env_name +
                               " vs " + agg.env_name + ")");

  std::set<std::string> modes;
  for (const AggregateFile& agg : aggregates) modes.insert(agg.mode);

  for (const std::string& mode : modes) {
    std::string out = "# env=" + env_name + " mode=" + mode + "\n";
    for (const AggregateFile& agg : aggregates) {
      if (agg.mode != mode) continue;
      out += "# arch " + agg.arch + " config=" + agg.curve.config_hash + "\n";
      out += "step\tmean\tlo\thi\n";
      char line[160];
      for (std::size_t i = 0; i < agg.curve.steps.size(); ++i) {
        std::snprintf(line, sizeof(line), "%ld\t%.10g\t%.10g\t%.10g\n", agg.curve.steps[i],
                      agg.curve.means[i], agg.curve.means[i] - agg.curve.stderrs[i],
                      agg.curve.means[i] + agg.curve.stderrs[i]);
        out += line;
      }
      out += "\n";
    }
    atomic_write_file((fs::path(results_dir) / ("figure_" + env_name + "_" + mode + ".dat")).string(),
                      out);
  }

  // Final-performance summary; frozen final sample doubles as the horizontal
  // baseline drawn in the learned-mode figures.
  std::map<std::string, double> frozen_final;
  for (const AggregateFile& agg : aggregates)
    if (agg.mode == "frozen" && !agg.curve.means.empty())
      frozen_final[agg.arch] = agg.curve.means.back();

  std::string summary = "env,arch,mode,final_performance,final_stderr,frozen_baseline\n";
  for (const AggregateFile& agg : aggregates) {
    const double perf = final_performance(agg.curve);
    const double se = agg.curve.stderrs.empty() ? 0.0 : agg.curve.stderrs.back();
    std::string baseline;
    if (auto it = frozen_final.find(agg.arch); it != frozen_final.end())
      baseline = format_mean(it->second);
    summary += env_name + "," + agg.arch + "," + agg.mode + "," + format_mean(perf) + "," +
               format_mean(se) + "," + baseline + "\n";
  }
  atomic_write_file((fs::path(results_dir) / "summary.csv").string(), summary);
}

}  // namespace sparseq
