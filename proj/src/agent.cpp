#include "sparseq/agent.hpp"

#include <cstdio>
#include <sstream>

namespace sparseq {

int default_grouping_repeat(const std::string& env_name) {
  if (env_name == "breakout") return 4;
  if (env_name == "space_invaders") return 3;
  return 1;
}

Mask build_trial_mask(const std::string& env_name, const std::string& mask_source,
                      const ObsSpec& spec, std::uint64_t seed) {
  const int d = spec.flat_size();
  const int repeat = default_grouping_repeat(env_name);
  Mask mask;
  if (mask_source == "dense") {
    mask = all_ones(d, d * repeat);
  } else if (mask_source == "random") {
    mask = gen_random(d, d, spec.c, 9, repeat, derive_seed(seed, 5));
  } else if (mask_source == "spatial") {
    mask = gen_spatial(spec.h, spec.w, spec.c, 3, repeat);
  } else if (mask_source.rfind("predictive:", 0) == 0) {
    mask = load_mask(mask_source.substr(11));
  } else if (mask_source.rfind("l1:", 0) == 0) {
    mask = load_mask(mask_source.substr(3));
  } else {
    throw std::invalid_argument("unknown mask source: " + mask_source);
  }
  if (mask.rows() != d)
    throw std::invalid_argument("mask rows (" + std::to_string(mask.rows()) +
                                ") do not match environment inputs (" + std::to_string(d) +
                                ") for " + env_name);
  return mask;
}

std::map<std::string, std::string> trial_config_kv(const std::string& env_name,
                                                   const std::string& mask_source,
                                                   const AgentConfig& config) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::map<std::string, std::string> kv{
      {"env", env_name},
      {"mask_source", mask_source},
      {"gamma", num(config.gamma)},
      {"epsilon", num(config.epsilon)},
      {"step_size", num(config.step_size)},
      {"buffer_capacity", std::to_string(config.buffer_capacity)},
      {"batch_size", std::to_string(config.batch_size)},
      {"target_sync_period", std::to_string(config.target_sync_period)},
      {"learning_start", std::to_string(config.learning_start)},
      {"total_steps", std::to_string(config.total_steps)},
      {"sample_period", std::to_string(config.sample_period)},
      {"hidden_frozen", config.hidden_frozen ? "1" : "0"},
      {"l1_beta", num(config.l1_beta)},
  };
  const auto colon = mask_source.find(':');
  if (colon != std::string::npos) {
    // Path-based masks: the fingerprint covers the file bytes, not just the path.
    kv["mask_file_hash"] = to_hex(fnv1a(read_file(mask_source.substr(colon + 1))));
  }
  return kv;
}

std::string trial_csv_text(const TrialResult& result) {
  std::string out = "step,episodes,mean_return_100,epsilon,alpha,config_hash\n";
  char line[160];
  for (const TrialSample& s : result.samples) {
    std::snprintf(line, sizeof(line), "%ld,%ld,%.10g,%g,%g,%s\n", s.step, s.episodes,
                  s.mean_return, result.epsilon, result.alpha, result.config_hash.c_str());
    out += line;
  }
  return out;
}

void write_trial_csv(const TrialResult& result, const std::string& path) {
  atomic_write_file(path, trial_csv_text(result));
}

TrialResult read_trial_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) ||
      line != "step,episodes,mean_return_100,epsilon,alpha,config_hash")
    throw std::runtime_error("read_trial_csv: " + path + ": bad header");

  TrialResult result;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TrialSample s;
    char hash[64] = {0};
    double eps = 0.0, alpha = 0.0;
    if (std::sscanf(line.c_str(), "%ld,%ld,%lf,%lf,%lf,%63s", &s.step, &s.episodes,
                    &s.mean_return, &eps, &alpha, hash) != 6)
      throw std::runtime_error("read_trial_csv: " + path + ": bad row: " + line);
    if (!result.config_hash.empty() && result.config_hash != hash)
      throw std::runtime_error("read_trial_csv: " + path + ": inconsistent config hash");
    result.config_hash = hash;
    result.epsilon = eps;
    result.alpha = alpha;
    result.samples.push_back(s);
  }
  return result;
}

}  // namespace sparseq
