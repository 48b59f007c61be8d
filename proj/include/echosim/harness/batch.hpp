#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "echosim/audio/track_bank.hpp"
#include "echosim/hash.hpp"
#include "echosim/random.hpp"
#include "echosim/world/env.hpp"
#include "echosim/world/policy.hpp"

namespace echosim::harness {

class BatchError : public std::runtime_error {
 public:
  explicit BatchError(const std::string& what) : std::runtime_error(what) {}
};

class ComparisonError : public std::runtime_error {
 public:
  explicit ComparisonError(const std::string& what) : std::runtime_error(what) {}
};

struct BatchConfig {
  int n_envs = 1;
  int n_workers = 1;
  std::uint64_t steps_per_env = 100;
  bool sound_enabled = true;
  world::EnvConfig env_config{};
  std::uint64_t base_seed = 0;
  world::PolicyKind policy = world::PolicyKind::kRandom;
  // Fold every observation into a per-env fingerprint. Costs throughput.
  bool hash_observations = false;

  void validate() const {
    if (n_envs < 1) throw ConfigError("batch: n_envs must be >= 1");
    if (n_workers < 1) throw ConfigError("batch: n_workers must be >= 1");
    env_config.validate();
  }

  std::uint64_t env_seed(int index) const { return base_seed + static_cast<std::uint64_t>(index); }
};

struct WorkerStats {
  int worker = 0;
  int n_envs = 0;
  std::uint64_t env_frames = 0;
  double wall_seconds = 0.0;
};

struct EnvStats {
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  std::uint64_t episodes_finished = 0;
  std::uint64_t successes = 0;
  double total_return = 0.0;
  std::uint64_t fingerprint = 0;

  friend bool operator==(const EnvStats&, const EnvStats&) = default;
};

struct BenchReport {
  std::string scenario;
  int n_envs = 0;
  int n_workers = 0;
  bool sound = true;
  std::uint64_t steps_per_env = 0;
  int frameskip = 0;
  std::uint64_t env_frames_total = 0;  // tics simulated, i.e. steps * frameskip
  double wall_seconds = 0.0;
  double frames_per_second = 0.0;
  std::uint64_t saturation_count = 0;
  std::vector<WorkerStats> workers;
};

struct BatchResult {
  BenchReport report;
  std::vector<EnvStats> envs;
};

// One environment plus its policy, auto-resetting with derived seeds.
class EnvRunner {
 public:
  EnvRunner(const world::EnvConfig& cfg, audio::TrackBankPtr bank, std::uint64_t seed, world::PolicyKind policy)
      : env_(cfg, std::move(bank)), policy_(world::make_policy(policy, splitmix64(seed))) {
    stats_.seed = seed;
    obs_ = &env_.reset(seed);
  }

  void step(bool fingerprint) {
    const auto action = policy_->act(*obs_, env_);
    obs_ = &env_.step(action);
    ++stats_.steps;
    if (fingerprint) fold(world::hash_observation(*obs_));
    if (obs_->done) {
      ++stats_.episodes_finished;
      stats_.total_return += env_.state().episode_return;
      if (env_.state().episode_return > 0.0) ++stats_.successes;
      saturation_ += env_.state().saturation_count;
      obs_ = &env_.reset(derive_seed(stats_.seed, stats_.episodes_finished));
    }
  }

  std::uint64_t saturation() const { return saturation_ + env_.state().saturation_count; }
  const EnvStats& stats() const { return stats_; }

 private:
  void fold(std::uint64_t h) {
    Fnv1a f;
    f.value(stats_.fingerprint);
    f.value(h);
    stats_.fingerprint = f.digest();
  }

  world::Environment env_;
  std::unique_ptr<world::Policy> policy_;
  const world::Observation* obs_ = nullptr;
  EnvStats stats_;
  std::uint64_t saturation_ = 0;
};

// Envs are dealt round-robin to workers; each worker steps its envs
// sequentially. Wall time covers the stepping phase only.
inline BatchResult run_batch(const BatchConfig& cfg, audio::TrackBankPtr bank) {
  cfg.validate();
  auto env_cfg = cfg.env_config;
  env_cfg.sound_enabled = cfg.sound_enabled;

  std::vector<std::unique_ptr<EnvRunner>> runners;
  runners.reserve(static_cast<std::size_t>(cfg.n_envs));
  for (int i = 0; i < cfg.n_envs; ++i) {
    try {
      runners.push_back(std::make_unique<EnvRunner>(env_cfg, bank, cfg.env_seed(i), cfg.policy));
    } catch (const std::exception& e) {
      throw BatchError("env seed " + std::to_string(cfg.env_seed(i)) + ": " + e.what());
    }
  }

  std::vector<WorkerStats> workers(static_cast<std::size_t>(cfg.n_workers));
  std::mutex err_mu;
  std::optional<std::string> error;
  std::atomic<bool> failed{false};

  const auto t0 = std::chrono::steady_clock::now();
  {
    std::vector<std::jthread> threads;
    for (int w = 0; w < cfg.n_workers; ++w) {
      threads.emplace_back([&, w] {
        auto& ws = workers[static_cast<std::size_t>(w)];
        ws.worker = w;
        const auto start = std::chrono::steady_clock::now();
        std::uint64_t current_seed = 0;
        try {
          for (std::uint64_t s = 0; s < cfg.steps_per_env; ++s) {
            for (int i = w; i < cfg.n_envs; i += cfg.n_workers) {
              current_seed = cfg.env_seed(i);
              runners[static_cast<std::size_t>(i)]->step(cfg.hash_observations);
            }
            if (failed.load(std::memory_order_relaxed)) return;
          }
        } catch (const std::exception& e) {
          std::lock_guard lk(err_mu);
          if (!error) error = "env seed " + std::to_string(current_seed) + ": " + e.what();
          failed = true;
          return;
        }
        for (int i = w; i < cfg.n_envs; i += cfg.n_workers) ++ws.n_envs;
        ws.env_frames = static_cast<std::uint64_t>(ws.n_envs) * cfg.steps_per_env *
                        static_cast<std::uint64_t>(env_cfg.frameskip);
        ws.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      });
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (error) throw BatchError("batch aborted: " + *error);

  BatchResult result;
  auto& r = result.report;
  r.scenario = world::scenario_name(env_cfg.scenario);
  r.n_envs = cfg.n_envs;
  r.n_workers = cfg.n_workers;
  r.sound = cfg.sound_enabled;
  r.steps_per_env = cfg.steps_per_env;
  r.frameskip = env_cfg.frameskip;
  r.env_frames_total = static_cast<std::uint64_t>(cfg.n_envs) * cfg.steps_per_env *
                       static_cast<std::uint64_t>(env_cfg.frameskip);
  r.wall_seconds = wall;
  r.frames_per_second = wall > 0.0 ? static_cast<double>(r.env_frames_total) / wall : 0.0;
  r.workers = std::move(workers);
  for (const auto& runner : runners) {
    r.saturation_count += runner->saturation();
    result.envs.push_back(runner->stats());
  }
  return result;
}

// fps with sound divided by fps without; the two runs must otherwise match.
inline double overhead_ratio(const BenchReport& on, const BenchReport& off) {
  if (on.scenario != off.scenario || on.n_envs != off.n_envs || on.n_workers != off.n_workers ||
      on.steps_per_env != off.steps_per_env || on.frameskip != off.frameskip) {
    throw ComparisonError("overhead_ratio: reports differ in more than the sound setting");
  }
  if (!(off.frames_per_second > 0.0)) throw ComparisonError("overhead_ratio: sound-off throughput is zero");
  return on.frames_per_second / off.frames_per_second;
}

inline constexpr const char* kBenchCsvHeader =
    "scenario,n_envs,n_workers,sound,steps_per_env,frameskip,env_frames_total,wall_seconds,frames_per_second";

inline std::string bench_csv_row(const BenchReport& r) {
  std::ostringstream os;
  os << r.scenario << ',' << r.n_envs << ',' << r.n_workers << ',' << (r.sound ? "on" : "off") << ','
     << r.steps_per_env << ',' << r.frameskip << ',' << r.env_frames_total << ',' << r.wall_seconds << ','
     << r.frames_per_second;
  return os.str();
}

// Appends one row, writing the header first when the file is new or empty.
inline void append_bench_csv(const std::string& path, const BenchReport& r) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream os(path, std::ios::app);
  if (!os) throw std::runtime_error("cannot open " + path + " for appending");
  if (fresh) os << kBenchCsvHeader << '\n';
  os << bench_csv_row(r) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace echosim::harness
