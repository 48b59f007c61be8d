#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "echosim/harness/audit.hpp"
#include "echosim/harness/batch.hpp"

using namespace echosim;
using namespace echosim::harness;
using echosim::world::Action;

namespace {

audio::TrackBankPtr bank() {
  static const auto b = std::make_shared<const audio::TrackBank>(audio::default_track_bank());
  return b;
}

std::vector<Action> script(int n) {
  std::vector<Action> s;
  Rng rng(3);
  for (int i = 0; i < n; ++i) s.push_back(static_cast<Action>(uniform_index(rng, world::kActionCount)));
  return s;
}

// Each instance perturbs its seeds differently: replays cannot agree.
struct UnseededEnv {
  static inline std::atomic<std::uint64_t> counter{0};
  world::Environment env{world::EnvConfig{}, bank()};
  std::uint64_t salt = ++counter;

  const world::Observation& reset(std::uint64_t seed) { return env.reset(seed ^ (salt << 20)); }
  const world::Observation& step(Action a) { return env.step(a); }
};

}  // namespace

TEST(RunBatch, FrameAccounting) {
  BatchConfig cfg;
  cfg.steps_per_env = 10;
  const auto r = run_batch(cfg, bank());
  EXPECT_EQ(r.report.env_frames_total, 40u);
  EXPECT_EQ(r.report.frameskip, 4);
  EXPECT_EQ(r.report.scenario, "music");
  ASSERT_EQ(r.envs.size(), 1u);
  EXPECT_EQ(r.envs[0].steps, 10u);
  EXPECT_GT(r.report.frames_per_second, 0.0);

  cfg.n_envs = 5;
  cfg.n_workers = 2;
  const auto r2 = run_batch(cfg, bank());
  EXPECT_EQ(r2.report.env_frames_total, 200u);
  ASSERT_EQ(r2.report.workers.size(), 2u);
  EXPECT_EQ(r2.report.workers[0].n_envs, 3);
  EXPECT_EQ(r2.report.workers[1].n_envs, 2);
  EXPECT_EQ(r2.report.workers[0].env_frames + r2.report.workers[1].env_frames, 200u);
}

TEST(RunBatch, ResultsIndependentOfWorkerCount) {
  BatchConfig cfg;
  cfg.n_envs = 8;
  cfg.steps_per_env = 300;
  cfg.hash_observations = true;
  cfg.base_seed = 100;
  cfg.policy = world::PolicyKind::kOracle;
  cfg.n_workers = 1;
  const auto one = run_batch(cfg, bank());
  cfg.n_workers = 8;
  const auto eight = run_batch(cfg, bank());
  cfg.n_workers = 3;
  const auto three = run_batch(cfg, bank());
  EXPECT_EQ(one.envs, eight.envs);
  EXPECT_EQ(one.envs, three.envs);
  EXPECT_EQ(one.report.saturation_count, eight.report.saturation_count);
  std::uint64_t finished = 0;
  for (const auto& e : one.envs) finished += e.episodes_finished;
  EXPECT_GT(finished, 0u);
}

TEST(RunBatch, MoreWorkersThanEnvs) {
  BatchConfig cfg;
  cfg.n_envs = 2;
  cfg.n_workers = 4;
  cfg.steps_per_env = 5;
  const auto r = run_batch(cfg, bank());
  EXPECT_EQ(r.report.env_frames_total, 40u);
  EXPECT_EQ(r.report.workers[3].n_envs, 0);
}

TEST(RunBatch, SoundFlagOverridesEnvConfig) {
  BatchConfig cfg;
  cfg.steps_per_env = 3;
  cfg.sound_enabled = false;
  EXPECT_FALSE(run_batch(cfg, bank()).report.sound);
}

TEST(RunBatch, InvalidConfig) {
  BatchConfig cfg;
  cfg.n_envs = 0;
  EXPECT_THROW(run_batch(cfg, bank()), ConfigError);
  cfg.n_envs = 1;
  cfg.n_workers = 0;
  EXPECT_THROW(run_batch(cfg, bank()), ConfigError);
}

TEST(RunBatch, ErrorsNameTheSeed) {
  auto no_cues = std::make_shared<audio::TrackBank>(audio::default_track_bank());
  no_cues->cues.clear();
  BatchConfig cfg;
  cfg.env_config.scenario = world::Scenario::kInstruction;
  cfg.base_seed = 7;
  try {
    run_batch(cfg, no_cues);
    FAIL();
  } catch (const BatchError& e) {
    EXPECT_NE(std::string(e.what()).find("env seed 7"), std::string::npos) << e.what();
  }

  // A failure mid-run (reset after a finished episode) is reported too.
  auto cue_one = std::make_shared<audio::TrackBank>(audio::default_track_bank());
  cfg.env_config.episode_timeout_tics = 4;
  cfg.base_seed = 0;
  cfg.steps_per_env = 20;
  // Keep only the cues the initial resets need; later episodes draw others.
  {
    std::set<int> needed;
    world::Environment probe(cfg.env_config, cue_one);
    for (int i = 0; i < cfg.n_envs; ++i) needed.insert(probe.reset(cfg.env_seed(i)).info.target_id);
    for (int id = 1; id <= 6; ++id) {
      if (!needed.count(id)) cue_one->cues.erase(id);
    }
  }
  ASSERT_EQ(cue_one->cues.size(), 1u);
  try {
    run_batch(cfg, cue_one);
    FAIL();
  } catch (const BatchError& e) {
    EXPECT_NE(std::string(e.what()).find("env seed "), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("no cue"), std::string::npos) << e.what();
  }
}

TEST(OverheadRatio, Examples) {
  BenchReport on, off;
  on.scenario = off.scenario = "music";
  on.n_envs = off.n_envs = 64;
  on.frames_per_second = 150.0;
  off.frames_per_second = 200.0;
  EXPECT_DOUBLE_EQ(overhead_ratio(on, off), 0.75);
  off.frames_per_second = 150.0;
  EXPECT_DOUBLE_EQ(overhead_ratio(on, off), 1.0);

  auto bad = off;
  bad.n_workers = 8;
  EXPECT_THROW(overhead_ratio(on, bad), ComparisonError);
  bad = off;
  bad.scenario = "instruction";
  EXPECT_THROW(overhead_ratio(on, bad), ComparisonError);
  bad = off;
  bad.frames_per_second = 0.0;
  EXPECT_THROW(overhead_ratio(on, bad), ComparisonError);
}

TEST(BenchCsv, HeaderOnceThenRows) {
  const auto path = (std::filesystem::temp_directory_path() / "echosim_bench_test.csv").string();
  std::filesystem::remove(path);
  BenchReport r;
  r.scenario = "music";
  r.n_envs = 4;
  r.n_workers = 2;
  r.sound = false;
  r.steps_per_env = 10;
  r.frameskip = 4;
  r.env_frames_total = 160;
  r.wall_seconds = 0.5;
  r.frames_per_second = 320;
  append_bench_csv(path, r);
  append_bench_csv(path, r);
  std::ifstream is(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(is, line);) lines.push_back(line);
  std::filesystem::remove(path);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], kBenchCsvHeader);
  EXPECT_EQ(lines[1], "music,4,2,off,10,4,160,0.5,320");
  EXPECT_EQ(lines[1], lines[2]);
}

TEST(DeterminismAudit, PassesForTheEnvironment) {
  const auto s = script(100);
  const std::vector<int> workers{1, 4, 2};
  for (auto sc : {world::Scenario::kMusic, world::Scenario::kInstruction}) {
    world::EnvConfig cfg;
    cfg.scenario = sc;
    const auto r = determinism_audit([&] { return world::Environment(cfg, bank()); }, 11, s, workers);
    EXPECT_TRUE(r.passed) << r.message;
    EXPECT_EQ(r.first_divergent_step, -1);
  }
}

TEST(DeterminismAudit, CatchesUnseededEnvironments) {
  const auto s = script(20);
  const std::vector<int> workers{1, 4};
  const auto r = determinism_audit([] { return UnseededEnv{}; }, 0, s, workers);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.first_divergent_step, 0);
  EXPECT_EQ(r.worker_count, 4);
  EXPECT_NE(r.message.find("step 0"), std::string::npos) << r.message;
}

TEST(RunBatch, ThroughputScalesWithWorkers) {
  if (std::thread::hardware_concurrency() < 4) GTEST_SKIP() << "needs at least 4 hardware threads";
  BatchConfig cfg;
  cfg.n_envs = 16;
  cfg.steps_per_env = 300;
  cfg.n_workers = 1;
  const double one = run_batch(cfg, bank()).report.frames_per_second;
  cfg.n_workers = 4;
  const double four = run_batch(cfg, bank()).report.frames_per_second;
  EXPECT_GT(four, 1.5 * one);
}
