// echosim command line: run scenarios, benchmark, extract features, audit.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "echosim/echosim.hpp"

namespace {

using namespace echosim;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
  std::string config_path;
  std::string scenario;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "scenario config file (key = value)");
  cmd->add_option("--scenario", o.scenario, "music | instruction | instruction_once");
  cmd->add_option("--seed", o.seed, "base seed");
}

world::EnvConfig resolve_config(const CommonOpts& o) {
  world::EnvConfig cfg;
  if (!o.config_path.empty()) cfg = world::load_config(o.config_path);
  if (!o.scenario.empty()) cfg.scenario = world::parse_scenario(o.scenario);
  cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

audio::TrackBankPtr resolve_bank(int sample_rate, std::string& source) {
  if (const char* path = std::getenv("ECHOSIM_TRACK_BANK"); path && *path) {
    source = path;
    return std::make_shared<const audio::TrackBank>(audio::load_track_bank(path, sample_rate));
  }
  source = "builtin";
  return std::make_shared<const audio::TrackBank>(audio::default_track_bank(sample_rate));
}

void echo_config(const std::string& command, const world::EnvConfig& cfg, const std::string& bank,
                 const std::vector<std::pair<std::string, std::string>>& extra) {
  std::cout << "# " << command << " resolved config\n";
  std::cout << "track_bank = " << bank << '\n';
  for (const auto& [k, v] : extra) std::cout << k << " = " << v << '\n';
  std::cout << world::to_config_text(cfg) << "# end config\n";
}

// run --------------------------------------------------------------------

struct RunOpts {
  CommonOpts common;
  int episodes = 1;
  std::string policy = "random";
  std::string dump_wav;
  std::string dump_trace;
};

int cmd_run(const RunOpts& o) {
  const auto cfg = resolve_config(o.common);
  const auto policy_kind = world::parse_policy_kind(o.policy);
  if (o.episodes < 1) throw ConfigError("run: --episodes must be >= 1");
  std::string bank_src;
  const auto bank = resolve_bank(cfg.sample_rate, bank_src);
  echo_config("run", cfg, bank_src,
              {{"policy", o.policy}, {"episodes", std::to_string(o.episodes)},
               {"dump_wav", o.dump_wav.empty() ? "-" : o.dump_wav},
               {"dump_trace", o.dump_trace.empty() ? "-" : o.dump_trace}});

  std::ofstream trace;
  if (!o.dump_trace.empty()) {
    trace.open(o.dump_trace);
    if (!trace) throw std::runtime_error("cannot open trace file " + o.dump_trace);
    trace << world::kTraceHeader << '\n';
  }
  if (!o.dump_wav.empty()) std::filesystem::create_directories(o.dump_wav);

  world::Environment env(cfg, bank);
  int successes = 0;
  double total_return = 0.0;
  for (int k = 0; k < o.episodes; ++k) {
    const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
    auto policy = world::make_policy(policy_kind, splitmix64(seed));
    std::optional<world::AudioRecorder> rec;
    if (!o.dump_wav.empty()) rec.emplace(env);
    const auto result = world::episode_rollout(env, seed, *policy, [&](const world::TraceRecord& r, const auto& obs) {
      if (trace.is_open()) world::write_trace_row(trace, r);
      if (rec) rec->append(obs);
    });
    if (rec) {
      const auto path = (std::filesystem::path(o.dump_wav) / ("episode_" + std::to_string(k) + ".wav")).string();
      audio::save_wav(rec->stream(), path);
    }
    successes += result.success() ? 1 : 0;
    total_return += result.episode_return;
    std::cout << "episode " << k << " seed " << seed << " return " << result.episode_return << " length "
              << result.length << " tics " << result.tics << " target " << result.target_id << " touched "
              << result.touched_id << '\n';
  }
  if (trace.is_open() && !trace) throw std::runtime_error("write failed: " + o.dump_trace);
  std::cout << "episodes " << o.episodes << " successes " << successes << " success_rate "
            << static_cast<double>(successes) / o.episodes << " mean_return " << total_return / o.episodes << '\n';
  return 0;
}

// bench ------------------------------------------------------------------

struct BenchOpts {
  CommonOpts common;
  int envs = 64;
  int workers = 4;
  std::uint64_t steps = 1000;
  std::string sound = "on";
  std::string csv;
  std::string policy = "random";
  int repeat = 1;
};

void print_report(const harness::BenchReport& r) {
  std::cout << "sound " << (r.sound ? "on" : "off") << " envs " << r.n_envs << " workers " << r.n_workers
            << " steps " << r.steps_per_env << " env_frames_total " << r.env_frames_total << " wall_seconds "
            << r.wall_seconds << " fps " << r.frames_per_second << " saturated_samples " << r.saturation_count
            << '\n';
}

int cmd_bench(const BenchOpts& o) {
  const auto cfg = resolve_config(o.common);
  if (o.sound != "on" && o.sound != "off" && o.sound != "both") {
    throw ConfigError("bench: --sound must be on, off or both");
  }
  if (o.repeat < 1) throw ConfigError("bench: --repeat must be >= 1");
  harness::BatchConfig batch;
  batch.n_envs = o.envs;
  batch.n_workers = o.workers;
  batch.steps_per_env = o.steps;
  batch.env_config = cfg;
  batch.base_seed = cfg.seed;
  batch.policy = world::parse_policy_kind(o.policy);
  batch.validate();
  std::string bank_src;
  const auto bank = resolve_bank(cfg.sample_rate, bank_src);
  echo_config("bench", cfg, bank_src,
              {{"envs", std::to_string(o.envs)}, {"workers", std::to_string(o.workers)},
               {"steps", std::to_string(o.steps)}, {"sound", o.sound}, {"policy", o.policy},
               {"repeat", std::to_string(o.repeat)}, {"csv", o.csv.empty() ? "-" : o.csv}});

  // Repeats are interleaved (on, off, on, off, ...); the fastest run of each
  // setting is reported.
  std::optional<harness::BenchReport> best_on, best_off;
  auto run = [&](bool sound, std::optional<harness::BenchReport>& best) {
    batch.sound_enabled = sound;
    const auto report = harness::run_batch(batch, bank).report;
    if (o.repeat > 1) std::cout << "  ";
    print_report(report);
    if (!best || report.frames_per_second > best->frames_per_second) best = report;
  };
  for (int r = 0; r < o.repeat; ++r) {
    if (o.sound != "off") run(true, best_on);
    if (o.sound != "on") run(false, best_off);
  }
  for (const auto* best : {&best_on, &best_off}) {
    if (!*best) continue;
    if (o.repeat > 1) {
      std::cout << "best ";
      print_report(**best);
    }
    if (!o.csv.empty()) harness::append_bench_csv(o.csv, **best);
  }
  if (best_on && best_off) std::cout << "overhead_ratio " << harness::overhead_ratio(*best_on, *best_off) << '\n';
  return 0;
}

// features ---------------------------------------------------------------

struct FeatureOpts {
  std::string wav;
  std::string encoder = "fft";
  std::string out;
  std::size_t stride = 8;
};

int cmd_features(const FeatureOpts& o) {
  dsp::FeatureKind kind;
  if (o.encoder == "stride") kind = dsp::FeatureKind::kStride;
  else if (o.encoder == "fft") kind = dsp::FeatureKind::kLogFft;
  else if (o.encoder == "mel") kind = dsp::FeatureKind::kMel;
  else throw ConfigError("features: unknown encoder '" + o.encoder + "' (valid: stride, fft, mel)");

  std::cout << "# features resolved config\nwav = " << o.wav << "\nencoder = " << o.encoder
            << "\nstride = " << o.stride << "\nout = " << (o.out.empty() ? "-" : o.out) << "\n# end config\n";
  const auto buf = audio::wav_to_stereo(audio::parse_wav(audio::read_file(o.wav)));
  dsp::EncoderOptions opts;
  opts.stride = o.stride;
  const auto features = dsp::encode_stereo(buf, kind, opts);
  const auto dump = dsp::to_dump(features);
  if (const auto* mp = std::get_if<dsp::MelPair>(&features)) {
    std::cout << "shape (2," << mp->first.frames << ',' << mp->first.n_mels << ")\n";
  } else {
    std::cout << "shape (2," << dump.cols << ")\n";
  }
  if (!o.out.empty()) {
    dsp::write_dump(o.out, dump);
    std::cout << "wrote " << o.out << '\n';
  }
  return 0;
}

// audit ------------------------------------------------------------------

struct AuditOpts {
  CommonOpts common;
  int seeds = 5;
  std::size_t steps = 100;
  std::vector<int> workers{1, 4};
};

int cmd_audit(const AuditOpts& o) {
  const auto cfg = resolve_config(o.common);
  if (o.seeds < 1) throw ConfigError("audit: --seeds must be >= 1");
  for (int w : o.workers) {
    if (w < 1) throw ConfigError("audit: worker counts must be >= 1");
  }
  std::string bank_src;
  const auto bank = resolve_bank(cfg.sample_rate, bank_src);
  std::string workers;
  for (std::size_t i = 0; i < o.workers.size(); ++i) workers += (i ? "," : "") + std::to_string(o.workers[i]);
  echo_config("audit", cfg, bank_src,
              {{"seeds", std::to_string(o.seeds)}, {"steps", std::to_string(o.steps)}, {"workers", workers}});

  Rng rng(splitmix64(cfg.seed));
  std::vector<world::Action> script(o.steps);
  for (auto& a : script) a = static_cast<world::Action>(uniform_index(rng, world::kActionCount));
  const auto result = harness::determinism_audit([&] { return world::Environment(cfg, bank); }, cfg.seed, script,
                                                 o.workers, o.seeds);
  if (result.passed) {
    std::cout << "audit PASS: " << o.seeds << " seeds x " << o.steps << " steps identical across workers {" << workers
              << "}\n";
    return 0;
  }
  std::cout << "audit FAIL: " << result.message << '\n';
  return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"echosim: deterministic sound-enabled navigation environment"};
  app.require_subcommand(1);

  RunOpts run;
  auto* run_cmd = app.add_subcommand("run", "roll out episodes with a built-in policy");
  add_common(run_cmd, run.common);
  run_cmd->add_option("--episodes", run.episodes, "number of episodes");
  run_cmd->add_option("--policy", run.policy, "random | noop | oracle");
  run_cmd->add_option("--dump-wav", run.dump_wav, "directory for per-episode stereo WAV dumps");
  run_cmd->add_option("--dump-trace", run.dump_trace, "CSV file for per-step trace records");

  BenchOpts bench;
  auto* bench_cmd = app.add_subcommand("bench", "batch throughput benchmark");
  add_common(bench_cmd, bench.common);
  bench_cmd->add_option("--envs", bench.envs, "environment instances");
  bench_cmd->add_option("--workers", bench.workers, "worker threads");
  bench_cmd->add_option("--steps", bench.steps, "agent steps per environment");
  bench_cmd->add_option("--sound", bench.sound, "on | off | both");
  bench_cmd->add_option("--csv", bench.csv, "append a result row to this CSV file");
  bench_cmd->add_option("--policy", bench.policy, "random | noop | oracle");
  bench_cmd->add_option("--repeat", bench.repeat, "runs per setting; the fastest is reported");

  FeatureOpts feat;
  auto* feat_cmd = app.add_subcommand("features", "encode a WAV file with one audio front-end");
  feat_cmd->add_option("--wav", feat.wav, "input WAV (PCM16 or float32)")->required();
  feat_cmd->add_option("--encoder", feat.encoder, "stride | fft | mel");
  feat_cmd->add_option("--stride", feat.stride, "decimation factor for the stride encoder");
  feat_cmd->add_option("--out", feat.out, "EFV1 feature dump path");

  AuditOpts audit;
  auto* audit_cmd = app.add_subcommand("audit", "check observation streams are identical across worker counts");
  add_common(audit_cmd, audit.common);
  audit_cmd->add_option("--seeds", audit.seeds, "environments (consecutive seeds)");
  audit_cmd->add_option("--steps", audit.steps, "random actions per environment");
  audit_cmd->add_option("--workers", audit.workers, "worker counts to compare")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*bench_cmd) return cmd_bench(bench);
    if (*feat_cmd) return cmd_features(feat);
    if (*audit_cmd) return cmd_audit(audit);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
