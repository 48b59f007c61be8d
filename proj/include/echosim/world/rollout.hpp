#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>

#include "echosim/audio/wav.hpp"
#include "echosim/world/env.hpp"
#include "echosim/world/policy.hpp"

namespace echosim::world {

struct EpisodeResult {
  double episode_return = 0.0;
  std::uint64_t length = 0;  // agent steps
  std::uint64_t tics = 0;
  int touched_id = 0;
  int target_id = 0;

  bool success() const { return episode_return > 0.0; }
};

struct TraceRecord {
  std::uint64_t tic = 0;
  Action action = Action::kNoop;
  double reward = 0.0;
  bool done = false;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

using StepObserver = std::function<void(const TraceRecord&, const Observation&)>;

// reset(seed), then step the policy until the episode ends (touch or timeout).
inline EpisodeResult episode_rollout(Environment& env, std::uint64_t seed, Policy& policy,
                                     const StepObserver& on_step = {}) {
  const Observation* obs = &env.reset(seed);
  EpisodeResult result;
  result.target_id = obs->info.target_id;
  while (!obs->done) {
    const Action a = policy.act(*obs, env);
    obs = &env.step(a);
    ++result.length;
    if (on_step) {
      const auto& pose = env.state().agent;
      on_step({obs->info.tic, a, obs->reward, obs->done, pose.position.x, pose.position.y, pose.heading}, *obs);
    }
  }
  result.episode_return = env.state().episode_return;
  result.tics = env.state().tic;
  result.touched_id = env.state().touched_id;
  return result;
}

inline constexpr const char* kTraceHeader = "tic,action,reward,done,x,y,heading";

inline void write_trace_row(std::ostream& os, const TraceRecord& r) {
  os << r.tic << ',' << action_name(r.action) << ',' << r.reward << ',' << (r.done ? 1 : 0) << ',' << r.x << ','
     << r.y << ',' << r.heading << '\n';
}

// Accumulates the audio stream of one episode for a stereo WAV dump. Only
// the newest frameskip worth of samples in each observation is new audio.
class AudioRecorder {
 public:
  explicit AudioRecorder(const Environment& env)
      : step_samples_(audio::samples_per_step(env.config().render_params(), env.config().frameskip)) {
    stream_.sample_rate = env.config().sample_rate;
  }

  void append(const Observation& obs) {
    const std::size_t off = obs.audio.size() - step_samples_;
    stream_.left.insert(stream_.left.end(), obs.audio.left.begin() + static_cast<std::ptrdiff_t>(off),
                        obs.audio.left.end());
    stream_.right.insert(stream_.right.end(), obs.audio.right.begin() + static_cast<std::ptrdiff_t>(off),
                         obs.audio.right.end());
  }

  const AudioBuffer& stream() const { return stream_; }

 private:
  std::size_t step_samples_;
  AudioBuffer stream_;
};

}  // namespace echosim::world
