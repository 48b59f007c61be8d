#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "echosim/audio/spatial.hpp"
#include "echosim/audio/track_bank.hpp"
#include "echosim/audio_buffer.hpp"
#include "echosim/error.hpp"
#include "echosim/geometry.hpp"
#include "echosim/hash.hpp"
#include "echosim/random.hpp"
#include "echosim/world/arena.hpp"
#include "echosim/world/config.hpp"

namespace echosim::world {

enum class Action : int { kForward = 0, kBackward = 1, kTurnLeft = 2, kTurnRight = 3, kNoop = 4 };

inline constexpr int kActionCount = 5;
inline constexpr const char* kActionNames[] = {"forward", "backward", "turn_left", "turn_right", "noop"};
inline const char* action_name(Action a) { return kActionNames[static_cast<int>(a)]; }

inline Action action_from_int(int a) {
  if (a < 0 || a >= kActionCount) throw ContractError("invalid action " + std::to_string(a) + " (expected 0..4)");
  return static_cast<Action>(a);
}

inline constexpr int kPillarCount = 6;

struct Pillar {
  Vec2 position;
  int visual_id = 0;  // 1..6
  std::string track_id;
  bool is_target = false;
};

struct EnvState {
  audio::ListenerPose agent;
  std::array<Pillar, kPillarCount> pillars{};
  std::vector<audio::SoundSource> sources;
  std::uint64_t tic = 0;
  bool done = false;
  int target = 0;        // index into pillars
  int touched_id = 0;    // visual id of the pillar touched, 0 if none
  double episode_return = 0.0;
  std::uint64_t episode_seed = 0;
  std::uint64_t saturation_count = 0;
  Rng rng;

  int target_visual_id() const { return pillars[static_cast<std::size_t>(target)].visual_id; }
};

struct VisualObservation {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> ray_ids;      // width; 0 = wall
  std::vector<float> ray_distances;       // width, metres
  std::vector<std::uint8_t> id_image;     // height x width, row-major

  friend bool operator==(const VisualObservation&, const VisualObservation&) = default;
};

struct StepInfo {
  std::uint64_t tic = 0;
  int target_id = 0;  // privileged channel for scripted oracles and tests
  int touched_id = 0;

  friend bool operator==(const StepInfo&, const StepInfo&) = default;
};

struct Observation {
  AudioBuffer audio;
  VisualObservation visual;
  double reward = 0.0;
  bool done = false;
  StepInfo info;

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline std::uint64_t hash_observation(const Observation& obs) {
  Fnv1a h;
  h.range(std::span<const float>(obs.audio.left));
  h.range(std::span<const float>(obs.audio.right));
  h.range(std::span<const std::uint8_t>(obs.visual.ray_ids));
  h.range(std::span<const float>(obs.visual.ray_distances));
  h.range(std::span<const std::uint8_t>(obs.visual.id_image));
  h.value(obs.reward);
  h.value(static_cast<std::uint8_t>(obs.done));
  h.value(obs.info.tic);
  h.value(obs.info.target_id);
  h.value(obs.info.touched_id);
  return h.digest();
}

// Casts the visual fan for `pose` against walls and pillars.
inline void raycast_visual(const Arena& arena, std::span<const Pillar> pillars, const audio::ListenerPose& pose,
                           const EnvConfig& cfg, VisualObservation& out) {
  const int w = cfg.vis_width;
  const int h = cfg.vis_height;
  out.width = w;
  out.height = h;
  out.ray_ids.assign(static_cast<std::size_t>(w), 0);
  out.ray_distances.assign(static_cast<std::size_t>(w), 0.0f);
  out.id_image.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  const double fov = cfg.fov_deg * std::numbers::pi / 180.0;
  const double far = 2.0 * arena.size;
  for (int c = 0; c < w; ++c) {
    const double angle = pose.heading + fov / 2.0 - (c + 0.5) * fov / w;
    const Vec2 dir = direction(angle);
    double best = far;
    int id = 0;
    for (const auto& wall : arena.walls) {
      if (auto t = ray_segment(pose.position, dir, wall); t && *t < best) best = *t;
    }
    for (const auto& p : pillars) {
      if (auto t = ray_circle(pose.position, dir, p.position, cfg.pillar_radius); t && *t < best) {
        best = *t;
        id = p.visual_id;
      }
    }
    out.ray_ids[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(id);
    out.ray_distances[static_cast<std::size_t>(c)] = static_cast<float>(best);
    if (id == 0) continue;
    // Column height ~ 1/distance: a hit 1 m away fills the whole column.
    const auto span = static_cast<int>(std::min<double>(h, std::lround(h / std::max(best, 1e-6))));
    const int top = (h - span) / 2;
    for (int r = top; r < top + span; ++r) {
      out.id_image[static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c)] =
          static_cast<std::uint8_t>(id);
    }
  }
}

// One scenario instance. Single-threaded; distinct instances share only the
// immutable track bank.
class Environment {
 public:
  Environment(EnvConfig cfg, audio::TrackBankPtr bank)
      : cfg_(std::move(cfg)), bank_(std::move(bank)), arena_(make_arena(cfg_.arena_size, cfg_.doorway_width)) {
    cfg_.validate();
    if (!bank_) throw ConfigError("environment: track bank is null");
    if (bank_->sample_rate != cfg_.sample_rate) {
      throw ConfigError("environment: track bank sample rate " + std::to_string(bank_->sample_rate) +
                        " differs from config sample rate " + std::to_string(cfg_.sample_rate));
    }
    step_samples_ = audio::samples_per_step(cfg_.render_params(), cfg_.frameskip);
    stack_samples_ = audio::samples_per_step(cfg_.render_params(), cfg_.stack_steps());
  }

  const EnvConfig& config() const { return cfg_; }
  const Arena& arena() const { return arena_; }
  const EnvState& state() const { return state_; }
  const Observation& observation() const { return obs_; }
  std::size_t audio_samples() const { return stack_samples_; }

  const Observation& reset(std::uint64_t seed) {
    state_ = EnvState{};
    state_.rng.seed(seed);
    state_.episode_seed = seed;
    place_pillars();
    place_agent();
    wire_sources();

    obs_.audio = AudioBuffer(stack_samples_, cfg_.sample_rate);
    obs_.reward = 0.0;
    obs_.done = false;
    fill_observation();
    return obs_;
  }

  const Observation& step(Action action) {
    if (state_.done) throw ContractError("step() called on a finished episode; call reset()");
    const double turn = cfg_.turn_step_deg * std::numbers::pi / 180.0;
    const double move = cfg_.step_length();
    for (int t = 0; t < cfg_.frameskip && state_.touched_id == 0; ++t) {
      auto& pose = state_.agent;
      switch (action) {
        case Action::kForward: try_move(move * direction(pose.heading)); break;
        case Action::kBackward: try_move(-move * direction(pose.heading)); break;
        case Action::kTurnLeft: pose.heading = wrap_angle(pose.heading + turn); break;
        case Action::kTurnRight: pose.heading = wrap_angle(pose.heading - turn); break;
        case Action::kNoop: break;
      }
      check_touch();
    }
    state_.tic += static_cast<std::uint64_t>(cfg_.frameskip);

    render_audio();

    obs_.reward = 0.0;
    if (state_.touched_id != 0) {
      obs_.reward = state_.touched_id == state_.target_visual_id() ? 1.0 : 0.0;
      state_.done = true;
    } else if (state_.tic >= static_cast<std::uint64_t>(cfg_.episode_timeout_tics)) {
      state_.done = true;
    }
    state_.episode_return += obs_.reward;
    obs_.done = state_.done;
    fill_observation();
    return obs_;
  }

 private:
  void place_pillars() {
    auto& rng = state_.rng;
    constexpr int kLayoutAttempts = 200;
    constexpr int kPointAttempts = 200;
    for (int layout = 0; layout < kLayoutAttempts; ++layout) {
      // Every room gets a pillar; the last two land in random rooms.
      std::array<int, kPillarCount> rooms{0, 1, 2, 3, 0, 0};
      for (int i = 3; i > 0; --i) std::swap(rooms[i], rooms[uniform_index(rng, i + 1)]);
      rooms[4] = static_cast<int>(uniform_index(rng, 4));
      rooms[5] = static_cast<int>(uniform_index(rng, 4));
      bool ok = true;
      for (int i = 0; i < kPillarCount && ok; ++i) {
        const auto& room = arena_.rooms[static_cast<std::size_t>(rooms[i])];
        ok = false;
        for (int attempt = 0; attempt < kPointAttempts; ++attempt) {
          const double m = cfg_.pillar_wall_margin;
          if (room.hi.x - room.lo.x <= 2 * m || room.hi.y - room.lo.y <= 2 * m) break;
          const Vec2 p{uniform(rng, room.lo.x + m, room.hi.x - m), uniform(rng, room.lo.y + m, room.hi.y - m)};
          bool clear = true;
          for (int j = 0; j < i && clear; ++j) {
            clear = distance(p, state_.pillars[static_cast<std::size_t>(j)].position) >= cfg_.min_separation;
          }
          for (const auto& d : arena_.doorways) clear = clear && distance(p, d) >= cfg_.pillar_doorway_clearance;
          if (clear) {
            state_.pillars[static_cast<std::size_t>(i)].position = p;
            ok = true;
            break;
          }
        }
      }
      if (!ok) continue;
      std::array<int, kPillarCount> ids{1, 2, 3, 4, 5, 6};
      for (int i = kPillarCount - 1; i > 0; --i) std::swap(ids[i], ids[uniform_index(rng, i + 1)]);
      for (int i = 0; i < kPillarCount; ++i) state_.pillars[static_cast<std::size_t>(i)].visual_id = ids[i];
      state_.target = static_cast<int>(uniform_index(rng, kPillarCount));
      state_.pillars[static_cast<std::size_t>(state_.target)].is_target = true;
      return;
    }
    throw ConfigError("reset: could not place " + std::to_string(kPillarCount) + " pillars with min separation " +
                      std::to_string(cfg_.min_separation) + " m in arena of size " + std::to_string(cfg_.arena_size));
  }

  void place_agent() {
    auto& rng = state_.rng;
    const double margin = cfg_.agent_radius + 0.25;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const Vec2 p{uniform(rng, margin, arena_.size - margin), uniform(rng, margin, arena_.size - margin)};
      if (arena_.wall_distance(p) < margin) continue;
      bool clear = true;
      for (const auto& pillar : state_.pillars) clear = clear && distance(p, pillar.position) >= cfg_.spawn_clearance;
      if (!clear) continue;
      state_.agent.position = p;
      state_.agent.heading = wrap_angle(uniform(rng, -std::numbers::pi, std::numbers::pi));
      return;
    }
    throw ConfigError("reset: could not find a free agent start position");
  }

  audio::SoundSource spatial_source(audio::TrackPtr track, Vec2 pos) {
    auto src = audio::make_source(std::move(track), pos);
    src.loop = true;
    src.ref_distance = cfg_.ref_distance;
    src.rolloff = cfg_.rolloff;
    src.max_distance = cfg_.max_distance;
    src.playhead = uniform_index(state_.rng, src.track->size());
    return src;
  }

  void wire_sources() {
    auto& rng = state_.rng;
    if (cfg_.scenario == Scenario::kMusic) {
      if (!bank_->target) throw ConfigError("music scenario: track bank has no target track");
      if (bank_->distractors.size() < kPillarCount - 1) {
        throw ConfigError("music scenario: need a target track plus at least " + std::to_string(kPillarCount - 1) +
                          " distractor tracks, bank has " + std::to_string(bank_->distractors.size()));
      }
      std::vector<std::size_t> order(bank_->distractors.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::size_t next = 0;
      for (auto& pillar : state_.pillars) {
        audio::TrackPtr track;
        if (pillar.is_target) {
          track = bank_->target;
        } else {
          // Partial Fisher-Yates: draw without replacement.
          std::swap(order[next], order[next + uniform_index(rng, order.size() - next)]);
          track = bank_->distractors[order[next++]];
        }
        pillar.track_id = track->id;
        state_.sources.push_back(spatial_source(track, pillar.position));
      }
      return;
    }

    const int cue_id = state_.target_visual_id();
    const auto it = bank_->cues.find(cue_id);
    if (it == bank_->cues.end() || !it->second) {
      throw ConfigError("instruction scenario: cue bank has no cue for visual id " + std::to_string(cue_id));
    }
    const std::size_t spt = cfg_.render_params().samples_per_tic();
    const std::size_t len = it->second->size();
    const std::size_t len_tics = (len + spt - 1) / spt;
    auto src = audio::make_source(it->second, state_.agent.position);
    src.spatialized = false;
    src.playhead = 0;
    if (cfg_.scenario == Scenario::kInstructionOnce) {
      src.loop = false;
      src.gap = 0;
    } else {
      // Cue onsets fall on tics k * (len_tics + gap_tics).
      src.loop = true;
      src.gap = len_tics * spt - len + static_cast<std::size_t>(cfg_.instruction_gap_tics) * spt;
    }
    state_.sources.push_back(std::move(src));
  }

  bool free_at(Vec2 p) const { return arena_.inside(p) && arena_.wall_distance(p) >= cfg_.agent_radius; }

  // Wall sliding: full move, else the x component, else the y component.
  void try_move(Vec2 delta) {
    auto& pos = state_.agent.position;
    for (Vec2 d : {delta, Vec2{delta.x, 0.0}, Vec2{0.0, delta.y}}) {
      if (free_at(pos + d)) {
        pos = pos + d;
        return;
      }
    }
  }

  void check_touch() {
    for (const auto& p : state_.pillars) {
      if (distance(state_.agent.position, p.position) <= cfg_.touch_radius) {
        state_.touched_id = p.visual_id;
        return;
      }
    }
  }

  void render_audio() {
    if (!cfg_.sound_enabled) return;
    auto& left = obs_.audio.left;
    auto& right = obs_.audio.right;
    if (stack_samples_ > step_samples_) {
      std::move(left.begin() + static_cast<std::ptrdiff_t>(step_samples_), left.end(), left.begin());
      std::move(right.begin() + static_cast<std::ptrdiff_t>(step_samples_), right.end(), right.begin());
    }
    const std::size_t off = stack_samples_ - step_samples_;
    const auto stats = audio::render_into(state_.sources, state_.agent, std::span<float>(left).subspan(off),
                                          std::span<float>(right).subspan(off));
    state_.saturation_count += stats.clamped;
  }

  void fill_observation() {
    raycast_visual(arena_, state_.pillars, state_.agent, cfg_, obs_.visual);
    obs_.info.tic = state_.tic;
    obs_.info.target_id = state_.target_visual_id();
    obs_.info.touched_id = state_.touched_id;
  }

  EnvConfig cfg_;
  audio::TrackBankPtr bank_;
  Arena arena_;
  std::size_t step_samples_ = 0;
  std::size_t stack_samples_ = 0;
  EnvState state_;
  Observation obs_;
};

}  // namespace echosim::world
