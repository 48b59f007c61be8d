#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "echosim/audio/spatial.hpp"
#include "echosim/error.hpp"
#include "echosim/text.hpp"

namespace echosim::world {

enum class Scenario { kMusic, kInstruction, kInstructionOnce };

inline constexpr const char* kScenarioNames[] = {"music", "instruction", "instruction_once"};

inline const char* scenario_name(Scenario s) { return kScenarioNames[static_cast<int>(s)]; }

inline Scenario parse_scenario(const std::string& name) {
  for (int i = 0; i < 3; ++i) {
    if (name == kScenarioNames[i]) return static_cast<Scenario>(i);
  }
  throw ConfigError("unknown scenario '" + name + "' (valid: music, instruction, instruction_once)");
}

struct EnvConfig {
  Scenario scenario = Scenario::kMusic;
  int sample_rate = 22050;
  int tic_rate = 35;
  int frameskip = 4;
  int audio_stack_steps = 0;  // 0 means "same as frameskip"
  int vis_width = 128;
  int vis_height = 72;
  double fov_deg = 90.0;
  int episode_timeout_tics = 2100;

  // Arena: a square split into four rooms by two walls with doorway gaps.
  double arena_size = 16.0;
  double doorway_width = 2.0;
  double pillar_wall_margin = 1.5;
  double pillar_doorway_clearance = 2.5;
  double spawn_clearance = 1.5;

  double touch_radius = 0.6;
  double pillar_radius = 0.3;
  double agent_radius = 0.25;
  double min_separation = 3.0;
  double agent_speed = 2.5;  // m/s
  double turn_step_deg = 10.0;  // per tic

  // Spatialized source defaults.
  double ref_distance = 1.0;
  double rolloff = 4.0;
  double max_distance = 12.0;

  int instruction_gap_tics = 35;
  bool sound_enabled = true;
  std::uint64_t seed = 0;

  int stack_steps() const { return audio_stack_steps == 0 ? frameskip : audio_stack_steps; }
  audio::RenderParams render_params() const { return {sample_rate, tic_rate}; }
  double step_length() const { return agent_speed / tic_rate; }

  void validate() const {
    render_params().validate();
    if (frameskip < 1) throw ConfigError("config: frameskip must be >= 1");
    if (stack_steps() < frameskip) throw ConfigError("config: audio_stack_steps must be >= frameskip");
    if (vis_width < 1 || vis_height < 1) throw ConfigError("config: vis dims must be >= 1");
    if (vis_width > 4096 || vis_height > 4096) throw ConfigError("config: vis dims must be <= 4096");
    if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw ConfigError("config: fov_deg must lie in (0, 180)");
    if (episode_timeout_tics < 1) throw ConfigError("config: episode_timeout_tics must be >= 1");
    if (!(arena_size > 0.0 && doorway_width > 0.0 && doorway_width < arena_size / 4.0)) {
      throw ConfigError("config: need arena_size > 0 and 0 < doorway_width < arena_size/4");
    }
    if (!(touch_radius > 0.0 && pillar_radius > 0.0 && agent_radius > 0.0)) {
      throw ConfigError("config: radii must be positive");
    }
    if (!(min_separation > 2.0 * touch_radius)) throw ConfigError("config: min_separation must exceed 2*touch_radius");
    if (!(agent_speed > 0.0 && turn_step_deg > 0.0)) throw ConfigError("config: speed and turn step must be positive");
    if (!(ref_distance > 0.0 && ref_distance <= max_distance && rolloff >= 0.0)) {
      throw ConfigError("config: need 0 < ref_distance <= max_distance and rolloff >= 0");
    }
    if (instruction_gap_tics < 0) throw ConfigError("config: instruction_gap_tics must be >= 0");
  }
};

namespace detail {

template <class F>
void for_each_field(EnvConfig& c, F&& f) {
  f("sample_rate", c.sample_rate);
  f("tic_rate", c.tic_rate);
  f("frameskip", c.frameskip);
  f("audio_stack_steps", c.audio_stack_steps);
  f("vis_width", c.vis_width);
  f("vis_height", c.vis_height);
  f("fov_deg", c.fov_deg);
  f("episode_timeout_tics", c.episode_timeout_tics);
  f("arena_size", c.arena_size);
  f("doorway_width", c.doorway_width);
  f("pillar_wall_margin", c.pillar_wall_margin);
  f("pillar_doorway_clearance", c.pillar_doorway_clearance);
  f("spawn_clearance", c.spawn_clearance);
  f("touch_radius", c.touch_radius);
  f("pillar_radius", c.pillar_radius);
  f("agent_radius", c.agent_radius);
  f("min_separation", c.min_separation);
  f("agent_speed", c.agent_speed);
  f("turn_step_deg", c.turn_step_deg);
  f("ref_distance", c.ref_distance);
  f("rolloff", c.rolloff);
  f("max_distance", c.max_distance);
  f("instruction_gap_tics", c.instruction_gap_tics);
  f("sound_enabled", c.sound_enabled);
  f("seed", c.seed);
}

}  // namespace detail

inline void set_config_value(EnvConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "scenario") {
    cfg.scenario = parse_scenario(value);
    return;
  }
  bool found = false;
  detail::for_each_field(cfg, [&](const char* name, auto& field) {
    if (key != name) return;
    found = true;
    using T = std::decay_t<decltype(field)>;
    if constexpr (std::is_same_v<T, bool>) {
      field = parse_bool(value, key);
    } else {
      field = parse_number<T>(value, key);
    }
  });
  if (!found) throw ConfigError("config: unknown key '" + key + "'");
}

// Fully-resolved config in the same key = value form the loader accepts.
inline std::string to_config_text(const EnvConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "scenario = " << scenario_name(cfg.scenario) << '\n';
  auto copy = cfg;
  detail::for_each_field(copy, [&](const char* name, auto& field) {
    using T = std::decay_t<decltype(field)>;
    if constexpr (std::is_same_v<T, bool>) {
      os << name << " = " << (field ? "true" : "false") << '\n';
    } else {
      os << name << " = " << field << '\n';
    }
  });
  return os.str();
}

inline EnvConfig parse_config(std::istream& is, const std::string& source, EnvConfig base = {}) {
  for (const auto& kv : parse_key_values(is, source)) {
    try {
      set_config_value(base, kv.key, kv.value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(kv.line) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

inline EnvConfig load_config(const std::string& path, EnvConfig base = {}) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  return parse_config(is, path, base);
}

}  // namespace echosim::world
