#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "echosim/audio/spatial.hpp"
#include "echosim/audio/synth.hpp"
#include "echosim/audio/wav.hpp"
#include "echosim/error.hpp"
#include "echosim/text.hpp"

namespace echosim::audio {

// Immutable set of tracks shared read-only by every environment instance.
//
//   target       the music track the agent has to find
//   distractors  other music tracks, sampled per episode for the remaining pillars
//   cues         instruction cue per pillar visual id (1..6)
struct TrackBank {
  int sample_rate = 22050;
  TrackPtr target;
  std::vector<TrackPtr> distractors;
  std::map<int, TrackPtr> cues;
};

using TrackBankPtr = std::shared_ptr<const TrackBank>;

// Parses "synth:waveform=sine,freq=220,seed=3,duration=2" into a SynthSpec.
inline SynthSpec parse_synth_spec(const std::string& text, int sample_rate) {
  const std::string prefix = "synth:";
  if (text.rfind(prefix, 0) != 0) throw ConfigError("synth spec must start with 'synth:': " + text);
  SynthSpec spec;
  spec.sample_rate = sample_rate;
  std::stringstream ss(text.substr(prefix.size()));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("synth spec: expected key=value, got '" + item + "'");
    const auto key = trim(item.substr(0, eq));
    const auto val = trim(item.substr(eq + 1));
    if (key == "waveform") spec.waveform = parse_waveform(val);
    else if (key == "freq") spec.base_freq = parse_number<double>(val, key);
    else if (key == "seed") spec.pattern_seed = parse_number<std::uint64_t>(val, key);
    else if (key == "duration") spec.duration = parse_number<double>(val, key);
    else if (key == "amplitude") spec.amplitude = parse_number<double>(val, key);
    else if (key == "note") spec.note_seconds = parse_number<double>(val, key);
    else if (key == "notes") spec.pattern_notes = parse_number<int>(val, key);
    else if (key == "range") spec.semitone_range = parse_number<int>(val, key);
    else throw ConfigError("synth spec: unknown key '" + key + "'");
  }
  return spec;
}

inline TrackBank default_track_bank(int sample_rate = 22050) {
  TrackBank bank;
  bank.sample_rate = sample_rate;
  auto make = [&](SynthSpec spec, std::string id) {
    spec.sample_rate = sample_rate;
    return std::make_shared<const SoundTrack>(synth_track(spec, std::move(id)));
  };
  bank.target = make({.waveform = Waveform::kSine, .base_freq = 330.0, .pattern_seed = 1001, .duration = 4.0},
                     "target");
  const double bases[] = {196.0, 220.0, 247.0, 262.0, 294.0, 349.0, 392.0, 440.0};
  for (int i = 0; i < 8; ++i) {
    bank.distractors.push_back(make({.waveform = Waveform::kSine,
                                     .base_freq = bases[i],
                                     .pattern_seed = 2001 + static_cast<std::uint64_t>(i),
                                     .duration = 4.0},
                                    "music." + std::to_string(i)));
  }
  // Short "words": fast triangle-wave syllables, one per pillar visual id.
  for (int id = 1; id <= 6; ++id) {
    bank.cues[id] = make({.waveform = Waveform::kTriangle,
                          .base_freq = 150.0 + 40.0 * id,
                          .pattern_seed = 500 + static_cast<std::uint64_t>(id),
                          .duration = 0.4,
                          .amplitude = 0.6,
                          .note_seconds = 0.05,
                          .pattern_notes = 8,
                          .semitone_range = 12},
                         "cue." + std::to_string(id));
  }
  return bank;
}

// Manifest format, one entry per line ('#' starts a comment):
//
//   target   = music/target.wav
//   music.a  = synth:waveform=sine,freq=220,seed=3,duration=4
//   cue.1    = speech/red.wav
//
// Paths are relative to the manifest's directory. Missing entries fall back
// to nothing; `target` is required.
inline TrackBank load_track_bank(const std::string& manifest_path, int sample_rate) {
  std::ifstream is(manifest_path);
  if (!is) throw ConfigError("track bank: cannot open manifest " + manifest_path);
  const auto base_dir = std::filesystem::path(manifest_path).parent_path();
  TrackBank bank;
  bank.sample_rate = sample_rate;
  for (const auto& [key, value, line_no] : parse_key_values(is, manifest_path)) {
    TrackPtr track;
    if (value.rfind("synth:", 0) == 0) {
      track = std::make_shared<const SoundTrack>(synth_track(parse_synth_spec(value, sample_rate), key));
    } else {
      const auto path = (base_dir / value).string();
      track = std::make_shared<const SoundTrack>(load_wav(read_file(path), sample_rate, key));
    }
    if (key == "target") {
      bank.target = track;
    } else if (key.rfind("music.", 0) == 0) {
      bank.distractors.push_back(track);
    } else if (key.rfind("cue.", 0) == 0) {
      bank.cues[parse_number<int>(key.substr(4), key)] = track;
    } else {
      throw ConfigError(manifest_path + ":" + std::to_string(line_no) + ": unknown track key '" + key + "'");
    }
  }
  if (!bank.target) throw ConfigError("track bank: manifest " + manifest_path + " has no 'target' entry");
  return bank;
}

}  // namespace echosim::audio
