#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "echosim/audio/spatial.hpp"
#include "echosim/error.hpp"
#include "echosim/random.hpp"

namespace echosim::audio {

enum class Waveform { kSine, kSquare, kTriangle, kSaw };

inline Waveform parse_waveform(const std::string& s) {
  if (s == "sine") return Waveform::kSine;
  if (s == "square") return Waveform::kSquare;
  if (s == "triangle") return Waveform::kTriangle;
  if (s == "saw") return Waveform::kSaw;
  throw ConfigError("unknown waveform '" + s + "' (expected sine, square, triangle or saw)");
}

struct SynthSpec {
  Waveform waveform = Waveform::kSine;
  double base_freq = 220.0;
  std::uint64_t pattern_seed = 1;
  double duration = 2.0;  // seconds
  int sample_rate = 22050;
  double amplitude = 0.5;
  double note_seconds = 0.125;
  int pattern_notes = 8;     // melody repeats after this many notes
  int semitone_range = 24;   // notes drawn from base_freq * 2^(k/12), k in [0, range)
};

// A seeded looping melody: a repeating pattern of constant-pitch segments,
// synthesized with a continuous phase accumulator.
inline SoundTrack synth_track(const SynthSpec& spec, std::string id = {}) {
  if (spec.sample_rate <= 0) throw ConfigError("synth: sample_rate must be positive");
  if (!(spec.base_freq > 0.0 && spec.base_freq < spec.sample_rate / 2.0)) {
    throw ConfigError("synth: base_freq must lie in (0, sample_rate/2)");
  }
  if (spec.duration <= 0.0 || spec.note_seconds <= 0.0 || spec.pattern_notes < 1 || spec.semitone_range < 1) {
    throw ConfigError("synth: duration, note length, pattern and range must be positive");
  }
  if (!(spec.amplitude >= 0.0 && spec.amplitude <= 1.0)) throw ConfigError("synth: amplitude must lie in [0, 1]");
  Rng rng(spec.pattern_seed);
  std::vector<double> pattern(static_cast<std::size_t>(spec.pattern_notes));
  const double nyquist_guard = 0.45 * spec.sample_rate;
  for (auto& f : pattern) {
    const auto k = static_cast<double>(uniform_index(rng, static_cast<std::uint64_t>(spec.semitone_range)));
    f = spec.base_freq * std::pow(2.0, k / 12.0);
    while (f > nyquist_guard) f /= 2.0;
  }

  const auto n = static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate));
  const auto note_len = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(spec.note_seconds * spec.sample_rate)));
  SoundTrack track;
  track.id = std::move(id);
  track.samples.resize(n);
  double phase = 0.0;  // cycles, [0, 1)
  for (std::size_t i = 0; i < n; ++i) {
    const double f = pattern[(i / note_len) % pattern.size()];
    double v = 0.0;
    switch (spec.waveform) {
      case Waveform::kSine: v = std::sin(2.0 * std::numbers::pi * phase); break;
      case Waveform::kSquare: v = phase < 0.5 ? 1.0 : -1.0; break;
      case Waveform::kTriangle: v = phase < 0.5 ? 4.0 * phase - 1.0 : 3.0 - 4.0 * phase; break;
      case Waveform::kSaw: v = 2.0 * phase - 1.0; break;
    }
    track.samples[i] = static_cast<float>(spec.amplitude * v);
    phase += f / spec.sample_rate;
    phase -= std::floor(phase);
  }
  update_peak(track);
  return track;
}

}  // namespace echosim::audio
