#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "echosim/audio_buffer.hpp"
#include "echosim/error.hpp"
#include "echosim/geometry.hpp"

namespace echosim::audio {

struct RenderParams {
  int sample_rate = 22050;
  int tic_rate = 35;

  void validate() const {
    if (sample_rate <= 0 || tic_rate <= 0) throw ConfigError("render params: rates must be positive");
    if (sample_rate % tic_rate != 0) {
      throw ConfigError("render params: sample_rate " + std::to_string(sample_rate) +
                        " is not divisible by tic_rate " + std::to_string(tic_rate));
    }
  }

  std::size_t samples_per_tic() const {
    validate();
    return static_cast<std::size_t>(sample_rate / tic_rate);
  }
};

// Audio samples covering `frameskip` tics.
inline std::size_t samples_per_step(const RenderParams& params, int frameskip) {
  if (frameskip < 1) throw ConfigError("samples_per_step: frameskip must be >= 1");
  return params.samples_per_tic() * static_cast<std::size_t>(frameskip);
}

struct SoundTrack {
  std::string id;
  std::vector<float> samples;  // mono, engine sample rate
  bool loop = true;
  float peak = -1.0f;  // max |sample|; negative when unknown

  std::size_t size() const { return samples.size(); }
};

inline void update_peak(SoundTrack& t) {
  float p = 0.0f;
  for (float v : t.samples) p = std::max(p, std::abs(v));
  t.peak = p;
}

using TrackPtr = std::shared_ptr<const SoundTrack>;

struct SoundSource {
  TrackPtr track;
  Vec2 position;
  float gain = 1.0f;
  double ref_distance = 1.0;
  double rolloff = 4.0;
  double max_distance = 12.0;
  std::size_t playhead = 0;
  // Silence appended after each pass of the track; a looping source's cycle
  // is track length + gap.
  std::size_t gap = 0;
  bool loop = true;
  bool active = true;
  bool spatialized = true;

  std::size_t cycle_length() const { return track->size() + gap; }
};

inline SoundSource make_source(TrackPtr track, Vec2 position) {
  SoundSource s;
  s.loop = track->loop;
  s.track = std::move(track);
  s.position = position;
  return s;
}

struct ListenerPose {
  Vec2 position;
  double heading = 0.0;  // radians, [-pi, pi), counter-clockwise from +x
};

// Inverse-distance law clamped to [ref, max]; silent beyond max_distance.
inline double attenuation_gain(const SoundSource& src, double dist) {
  if (dist > src.max_distance) return 0.0;
  const double d = std::clamp(dist, src.ref_distance, src.max_distance);
  return src.ref_distance / (src.ref_distance + src.rolloff * (d - src.ref_distance));
}

struct StereoGains {
  double left = 0.5;
  double right = 0.5;
};

// Linear bearing pan: with theta the source bearing (positive = listener's
// left), left = (1 + sin theta) / 2 and right = (1 - sin theta) / 2.
inline StereoGains pan_gains(const ListenerPose& listener, Vec2 source_pos) {
  const Vec2 rel = source_pos - listener.position;
  const double r = length(rel);
  if (r == 0.0) return {};
  const double s = std::clamp(cross(direction(listener.heading), rel) / r, -1.0, 1.0);
  return {(1.0 + s) / 2.0, (1.0 - s) / 2.0};
}

struct RenderStats {
  std::size_t clamped = 0;  // output samples (per channel) that hit the [-1, 1] clamp
};

namespace detail {

#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__) && defined(__linux__)
#define ECHOSIM_MIX_CLONES __attribute__((target_clones("avx2", "default")))
#define ECHOSIM_INLINE __attribute__((always_inline)) inline
#else
#define ECHOSIM_MIX_CLONES
#define ECHOSIM_INLINE inline
#endif

// One source's contribution to a mixing chunk.
struct Voice {
  const float* samples;
  float gl;
  float gr;
};

inline constexpr int kVoicesPerPass = 8;

// Adds K voices in order. Every output sample is computed as
// ((base + g0*t0) + g1*t1) + ..., the same sequence of IEEE operations as
// mixing one source at a time, so the result does not depend on grouping
// or on the instruction set.
template <int K, bool ZeroBase>
ECHOSIM_INLINE void mix_pass(float* __restrict l, float* __restrict r, const Voice* v, std::size_t n) {
  const float* t[K];
  float gl[K], gr[K];
  for (int k = 0; k < K; ++k) {
    t[k] = v[k].samples;
    gl[k] = v[k].gl;
    gr[k] = v[k].gr;
  }
  for (std::size_t i = 0; i < n; ++i) {
    float a = ZeroBase ? 0.0f : l[i];
    float b = ZeroBase ? 0.0f : r[i];
#pragma GCC unroll 8
    for (int k = 0; k < K; ++k) {
      a += gl[k] * t[k][i];
      b += gr[k] * t[k][i];
    }
    l[i] = a;
    r[i] = b;
  }
}

template <bool ZeroBase>
ECHOSIM_INLINE void mix_group(float* l, float* r, const Voice* v, std::size_t k, std::size_t n) {
  switch (k) {
    case 1: mix_pass<1, ZeroBase>(l, r, v, n); break;
    case 2: mix_pass<2, ZeroBase>(l, r, v, n); break;
    case 3: mix_pass<3, ZeroBase>(l, r, v, n); break;
    case 4: mix_pass<4, ZeroBase>(l, r, v, n); break;
    case 5: mix_pass<5, ZeroBase>(l, r, v, n); break;
    case 6: mix_pass<6, ZeroBase>(l, r, v, n); break;
    case 7: mix_pass<7, ZeroBase>(l, r, v, n); break;
    default: mix_pass<8, ZeroBase>(l, r, v, n); break;
  }
}

ECHOSIM_MIX_CLONES
inline void mix_voices(float* l, float* r, const Voice* v, std::size_t count, std::size_t n) {
  if (count == 0) {
    std::fill(l, l + n, 0.0f);
    std::fill(r, r + n, 0.0f);
    return;
  }
  for (std::size_t k = 0; k < count; k += kVoicesPerPass) {
    const std::size_t group = std::min<std::size_t>(count - k, kVoicesPerPass);
    if (k == 0) {
      mix_group<true>(l, r, v, group, n);
    } else {
      mix_group<false>(l, r, v + k, group, n);
    }
  }
}

ECHOSIM_MIX_CLONES
inline std::size_t clamp_kernel(float* __restrict x, std::size_t n) {
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const float v = x[i];
    clamped += static_cast<std::size_t>((v > 1.0f) | (v < -1.0f));
    x[i] = std::min(1.0f, std::max(-1.0f, v));
  }
  return clamped;
}

// Samples until the source's next state change (end of track, end of gap).
inline std::size_t run_length(const SoundSource& src) {
  const std::size_t len = src.track->size();
  return src.playhead < len ? len - src.playhead : src.cycle_length() - src.playhead;
}

inline void advance(SoundSource& src, std::size_t n) {
  src.playhead += n;
  if (src.playhead >= src.cycle_length()) {
    if (src.loop) {
      src.playhead = 0;
    } else {
      src.playhead = src.track->size();
      src.active = false;
    }
  }
}

}  // namespace detail

// Mixes every active source into `left`/`right` (overwritten), advancing
// playheads by left.size() samples. Distance and pan gains are evaluated once
// at the start of the call. Sources are summed in order, one at a time per
// sample, then the result is clamped to [-1, 1].
inline RenderStats render_into(std::span<SoundSource> sources, const ListenerPose& listener,
                               std::span<float> left, std::span<float> right) {
  if (left.size() != right.size()) throw ShapeError("render: channel spans differ in length");
  const std::size_t n = left.size();

  struct Live {
    SoundSource* src;
    float gl;
    float gr;
  };
  constexpr std::size_t kInline = 16;
  std::array<Live, kInline> live_small;
  std::vector<Live> live_big;
  std::span<Live> live;
  if (sources.size() <= kInline) {
    live = std::span<Live>(live_small.data(), 0);
  } else {
    live_big.resize(sources.size());
    live = std::span<Live>(live_big.data(), 0);
  }
  // Upper bound on |sample| per channel; the clamp pass is skipped when it
  // provably cannot trigger.
  double bound_l = 0.0, bound_r = 0.0;
  for (auto& src : sources) {
    if (!src.active || !src.track || src.track->samples.empty()) continue;
    double gl = src.gain * 0.5;
    double gr = src.gain * 0.5;
    if (src.spatialized) {
      const double att = attenuation_gain(src, distance(listener.position, src.position));
      const auto pan = pan_gains(listener, src.position);
      gl = src.gain * att * pan.left;
      gr = src.gain * att * pan.right;
    }
    const Live lv{&src, static_cast<float>(gl), static_cast<float>(gr)};
    const double peak = src.track->peak < 0.0f ? std::numeric_limits<double>::infinity() : src.track->peak;
    if (lv.gl != 0.0f) bound_l += std::abs(lv.gl) * peak;
    if (lv.gr != 0.0f) bound_r += std::abs(lv.gr) * peak;
    live = std::span<Live>(live.data(), live.size() + 1);
    live.back() = lv;
  }

  std::array<detail::Voice, kInline> voice_small;
  std::vector<detail::Voice> voice_big(live.size() > kInline ? live.size() : 0);
  detail::Voice* voices = live.size() > kInline ? voice_big.data() : voice_small.data();

  // Split the output at every point where some source changes state, so each
  // chunk sees a contiguous span of every playing track.
  std::size_t out = 0;
  while (out < n) {
    std::size_t chunk = n - out;
    for (const auto& lv : live) {
      if (lv.src->active) chunk = std::min(chunk, detail::run_length(*lv.src));
    }
    std::size_t count = 0;
    for (const auto& lv : live) {
      SoundSource& src = *lv.src;
      if (!src.active || src.playhead >= src.track->size()) continue;
      if (lv.gl == 0.0f && lv.gr == 0.0f) continue;
      voices[count++] = {src.track->samples.data() + src.playhead, lv.gl, lv.gr};
    }
    detail::mix_voices(left.data() + out, right.data() + out, voices, count, chunk);
    for (const auto& lv : live) {
      if (lv.src->active) detail::advance(*lv.src, chunk);
    }
    out += chunk;
  }

  // Leaves room for float rounding in the accumulation.
  constexpr double kSafe = 1.0 - 1e-4;
  RenderStats stats;
  if (!(bound_l <= kSafe)) stats.clamped += detail::clamp_kernel(left.data(), n);
  if (!(bound_r <= kSafe)) stats.clamped += detail::clamp_kernel(right.data(), n);
  return stats;
}

inline AudioBuffer render_step(std::span<SoundSource> sources, const ListenerPose& listener,
                               const RenderParams& params, std::size_t n_samples, RenderStats* stats = nullptr) {
  AudioBuffer buf(n_samples, params.sample_rate);
  const auto s = render_into(sources, listener, buf.left, buf.right);
  if (stats) *stats = s;
  return buf;
}

}  // namespace echosim::audio
