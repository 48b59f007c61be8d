#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "echosim/error.hpp"

namespace echosim {

enum class Channel { kLeft = 0, kRight = 1 };

inline const char* channel_name(Channel c) { return c == Channel::kLeft ? "left" : "right"; }

// Planar stereo block. Amplitudes are expected in [-1, 1]; validate() checks.
struct AudioBuffer {
  std::vector<float> left;
  std::vector<float> right;
  int sample_rate = 22050;

  AudioBuffer() = default;
  AudioBuffer(std::size_t n, int rate) : left(n, 0.0f), right(n, 0.0f), sample_rate(rate) {}

  std::size_t size() const { return left.size(); }

  std::span<const float> channel(Channel c) const {
    return c == Channel::kLeft ? std::span<const float>(left) : std::span<const float>(right);
  }
  std::span<float> channel(Channel c) {
    return c == Channel::kLeft ? std::span<float>(left) : std::span<float>(right);
  }

  void resize(std::size_t n) {
    left.assign(n, 0.0f);
    right.assign(n, 0.0f);
  }

  void validate() const {
    if (left.size() != right.size()) {
      throw ShapeError("AudioBuffer: channel lengths differ (" + std::to_string(left.size()) +
                       " vs " + std::to_string(right.size()) + ")");
    }
    if (sample_rate <= 0) throw ConfigError("AudioBuffer: sample_rate must be positive");
    for (const auto* ch : {&left, &right}) {
      for (float v : *ch) {
        if (!std::isfinite(v) || v < -1.0f || v > 1.0f) {
          throw ShapeError("AudioBuffer: amplitude out of [-1, 1]: " + std::to_string(v));
        }
      }
    }
  }

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;
};

}  // namespace echosim
