#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "echosim/audio_buffer.hpp"
#include "echosim/dsp/fft.hpp"
#include "echosim/error.hpp"

namespace echosim::dsp {

// Floor added inside every logarithm so silent input stays finite.
inline constexpr double kLogFloor = 1e-5;

enum class FeatureKind : std::uint32_t { kStride = 1, kLogFft = 2, kMel = 3 };

inline const char* feature_kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::kStride: return "stride";
    case FeatureKind::kLogFft: return "logfft";
    case FeatureKind::kMel: return "mel";
  }
  return "?";
}

struct FeatureVector {
  std::vector<float> values;
  Channel channel = Channel::kLeft;
  FeatureKind kind = FeatureKind::kStride;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Plain decimation: keeps samples 0, stride, 2*stride, ... (no anti-alias filter).
inline FeatureVector stride_downsample(std::span<const float> samples, std::size_t stride,
                                       Channel channel = Channel::kLeft) {
  if (stride == 0) throw ConfigError("stride_downsample: stride must be >= 1");
  FeatureVector out{{}, channel, FeatureKind::kStride};
  out.values.reserve((samples.size() + stride - 1) / stride);
  for (std::size_t i = 0; i < samples.size(); i += stride) out.values.push_back(samples[i]);
  return out;
}

// ln(|DFT(s)_j| + eps) for j in [0, n/2). Magnitudes are not normalized.
inline FeatureVector fft_log_magnitude(std::span<const float> samples, Channel channel = Channel::kLeft) {
  if (samples.size() < 2) {
    throw ShapeError("fft_log_magnitude: need at least 2 samples, got " + std::to_string(samples.size()));
  }
  const auto mags = dft_magnitudes(samples, samples.size() / 2);
  FeatureVector out{{}, channel, FeatureKind::kLogFft};
  out.values.resize(mags.size());
  for (std::size_t j = 0; j < mags.size(); ++j) {
    out.values[j] = static_cast<float>(std::log(mags[j] + kLogFloor));
  }
  return out;
}

// Non-overlapping max-pool; a trailing partial window is dropped.
inline FeatureVector maxpool_1d(const FeatureVector& v, std::size_t kernel) {
  if (kernel == 0) throw ConfigError("maxpool_1d: kernel must be >= 1");
  FeatureVector out{{}, v.channel, v.kind};
  const std::size_t n_out = v.values.size() / kernel;
  out.values.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const auto first = v.values.begin() + static_cast<std::ptrdiff_t>(i * kernel);
    out.values[i] = *std::max_element(first, first + static_cast<std::ptrdiff_t>(kernel));
  }
  return out;
}

}  // namespace echosim::dsp
