#pragma once

#include <cstddef>
#include <utility>
#include <variant>

#include "echosim/audio_buffer.hpp"
#include "echosim/dsp/features.hpp"
#include "echosim/dsp/mel.hpp"

namespace echosim::dsp {

struct EncoderOptions {
  std::size_t stride = 8;
  MelParams mel{};
};

using VectorPair = std::pair<FeatureVector, FeatureVector>;
using MelPair = std::pair<MelSpectrogram, MelSpectrogram>;
using StereoFeatures = std::variant<VectorPair, MelPair>;

// Runs one front-end on each channel independently; result is (left, right).
inline StereoFeatures encode_stereo(const AudioBuffer& buf, FeatureKind kind, const EncoderOptions& opts = {}) {
  buf.validate();
  switch (kind) {
    case FeatureKind::kStride:
      return VectorPair{stride_downsample(buf.left, opts.stride, Channel::kLeft),
                        stride_downsample(buf.right, opts.stride, Channel::kRight)};
    case FeatureKind::kLogFft:
      return VectorPair{fft_log_magnitude(buf.left, Channel::kLeft), fft_log_magnitude(buf.right, Channel::kRight)};
    case FeatureKind::kMel: {
      const MelExtractor mel(buf.sample_rate, opts.mel);
      return MelPair{mel.compute(buf.left, Channel::kLeft), mel.compute(buf.right, Channel::kRight)};
    }
  }
  throw ConfigError("encode_stereo: unknown feature kind");
}

}  // namespace echosim::dsp
