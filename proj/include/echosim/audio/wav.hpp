#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "echosim/audio/spatial.hpp"
#include "echosim/audio_buffer.hpp"
#include "echosim/error.hpp"

namespace echosim::audio {

enum class WavEncoding { kFloat32, kPcm16 };

// Decoded RIFF/WAVE contents, one vector per channel, normalized to [-1, 1].
struct WavData {
  int sample_rate = 0;
  std::vector<std::vector<float>> channels;

  std::size_t frames() const { return channels.empty() ? 0 : channels.front().size(); }
};

namespace detail {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

inline std::uint16_t rd16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | p[1] << 8); }
inline std::uint32_t rd32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
inline void wr16(std::vector<unsigned char>& o, std::uint16_t v) {
  o.push_back(static_cast<unsigned char>(v));
  o.push_back(static_cast<unsigned char>(v >> 8));
}
inline void wr32(std::vector<unsigned char>& o, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) o.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
inline void wrtag(std::vector<unsigned char>& o, const char* tag) { o.insert(o.end(), tag, tag + 4); }

}  // namespace detail

inline WavData parse_wav(std::span<const unsigned char> bytes) {
  using namespace detail;
  if (bytes.size() < 12) throw ParseError("RIFF header: file too short (" + std::to_string(bytes.size()) + " bytes)");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0) throw ParseError("RIFF header: missing 'RIFF' tag");
  if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) throw ParseError("RIFF header: form type is not 'WAVE'");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string tag(reinterpret_cast<const char*>(bytes.data() + pos), 4);
    const std::uint32_t size = rd32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) {
      throw ParseError("chunk '" + tag + "': declared size " + std::to_string(size) + " exceeds file");
    }
    if (tag == "fmt ") {
      if (size < 16) throw ParseError("chunk 'fmt ': too short (" + std::to_string(size) + " bytes)");
      const unsigned char* f = bytes.data() + body;
      format = rd16(f);
      channels = rd16(f + 2);
      rate = rd32(f + 4);
      block_align = rd16(f + 12);
      bits = rd16(f + 14);
      if (format == kFormatExtensible) {
        if (size < 40) throw ParseError("chunk 'fmt ': extensible format without sub-format GUID");
        format = rd16(f + 24);
      }
      have_fmt = true;
    } else if (tag == "data") {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1u);
  }

  if (!have_fmt) throw ParseError("chunk 'fmt ': missing");
  if (!data) throw ParseError("chunk 'data': missing");
  if (channels == 0) throw ParseError("chunk 'fmt ': zero channels");
  if (rate == 0) throw ParseError("chunk 'fmt ': zero sample rate");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) {
    throw ParseError("chunk 'fmt ': unsupported codec (format tag " + std::to_string(format) + ", " +
                     std::to_string(bits) + " bits); expected PCM16 or IEEE float32");
  }
  const std::size_t bytes_per_sample = bits / 8;
  if (block_align != channels * bytes_per_sample) {
    throw ParseError("chunk 'fmt ': block align " + std::to_string(block_align) + " inconsistent with channels/bits");
  }
  if (data_size % block_align != 0) throw ParseError("chunk 'data': size is not a whole number of frames");

  WavData out;
  out.sample_rate = static_cast<int>(rate);
  const std::size_t frames = data_size / block_align;
  out.channels.assign(channels, std::vector<float>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + i * block_align + c * bytes_per_sample;
      float v;
      if (pcm16) {
        v = static_cast<float>(static_cast<std::int16_t>(rd16(p))) / 32768.0f;
      } else {
        v = std::bit_cast<float>(rd32(p));
        if (!std::isfinite(v)) throw ParseError("chunk 'data': non-finite float sample at frame " + std::to_string(i));
        v = std::clamp(v, -1.0f, 1.0f);
      }
      out.channels[c][i] = v;
    }
  }
  return out;
}

// Linear-interpolation resampler. Output length is round(n * dst / src).
inline std::vector<float> resample_linear(std::span<const float> in, int src_rate, int dst_rate) {
  if (src_rate <= 0 || dst_rate <= 0) throw ConfigError("resample: rates must be positive");
  if (src_rate == dst_rate || in.empty()) return {in.begin(), in.end()};
  const double ratio = static_cast<double>(src_rate) / dst_rate;
  const auto n_out = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(static_cast<double>(in.size()) * dst_rate / src_rate)));
  std::vector<float> out(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double t = static_cast<double>(i) * ratio;
    const auto k = static_cast<std::size_t>(t);
    if (k + 1 >= in.size()) {
      out[i] = in.back();
    } else {
      const double frac = t - static_cast<double>(k);
      out[i] = static_cast<float>(in[k] + frac * (in[k + 1] - in[k]));
    }
  }
  return out;
}

// Decodes a WAV file into a mono track at the engine rate. Multi-channel
// input is averaged across channels.
inline SoundTrack load_wav(std::span<const unsigned char> bytes, int engine_rate, std::string id = {}) {
  const auto wav = parse_wav(bytes);
  std::vector<float> mono(wav.frames(), 0.0f);
  const auto nch = static_cast<float>(wav.channels.size());
  for (std::size_t i = 0; i < mono.size(); ++i) {
    float acc = 0.0f;
    for (const auto& ch : wav.channels) acc += ch[i];
    mono[i] = acc / nch;
  }
  SoundTrack track;
  track.id = std::move(id);
  track.samples = resample_linear(mono, wav.sample_rate, engine_rate);
  if (track.samples.empty()) throw ParseError("chunk 'data': no samples");
  update_peak(track);
  return track;
}

// Stereo view of a WAV file at its native rate (mono is duplicated).
inline AudioBuffer wav_to_stereo(const WavData& wav) {
  if (wav.channels.size() > 2) {
    throw ParseError("chunk 'fmt ': " + std::to_string(wav.channels.size()) + " channels, expected mono or stereo");
  }
  AudioBuffer buf;
  buf.sample_rate = wav.sample_rate;
  buf.left = wav.channels[0];
  buf.right = wav.channels.size() == 2 ? wav.channels[1] : wav.channels[0];
  return buf;
}

inline std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline std::vector<unsigned char> encode_wav(const AudioBuffer& buf, WavEncoding enc = WavEncoding::kFloat32) {
  using namespace detail;
  if (buf.left.size() != buf.right.size()) throw ShapeError("encode_wav: channel lengths differ");
  const std::uint16_t bits = enc == WavEncoding::kFloat32 ? 32 : 16;
  const std::uint16_t channels = 2;
  const std::uint16_t block = channels * bits / 8;
  const auto data_size = static_cast<std::uint32_t>(buf.size() * block);

  std::vector<unsigned char> o;
  o.reserve(44 + data_size);
  wrtag(o, "RIFF");
  wr32(o, 36 + data_size);
  wrtag(o, "WAVE");
  wrtag(o, "fmt ");
  wr32(o, 16);
  wr16(o, enc == WavEncoding::kFloat32 ? kFormatFloat : kFormatPcm);
  wr16(o, channels);
  wr32(o, static_cast<std::uint32_t>(buf.sample_rate));
  wr32(o, static_cast<std::uint32_t>(buf.sample_rate) * block);
  wr16(o, block);
  wr16(o, bits);
  wrtag(o, "data");
  wr32(o, data_size);
  for (std::size_t i = 0; i < buf.size(); ++i) {
    for (float v : {buf.left[i], buf.right[i]}) {
      if (enc == WavEncoding::kFloat32) {
        wr32(o, std::bit_cast<std::uint32_t>(v));
      } else {
        const long q = std::clamp(std::lround(static_cast<double>(v) * 32768.0), -32768L, 32767L);
        wr16(o, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
      }
    }
  }
  return o;
}

inline void save_wav(const AudioBuffer& buf, const std::string& path, WavEncoding enc = WavEncoding::kFloat32) {
  const auto bytes = encode_wav(buf, enc);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace echosim::audio
