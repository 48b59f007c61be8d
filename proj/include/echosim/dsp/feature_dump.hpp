#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "echosim/dsp/encode.hpp"
#include "echosim/error.hpp"

namespace echosim::dsp {

// EFV1 feature dump: 16-byte header (magic "EFV1", kind u32, rows u32,
// cols u32) followed by rows*cols little-endian float32 values, row-major.
//
// Stereo layout: vector features are 2 rows (left, right); mel
// spectrograms are 2*frames rows of n_mels, left frames first.
struct FeatureDump {
  FeatureKind kind = FeatureKind::kStride;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> values;
};

namespace detail {

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline std::uint32_t get_u32(std::span<const unsigned char> in, std::size_t at) {
  return static_cast<std::uint32_t>(in[at]) | static_cast<std::uint32_t>(in[at + 1]) << 8 |
         static_cast<std::uint32_t>(in[at + 2]) << 16 | static_cast<std::uint32_t>(in[at + 3]) << 24;
}

}  // namespace detail

inline FeatureDump to_dump(const StereoFeatures& features) {
  FeatureDump dump;
  if (const auto* vp = std::get_if<VectorPair>(&features)) {
    if (vp->first.size() != vp->second.size()) throw ShapeError("feature dump: channel lengths differ");
    dump.kind = vp->first.kind;
    dump.rows = 2;
    dump.cols = static_cast<std::uint32_t>(vp->first.size());
    dump.values = vp->first.values;
    dump.values.insert(dump.values.end(), vp->second.values.begin(), vp->second.values.end());
  } else {
    const auto& mp = std::get<MelPair>(features);
    dump.kind = FeatureKind::kMel;
    dump.rows = static_cast<std::uint32_t>(mp.first.frames + mp.second.frames);
    dump.cols = static_cast<std::uint32_t>(mp.first.n_mels);
    dump.values = mp.first.values;
    dump.values.insert(dump.values.end(), mp.second.values.begin(), mp.second.values.end());
  }
  return dump;
}

inline std::vector<unsigned char> encode_dump(const FeatureDump& dump) {
  if (dump.values.size() != static_cast<std::size_t>(dump.rows) * dump.cols) {
    throw ShapeError("feature dump: value count does not match rows*cols");
  }
  std::vector<unsigned char> out{'E', 'F', 'V', '1'};
  detail::put_u32(out, static_cast<std::uint32_t>(dump.kind));
  detail::put_u32(out, dump.rows);
  detail::put_u32(out, dump.cols);
  out.reserve(16 + dump.values.size() * 4);
  for (float v : dump.values) detail::put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

inline FeatureDump decode_dump(std::span<const unsigned char> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), "EFV1", 4) != 0) {
    throw ParseError("feature dump: missing EFV1 header");
  }
  FeatureDump dump;
  const auto kind = detail::get_u32(bytes, 4);
  if (kind < 1 || kind > 3) throw ParseError("feature dump: unknown kind code " + std::to_string(kind));
  dump.kind = static_cast<FeatureKind>(kind);
  dump.rows = detail::get_u32(bytes, 8);
  dump.cols = detail::get_u32(bytes, 12);
  const std::size_t count = static_cast<std::size_t>(dump.rows) * dump.cols;
  if (bytes.size() != 16 + count * 4) throw ParseError("feature dump: payload size does not match header");
  dump.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    dump.values[i] = std::bit_cast<float>(detail::get_u32(bytes, 16 + 4 * i));
  }
  return dump;
}

inline void write_dump(const std::string& path, const FeatureDump& dump) {
  const auto bytes = encode_dump(dump);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace echosim::dsp
