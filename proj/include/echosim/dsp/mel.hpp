#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "echosim/dsp/features.hpp"
#include "echosim/dsp/fft.hpp"
#include "echosim/error.hpp"

namespace echosim::dsp {

// HTK mel scale.
inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

struct MelFilterbank {
  std::size_t n_mels = 0;
  std::size_t n_fft = 0;
  std::size_t n_fft_bins = 0;  // n_fft / 2 + 1
  int sample_rate = 0;
  double f_min = 0.0;
  double f_max = 0.0;
  std::vector<double> centers_hz;  // n_mels
  std::vector<double> weights;     // row-major n_mels x n_fft_bins

  double weight(std::size_t mel, std::size_t bin) const { return weights[mel * n_fft_bins + bin]; }
  double bin_hz(std::size_t bin) const {
    return static_cast<double>(bin) * sample_rate / static_cast<double>(n_fft);
  }

  // energies[m] = sum_k weight(m, k) * power[k]
  void apply(std::span<const double> power, std::span<double> energies) const {
    for (std::size_t m = 0; m < n_mels; ++m) {
      const double* row = &weights[m * n_fft_bins];
      double acc = 0.0;
      for (std::size_t k = 0; k < n_fft_bins; ++k) acc += row[k] * power[k];
      energies[m] = acc;
    }
  }
};

// Triangular filters with centers equally spaced in mel between f_min and
// f_max. Weights are evaluated at each FFT bin's center frequency, so narrow
// low-frequency triangles still pick up the bins they straddle. A filter that
// covers no bin at all is rejected.
inline MelFilterbank build_mel_filterbank(int sample_rate, std::size_t n_fft, std::size_t n_mels,
                                          double f_min, double f_max) {
  if (sample_rate <= 0) throw ConfigError("mel filterbank: sample_rate must be positive");
  if (n_mels < 1) throw ConfigError("mel filterbank: n_mels must be >= 1");
  if (n_fft < 2) throw ConfigError("mel filterbank: n_fft must be >= 2");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    throw ConfigError("mel filterbank: need 0 <= f_min < f_max <= sample_rate/2, got [" +
                      std::to_string(f_min) + ", " + std::to_string(f_max) + "]");
  }
  MelFilterbank fb;
  fb.n_mels = n_mels;
  fb.n_fft = n_fft;
  fb.n_fft_bins = n_fft / 2 + 1;
  fb.sample_rate = sample_rate;
  fb.f_min = f_min;
  fb.f_max = f_max;
  fb.weights.assign(n_mels * fb.n_fft_bins, 0.0);

  const double mel_lo = hz_to_mel(f_min);
  const double mel_hi = hz_to_mel(f_max);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  }
  fb.centers_hz.assign(edges.begin() + 1, edges.end() - 1);

  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m];
    const double mid = edges[m + 1];
    const double hi = edges[m + 2];
    double row_sum = 0.0;
    for (std::size_t k = 0; k < fb.n_fft_bins; ++k) {
      const double f = fb.bin_hz(k);
      const double rise = (f - lo) / (mid - lo);
      const double fall = (hi - f) / (hi - mid);
      const double w = std::max(0.0, std::min(rise, fall));
      fb.weights[m * fb.n_fft_bins + k] = w;
      row_sum += w;
    }
    if (!(row_sum > 0.0)) {
      throw ConfigError("mel filterbank: filter " + std::to_string(m) + " (center " +
                        std::to_string(mid) + " Hz) covers no FFT bin; increase n_fft or reduce n_mels");
    }
  }
  return fb;
}

struct MelParams {
  double win_ms = 25.0;
  double hop_ms = 10.0;
  std::size_t n_mels = 80;
};

struct MelSpectrogram {
  std::size_t frames = 0;
  std::size_t n_mels = 0;
  std::vector<float> values;  // row-major frames x n_mels, natural-log energies
  Channel channel = Channel::kLeft;

  float at(std::size_t frame, std::size_t mel) const { return values[frame * n_mels + mel]; }
  friend bool operator==(const MelSpectrogram&, const MelSpectrogram&) = default;
};

// STFT + mel front-end with a fixed sample rate. Window length is
// round(win_ms * fs / 1000), hop is floor(hop_ms * fs / 1000); each frame is
// Hann-windowed and zero-padded to the next power of two before the FFT.
// Construct once and share; compute() is const and thread-safe.
class MelExtractor {
 public:
  MelExtractor(int sample_rate, MelParams params = {})
      : sample_rate_(sample_rate), params_(params) {
    if (sample_rate <= 0) throw ConfigError("mel: sample_rate must be positive");
    win_ = static_cast<std::size_t>(std::lround(params.win_ms * sample_rate / 1000.0));
    hop_ = static_cast<std::size_t>(std::floor(params.hop_ms * sample_rate / 1000.0));
    if (win_ < 2 || hop_ < 1) throw ConfigError("mel: window/hop too short for sample rate");
    n_fft_ = next_pow2(win_);
    plan_ = std::make_shared<const FftPlan>(n_fft_);
    filterbank_ = build_mel_filterbank(sample_rate, n_fft_, params.n_mels, 0.0, sample_rate / 2.0);
    window_.resize(win_);
    // Periodic Hann.
    for (std::size_t i = 0; i < win_; ++i) {
      window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(win_));
    }
  }

  int sample_rate() const { return sample_rate_; }
  std::size_t window_length() const { return win_; }
  std::size_t hop_length() const { return hop_; }
  std::size_t n_fft() const { return n_fft_; }
  const MelFilterbank& filterbank() const { return filterbank_; }

  std::size_t frame_count(std::size_t n) const { return n < win_ ? 0 : 1 + (n - win_) / hop_; }

  MelSpectrogram compute(std::span<const float> samples, Channel channel = Channel::kLeft) const {
    if (samples.size() < win_) {
      throw ShapeError("mel_spectrogram: input has " + std::to_string(samples.size()) +
                       " samples, need at least " + std::to_string(win_) + " (one window)");
    }
    MelSpectrogram out;
    out.frames = frame_count(samples.size());
    out.n_mels = params_.n_mels;
    out.channel = channel;
    out.values.resize(out.frames * out.n_mels);

    std::vector<Complex> frame(n_fft_);
    std::vector<Complex> spectrum(n_fft_);
    std::vector<double> power(filterbank_.n_fft_bins);
    std::vector<double> energies(out.n_mels);
    for (std::size_t f = 0; f < out.frames; ++f) {
      const std::size_t start = f * hop_;
      std::fill(frame.begin(), frame.end(), Complex{});
      for (std::size_t i = 0; i < win_; ++i) frame[i] = Complex(samples[start + i] * window_[i], 0.0);
      plan_->forward(frame, spectrum);
      for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(spectrum[k]);
      filterbank_.apply(power, energies);
      for (std::size_t m = 0; m < out.n_mels; ++m) {
        out.values[f * out.n_mels + m] = static_cast<float>(std::log(energies[m] + kLogFloor));
      }
    }
    return out;
  }

 private:
  int sample_rate_;
  MelParams params_;
  std::size_t win_ = 0;
  std::size_t hop_ = 0;
  std::size_t n_fft_ = 0;
  std::shared_ptr<const FftPlan> plan_;
  MelFilterbank filterbank_;
  std::vector<double> window_;
};

inline MelSpectrogram mel_spectrogram(std::span<const float> samples, int sample_rate, MelParams params = {},
                                      Channel channel = Channel::kLeft) {
  return MelExtractor(sample_rate, params).compute(samples, channel);
}

}  // namespace echosim::dsp
