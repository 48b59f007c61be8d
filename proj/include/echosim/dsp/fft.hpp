#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "echosim/error.hpp"

namespace echosim::dsp {

using Complex = std::complex<double>;

// Mixed-radix decimation-in-time DFT for any length n >= 1.
//
// n is factored into primes (4 first, then 2, 3, 5, ...). Each stage runs a
// generic radix-p butterfly, so a stage costs O(n * p). Highly composite
// lengths such as 2520 = 2^3 * 3^2 * 5 * 7 are fast; a prime length
// degenerates into the direct O(n^2) sum over an exact twiddle table.
//
// Forward transform convention: X[k] = sum_t x[t] * exp(-2*pi*i*k*t/n).
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    if (n == 0) throw ShapeError("FftPlan: length must be positive");
    twiddles_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
      twiddles_[j] = Complex(std::cos(phase), std::sin(phase));
    }
    std::size_t rest = n;
    while (rest % 4 == 0) {
      factors_.push_back(4);
      rest /= 4;
    }
    for (std::size_t p = 2; rest > 1; ++p) {
      while (rest % p == 0) {
        factors_.push_back(p);
        rest /= p;
      }
      if (p * p > rest && rest > 1) {
        factors_.push_back(rest);
        rest = 1;
      }
    }
  }

  std::size_t size() const { return n_; }

  void forward(std::span<const Complex> in, std::span<Complex> out) const {
    if (in.size() != n_ || out.size() != n_) throw ShapeError("FftPlan: buffer length mismatch");
    std::vector<Complex> scratch(max_factor());
    transform(in.data(), out.data(), 1, 0, scratch);
  }

  std::vector<Complex> forward(std::span<const Complex> in) const {
    std::vector<Complex> out(n_);
    forward(in, out);
    return out;
  }

  // Real input; imaginary parts are zero.
  std::vector<Complex> forward_real(std::span<const double> in) const {
    std::vector<Complex> tmp(in.begin(), in.end());
    return forward(tmp);
  }

 private:
  std::size_t max_factor() const {
    std::size_t m = 1;
    for (auto f : factors_) m = std::max(m, f);
    return m;
  }

  // Computes the DFT of in[0], in[stride], ... (length n_ / product of
  // factors before `stage`) into out[0..len).
  void transform(const Complex* in, Complex* out, std::size_t stride, std::size_t stage,
                 std::vector<Complex>& scratch) const {
    std::size_t len = n_;
    for (std::size_t s = 0; s < stage; ++s) len /= factors_[s];
    if (stage == factors_.size()) {
      out[0] = in[0];
      return;
    }
    const std::size_t p = factors_[stage];
    const std::size_t m = len / p;
    for (std::size_t r = 0; r < p; ++r) {
      transform(in + r * stride, out + r * m, stride * p, stage + 1, scratch);
    }
    // Twiddle step for this stage uses W_len^j = W_n^(j * n/len).
    const std::size_t tw_step = n_ / len;
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t r = 0; r < p; ++r) scratch[r] = out[r * m + k];
      for (std::size_t q = 0; q < p; ++q) {
        const std::size_t kk = k + q * m;
        Complex acc = scratch[0];
        for (std::size_t r = 1; r < p; ++r) {
          const std::size_t idx = ((r * kk) % len) * tw_step;
          acc += scratch[r] * twiddles_[idx];
        }
        out[kk] = acc;
      }
    }
  }

  std::size_t n_;
  std::vector<std::size_t> factors_;
  std::vector<Complex> twiddles_;
};

// |DFT(x)| for the first `bins` bins.
inline std::vector<double> dft_magnitudes(std::span<const float> x, std::size_t bins) {
  FftPlan plan(x.size());
  std::vector<Complex> in(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) in[i] = Complex(x[i], 0.0);
  const auto spec = plan.forward(in);
  std::vector<double> mags(std::min(bins, spec.size()));
  for (std::size_t j = 0; j < mags.size(); ++j) mags[j] = std::abs(spec[j]);
  return mags;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace echosim::dsp
