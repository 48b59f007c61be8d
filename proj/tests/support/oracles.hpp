#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

// Direct O(n^2) DFT in long double, twiddle index reduced mod n.
inline std::vector<std::complex<double>> direct_dft(std::span<const std::complex<double>> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    long double re = 0.0L, im = 0.0L;
    for (std::size_t t = 0; t < n; ++t) {
      const long double ph = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((j * t) % n) / n;
      const long double c = std::cos(ph), s = std::sin(ph);
      re += x[t].real() * c - x[t].imag() * s;
      im += x[t].real() * s + x[t].imag() * c;
    }
    out[j] = {static_cast<double>(re), static_cast<double>(im)};
  }
  return out;
}

inline std::vector<double> direct_dft_magnitudes(std::span<const float> x, std::size_t bins) {
  std::vector<std::complex<double>> cx(x.begin(), x.end());
  const auto spec = direct_dft(cx);
  std::vector<double> mags(std::min(bins, spec.size()));
  for (std::size_t j = 0; j < mags.size(); ++j) mags[j] = std::abs(spec[j]);
  return mags;
}

// max |a - b| relative to max |b|.
inline double max_relative_error(std::span<const double> a, std::span<const double> b) {
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    err = std::max(err, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return scale > 0.0 ? err / scale : err;
}

// Normalized correlation of a against b[offset + t] (b read circularly).
inline double ncc_at(std::span<const float> a, std::span<const float> b, std::size_t offset) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double x = a[t];
    const double y = b[(offset + t) % b.size()];
    ab += x * y;
    aa += x * x;
    bb += y * y;
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

// Peak normalized circular cross-correlation over all lags (equal lengths).
inline double ncc_peak(std::span<const float> a, std::span<const float> b) {
  double best = -1.0;
  for (std::size_t lag = 0; lag < b.size(); ++lag) best = std::max(best, ncc_at(a, b, lag));
  return best;
}

struct RayHit {
  int id = 0;
  double distance = 0.0;
};

struct Circle {
  double x, y, r;
  int id;
};

struct Wall {
  double ax, ay, bx, by;
};

// Brute-force ray march in fixed steps. A step that enters a circle or
// changes the side of a wall line (within the segment) is a hit; the hit
// point inside that step is then located by bisection.
inline RayHit march(double ox, double oy, double angle, std::span<const Wall> walls, std::span<const Circle> circles,
                    double step = 1e-3, double max_dist = 50.0) {
  const double dx = std::cos(angle), dy = std::sin(angle);
  auto bisect = [](double lo, double hi, auto&& past) {
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (past(mid) ? hi : lo) = mid;
    }
    return hi;
  };
  for (double t0 = 0.0; t0 < max_dist; t0 += step) {
    const double t1 = t0 + step;
    RayHit best{0, std::numeric_limits<double>::infinity()};
    for (const auto& c : circles) {
      auto inside = [&](double t) { return std::hypot(ox + t * dx - c.x, oy + t * dy - c.y) <= c.r; };
      if (!inside(t1)) continue;
      const double t = bisect(t0, t1, inside);
      if (t < best.distance) best = {c.id, t};
    }
    for (const auto& w : walls) {
      const double ex = w.bx - w.ax, ey = w.by - w.ay;
      auto side = [&](double t) { return ex * (oy + t * dy - w.ay) - ey * (ox + t * dx - w.ax); };
      const double s0 = side(t0);
      if ((s0 > 0) == (side(t1) > 0)) continue;
      const double t = bisect(t0, t1, [&](double u) { return (side(u) > 0) != (s0 > 0); });
      const double u = ((ox + t * dx - w.ax) * ex + (oy + t * dy - w.ay) * ey) / (ex * ex + ey * ey);
      if (u < 0.0 || u > 1.0) continue;
      if (t < best.distance) best = {0, t};
    }
    if (best.distance <= t1) return best;
  }
  return {0, max_dist};
}

}  // namespace oracle
