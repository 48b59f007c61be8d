#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "echosim/audio/spatial.hpp"
#include "echosim/audio/synth.hpp"

using namespace echosim;
using namespace echosim::audio;

namespace {

TrackPtr make_track(std::vector<float> samples, bool with_peak = false) {
  SoundTrack t{"t", std::move(samples), true};
  if (with_peak) update_peak(t);
  return std::make_shared<const SoundTrack>(std::move(t));
}

TrackPtr noise_track(std::mt19937& gen, std::size_t n, float amp, bool with_peak = false) {
  std::uniform_real_distribution<float> d(-amp, amp);
  std::vector<float> x(n);
  for (auto& v : x) v = d(gen);
  return make_track(std::move(x), with_peak);
}

// Per-sample reference mixer written from the rendering rules, with the
// bearing computed from angles rather than a cross product.
AudioBuffer reference_mix(std::vector<SoundSource> sources, const ListenerPose& L, std::size_t n,
                          std::size_t* clamped = nullptr) {
  AudioBuffer out(n, 22050);
  for (const auto& s : sources) {
    if (!s.active || s.track->samples.empty()) continue;
    double gl = 0.5 * s.gain, gr = 0.5 * s.gain;
    if (s.spatialized) {
      const double dx = s.position.x - L.position.x, dy = s.position.y - L.position.y;
      const double d = std::sqrt(dx * dx + dy * dy);
      double att = 0.0;
      if (d <= s.ref_distance) att = 1.0;
      else if (d <= s.max_distance) att = s.ref_distance / (s.ref_distance + s.rolloff * (d - s.ref_distance));
      const double sn = d == 0.0 ? 0.0 : std::sin(std::atan2(dy, dx) - L.heading);
      gl = s.gain * att * (1.0 + sn) / 2.0;
      gr = s.gain * att * (1.0 - sn) / 2.0;
    }
    const std::size_t len = s.track->size();
    const std::size_t cycle = len + s.gap;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pos = s.playhead + i;
      std::size_t idx;
      if (s.loop) {
        idx = pos % cycle;
      } else {
        if (pos >= len) break;
        idx = pos;
      }
      if (idx < len) {
        out.left[i] += static_cast<float>(gl) * s.track->samples[idx];
        out.right[i] += static_cast<float>(gr) * s.track->samples[idx];
      }
    }
  }
  std::size_t c = 0;
  for (auto* ch : {&out.left, &out.right}) {
    for (auto& v : *ch) {
      if (v > 1.0f || v < -1.0f) ++c;
      v = std::clamp(v, -1.0f, 1.0f);
    }
  }
  if (clamped) *clamped = c;
  return out;
}

std::vector<SoundSource> random_scene(std::mt19937& gen, int count, bool with_peak) {
  std::uniform_real_distribution<double> pos(0.0, 16.0);
  std::uniform_int_distribution<std::size_t> len(100, 5000);
  std::vector<SoundSource> out;
  for (int i = 0; i < count; ++i) {
    auto src = make_source(noise_track(gen, len(gen), 0.5f, with_peak), {pos(gen), pos(gen)});
    src.playhead = std::uniform_int_distribution<std::size_t>(0, src.track->size() - 1)(gen);
    src.gap = (i % 3 == 0) ? len(gen) : 0;
    src.loop = i % 5 != 4;
    src.spatialized = i % 4 != 3;
    out.push_back(src);
  }
  return out;
}

double max_abs_diff(const AudioBuffer& a, const AudioBuffer& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, static_cast<double>(std::abs(a.left[i] - b.left[i])));
    m = std::max(m, static_cast<double>(std::abs(a.right[i] - b.right[i])));
  }
  return m;
}

}  // namespace

TEST(RenderParams, SamplesPerStep) {
  EXPECT_EQ(samples_per_step({22050, 35}, 4), 2520u);
  EXPECT_EQ(samples_per_step({22050, 35}, 1), 630u);
  EXPECT_EQ(samples_per_step({44100, 35}, 2), 2520u);
  EXPECT_THROW(samples_per_step({22050, 34}, 4), ConfigError);
  EXPECT_THROW(samples_per_step({22050, 35}, 0), ConfigError);
  EXPECT_NEAR(2520.0 / 22050.0, 0.114, 5e-4);
}

TEST(Attenuation, Examples) {
  SoundSource s;
  EXPECT_DOUBLE_EQ(attenuation_gain(s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(attenuation_gain(s, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(attenuation_gain(s, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(attenuation_gain(s, 4.0), 1.0 / 13.0);
  EXPECT_DOUBLE_EQ(attenuation_gain(s, 12.0), 1.0 / 45.0);
  EXPECT_DOUBLE_EQ(attenuation_gain(s, 12.0001), 0.0);
}

TEST(Attenuation, MonotoneNonIncreasing) {
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> d(0.0, 20.0);
  SoundSource s;
  std::vector<double> xs(1000);
  for (auto& x : xs) x = d(gen);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 1; i < xs.size(); ++i) {
    ASSERT_LE(attenuation_gain(s, xs[i]), attenuation_gain(s, xs[i - 1])) << xs[i - 1] << " -> " << xs[i];
  }
  for (double x : xs) {
    const double g = attenuation_gain(s, x);
    ASSERT_GE(g, 0.0);
    ASSERT_LE(g, 1.0);
  }
}

TEST(Pan, Examples) {
  const ListenerPose at_origin{{0.0, 0.0}, 0.0};
  const auto ahead = pan_gains(at_origin, {3.0, 0.0});
  EXPECT_DOUBLE_EQ(ahead.left, 0.5);
  EXPECT_DOUBLE_EQ(ahead.right, 0.5);
  const auto left = pan_gains(at_origin, {0.0, 2.0});
  EXPECT_DOUBLE_EQ(left.left, 1.0);
  EXPECT_DOUBLE_EQ(left.right, 0.0);
  const auto right = pan_gains(at_origin, {0.0, -2.0});
  EXPECT_DOUBLE_EQ(right.left, 0.0);
  EXPECT_DOUBLE_EQ(right.right, 1.0);
  const auto same = pan_gains(at_origin, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(same.left, 0.5);
  EXPECT_DOUBLE_EQ(same.right, 0.5);
}

TEST(Pan, MirroredSourceSwapsGainsExactly) {
  std::mt19937 gen(2);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  const ListenerPose L{{0.0, 0.0}, 0.0};
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p{d(gen), d(gen)};
    const auto a = pan_gains(L, p);
    const auto b = pan_gains(L, {p.x, -p.y});
    ASSERT_EQ(a.left, b.right);
    ASSERT_EQ(a.right, b.left);
  }
}

TEST(Pan, InvariantUnderRigidMotion) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 rel{d(gen), d(gen)};
    const auto base = pan_gains({{0.0, 0.0}, 0.0}, rel);
    const double h = ang(gen);
    const Vec2 origin{d(gen), d(gen)};
    const Vec2 rotated{rel.x * std::cos(h) - rel.y * std::sin(h), rel.x * std::sin(h) + rel.y * std::cos(h)};
    const auto moved = pan_gains({origin, h}, origin + rotated);
    ASSERT_NEAR(base.left, moved.left, 1e-9);
    ASSERT_NEAR(base.left + base.right, 1.0, 1e-15);
  }
}

TEST(Render, NoSourcesIsExactlySilent) {
  std::vector<float> l(2520, 0.7f), r(2520, -0.3f);
  const auto stats = render_into({}, {}, l, r);
  EXPECT_EQ(stats.clamped, 0u);
  for (std::size_t i = 0; i < l.size(); ++i) {
    ASSERT_EQ(l[i], 0.0f);
    ASSERT_EQ(r[i], 0.0f);
  }
}

TEST(Render, MatchesReferenceMixer) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> pos(0.0, 16.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 50; ++trial) {
    auto sources = random_scene(gen, 1 + trial % 12, trial % 2 == 0);
    const ListenerPose L{{pos(gen), pos(gen)}, ang(gen)};
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6000)(gen);
    const auto expect = reference_mix(sources, L, n);
    const auto got = render_step(sources, L, {}, n);
    ASSERT_LT(max_abs_diff(expect, got), 1e-6) << "trial " << trial;
  }
}

TEST(Render, TwoCallsEqualOneCallBitExact) {
  std::mt19937 gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_scene(gen, 1 + trial % 10, false);
    auto b = a;
    const ListenerPose L{{8.0, 8.0}, 0.3};
    const std::size_t n1 = std::uniform_int_distribution<std::size_t>(0, 4000)(gen);
    const std::size_t n2 = std::uniform_int_distribution<std::size_t>(0, 4000)(gen);
    const auto whole = render_step(a, L, {}, n1 + n2);
    const auto first = render_step(b, L, {}, n1);
    const auto second = render_step(b, L, {}, n2);
    std::vector<float> joined_l(first.left), joined_r(first.right);
    joined_l.insert(joined_l.end(), second.left.begin(), second.left.end());
    joined_r.insert(joined_r.end(), second.right.begin(), second.right.end());
    ASSERT_EQ(whole.left, joined_l) << "trial " << trial;
    ASSERT_EQ(whole.right, joined_r) << "trial " << trial;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ(a[i].playhead, b[i].playhead);
      ASSERT_EQ(a[i].active, b[i].active);
    }
  }
}

TEST(Render, SummationOrderIndependentOfSourceCount) {
  // Mixing passes group sources; the sum must equal adding one at a time.
  std::mt19937 gen(7);
  auto sources = random_scene(gen, 19, false);
  for (auto& s : sources) s.loop = true;
  const ListenerPose L{{4.0, 5.0}, 1.0};
  auto all = sources;
  const auto mixed = render_step(all, L, {}, 3000);
  std::vector<float> l(3000, 0.0f), r(3000, 0.0f);
  for (auto s : sources) {
    std::vector<SoundSource> one{s};
    std::vector<float> tl(3000), tr(3000);
    // Single-source contributions, accumulated in source order.
    render_into(one, L, tl, tr);
    for (std::size_t i = 0; i < l.size(); ++i) {
      l[i] += tl[i];
      r[i] += tr[i];
    }
  }
  for (auto& v : l) v = std::clamp(v, -1.0f, 1.0f);
  for (auto& v : r) v = std::clamp(v, -1.0f, 1.0f);
  EXPECT_EQ(mixed.left, l);
  EXPECT_EQ(mixed.right, r);
}

TEST(Render, Linearity) {
  std::mt19937 gen(8);
  auto a = random_scene(gen, 3, false);
  auto b = random_scene(gen, 3, false);
  for (auto& s : a) s.gain = 0.2f;
  for (auto& s : b) s.gain = 0.2f;
  std::vector<SoundSource> both(a);
  both.insert(both.end(), b.begin(), b.end());
  const ListenerPose L{{6.0, 6.0}, -0.7};
  const auto ra = render_step(a, L, {}, 2520);
  const auto rb = render_step(b, L, {}, 2520);
  const auto rab = render_step(both, L, {}, 2520);
  for (std::size_t i = 0; i < 2520; ++i) {
    ASSERT_NEAR(rab.left[i], ra.left[i] + rb.left[i], 1e-6);
    ASSERT_NEAR(rab.right[i], ra.right[i] + rb.right[i], 1e-6);
  }
}

TEST(Render, ColocatedSourcesDoubleExactly) {
  std::mt19937 gen(9);
  const auto track = noise_track(gen, 3000, 0.2f);
  auto s = make_source(track, {3.0, 4.0});
  std::vector<SoundSource> one{s};
  std::vector<SoundSource> two{s, s};
  const ListenerPose L{{1.0, 1.0}, 0.0};
  const auto r1 = render_step(one, L, {}, 2520);
  const auto r2 = render_step(two, L, {}, 2520);
  for (std::size_t i = 0; i < 2520; ++i) {
    ASSERT_EQ(r2.left[i], 2.0f * r1.left[i]);
    ASSERT_EQ(r2.right[i], 2.0f * r1.right[i]);
  }
}

TEST(Render, ClampCountsSaturatedSamples) {
  std::mt19937 gen(10);
  auto src = make_source(noise_track(gen, 2520, 1.0f), {0.0, 0.0});
  src.spatialized = false;
  src.gain = 4.0f;
  std::vector<SoundSource> sources{src};
  std::size_t expect = 0;
  const auto ref = reference_mix(sources, {}, 2520, &expect);
  RenderStats stats;
  const auto out = render_step(sources, {}, {}, 2520, &stats);
  EXPECT_GT(expect, 0u);
  EXPECT_EQ(stats.clamped, expect);
  EXPECT_EQ(out.left, ref.left);
  out.validate();
}

TEST(Render, PeakBoundNeverChangesOutput) {
  // With a known track peak the clamp pass may be skipped; results must match
  // the always-clamp path bit for bit.
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> pos(0.0, 16.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::mt19937 a_gen(static_cast<unsigned>(trial)), b_gen(static_cast<unsigned>(trial));
    auto with = random_scene(a_gen, 1 + trial % 9, true);
    auto without = random_scene(b_gen, 1 + trial % 9, false);
    for (std::size_t i = 0; i < with.size(); ++i) with[i].gain = without[i].gain = 1.0f + trial % 4;
    const ListenerPose L{{pos(gen), pos(gen)}, 0.1 * trial};
    RenderStats sa, sb;
    const auto ra = render_step(with, L, {}, 2520, &sa);
    const auto rb = render_step(without, L, {}, 2520, &sb);
    ASSERT_EQ(ra.left, rb.left);
    ASSERT_EQ(ra.right, rb.right);
    ASSERT_EQ(sa.clamped, sb.clamped);
  }
}

TEST(Render, NonLoopingSourceStopsAtEnd) {
  auto src = make_source(make_track(std::vector<float>(1000, 0.5f)), {});
  src.loop = false;
  src.spatialized = false;
  src.playhead = 600;
  std::vector<SoundSource> sources{src};
  const auto out = render_step(sources, {}, {}, 630);
  for (std::size_t i = 0; i < 400; ++i) ASSERT_EQ(out.left[i], 0.25f);
  for (std::size_t i = 400; i < 630; ++i) ASSERT_EQ(out.left[i], 0.0f);
  EXPECT_FALSE(sources[0].active);
  EXPECT_EQ(sources[0].playhead, 1000u);
  const auto after = render_step(sources, {}, {}, 630);
  for (float v : after.left) ASSERT_EQ(v, 0.0f);
}

TEST(Render, GapInsertsSilenceBetweenPasses) {
  auto src = make_source(make_track(std::vector<float>(100, 0.5f)), {});
  src.spatialized = false;
  src.gap = 50;
  std::vector<SoundSource> sources{src};
  const auto out = render_step(sources, {}, {}, 450);
  for (std::size_t i = 0; i < 450; ++i) {
    const bool on = i % 150 < 100;
    ASSERT_EQ(out.left[i], on ? 0.25f : 0.0f) << i;
  }
  EXPECT_EQ(sources[0].playhead, 0u);
}

TEST(Render, Deterministic) {
  std::mt19937 gen(12);
  const auto scene = random_scene(gen, 7, true);
  auto a = scene, b = scene;
  const ListenerPose L{{2.0, 9.0}, 2.0};
  for (int step = 0; step < 20; ++step) {
    const auto ra = render_step(a, L, {}, 2520);
    const auto rb = render_step(b, L, {}, 2520);
    ASSERT_EQ(ra, rb);
  }
}

TEST(Render, MismatchedSpansRejected) {
  std::vector<float> l(10), r(11);
  EXPECT_THROW(render_into({}, {}, l, r), ShapeError);
}
