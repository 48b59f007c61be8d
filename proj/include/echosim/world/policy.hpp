#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "echosim/random.hpp"
#include "echosim/world/env.hpp"

namespace echosim::world {

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action act(const Observation& obs, const Environment& env) = 0;
};

class NoopPolicy final : public Policy {
 public:
  Action act(const Observation&, const Environment&) override { return Action::kNoop; }
};

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
  Action act(const Observation&, const Environment&) override {
    return static_cast<Action>(uniform_index(rng_, kActionCount));
  }

 private:
  Rng rng_;
};

// Scripted controller with privileged access to the target pillar. Plans a
// grid path around walls and non-target pillars once per episode, then
// steers toward the farthest nearby path point in clear line of sight. Turn
// actions rotate by frameskip * turn_step, so headings are quantized and the
// agent zig-zags along the path: move forward when the bearing error is
// under half a turn action, otherwise turn.
class OraclePolicy final : public Policy {
 public:
  Action act(const Observation&, const Environment& env) override {
    const auto& st = env.state();
    if (!planned_ || st.tic == 0 || planned_seed_ != st.episode_seed) plan(env);

    const Vec2 pos = st.agent.position;
    constexpr std::size_t kWindow = 40;
    constexpr double kReach = 1.5;
    const std::size_t last = std::min(path_.size() - 1, cursor_ + kWindow);
    for (std::size_t i = cursor_ + 1; i <= last; ++i) {
      if (distance(pos, path_[i]) < distance(pos, path_[cursor_])) cursor_ = i;
    }
    std::size_t aim = std::min(path_.size() - 1, cursor_ + 1);
    for (std::size_t i = std::min(path_.size() - 1, cursor_ + kWindow); i > aim; --i) {
      if (distance(pos, path_[i]) <= kReach && line_clear(env, pos, path_[i])) {
        aim = i;
        break;
      }
    }
    const Vec2 to = path_[aim] - pos;
    const double err = wrap_angle(std::atan2(to.y, to.x) - st.agent.heading);
    const auto& cfg = env.config();
    const double action_turn = cfg.turn_step_deg * cfg.frameskip * std::numbers::pi / 180.0;
    if (std::abs(err) < action_turn / 2.0) return Action::kForward;
    return err > 0.0 ? Action::kTurnLeft : Action::kTurnRight;
  }

 private:
  static constexpr double kCell = 0.2;

  bool point_clear(const Environment& env, Vec2 p, double wall_c, double pillar_c) const {
    if (env.arena().wall_distance(p) < wall_c) return false;
    const auto& st = env.state();
    for (const auto& pillar : st.pillars) {
      if (!pillar.is_target && distance(p, pillar.position) < pillar_c) return false;
    }
    return true;
  }

  bool line_clear(const Environment& env, Vec2 a, Vec2 b) const {
    const double len = distance(a, b);
    const int n = std::max(1, static_cast<int>(std::ceil(len / 0.05)));
    const double wall_c = env.config().agent_radius + 0.1;
    const double pillar_c = env.config().touch_radius + 0.25;
    for (int i = 1; i <= n; ++i) {
      const double t = static_cast<double>(i) / n;
      if (!point_clear(env, a + t * (b - a), wall_c, pillar_c)) return false;
    }
    return true;
  }

  void plan(const Environment& env) {
    const auto& st = env.state();
    planned_ = true;
    planned_seed_ = st.episode_seed;
    cursor_ = 0;
    const Vec2 start = st.agent.position;
    const Vec2 goal = st.pillars[static_cast<std::size_t>(st.target)].position;
    // Wide berth first; tighter clearances only if the wide one has no path.
    const double touch = env.config().touch_radius;
    const double agent = env.config().agent_radius;
    for (const auto& [wall_c, pillar_c] : {std::pair{agent + 0.35, touch + 0.7}, std::pair{agent + 0.15, touch + 0.35}}) {
      path_ = grid_path(env, start, goal, wall_c, pillar_c);
      if (!path_.empty()) return;
    }
    path_ = {start, goal};
  }

  std::vector<Vec2> grid_path(const Environment& env, Vec2 start, Vec2 goal, double wc, double pc) const {
    const double size = env.arena().size;
    const int n = static_cast<int>(std::ceil(size / kCell));
    auto center = [&](int i, int j) { return Vec2{(i + 0.5) * kCell, (j + 0.5) * kCell}; };
    auto cell_of = [&](Vec2 p) {
      const int i = std::clamp(static_cast<int>(p.x / kCell), 0, n - 1);
      const int j = std::clamp(static_cast<int>(p.y / kCell), 0, n - 1);
      return j * n + i;
    };
    const int src = cell_of(start);
    const int dst = cell_of(goal);
    std::vector<char> free(static_cast<std::size_t>(n * n));
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) free[static_cast<std::size_t>(j * n + i)] = point_clear(env, center(i, j), wc, pc);
    }
    free[static_cast<std::size_t>(src)] = 1;
    free[static_cast<std::size_t>(dst)] = 1;

    std::vector<double> dist(free.size(), std::numeric_limits<double>::infinity());
    std::vector<int> prev(free.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[static_cast<std::size_t>(src)] = 0.0;
    open.push({0.0, src});
    while (!open.empty()) {
      const auto [d, u] = open.top();
      open.pop();
      if (d > dist[static_cast<std::size_t>(u)]) continue;
      if (u == dst) break;
      const int ui = u % n, uj = u / n;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int vi = ui + di, vj = uj + dj;
          if (vi < 0 || vj < 0 || vi >= n || vj >= n) continue;
          const int v = vj * n + vi;
          if (!free[static_cast<std::size_t>(v)]) continue;
          // No corner cutting on diagonals.
          if (di != 0 && dj != 0 &&
              (!free[static_cast<std::size_t>(uj * n + vi)] || !free[static_cast<std::size_t>(vj * n + ui)])) {
            continue;
          }
          const double nd = d + ((di != 0 && dj != 0) ? std::numbers::sqrt2 : 1.0);
          if (nd < dist[static_cast<std::size_t>(v)]) {
            dist[static_cast<std::size_t>(v)] = nd;
            prev[static_cast<std::size_t>(v)] = u;
            open.push({nd, v});
          }
        }
      }
    }
    if (prev[static_cast<std::size_t>(dst)] < 0 && src != dst) return {};
    std::vector<Vec2> path;
    path.push_back(goal);
    for (int c = prev[static_cast<std::size_t>(dst)]; c >= 0 && c != src; c = prev[static_cast<std::size_t>(c)]) {
      path.push_back(center(c % n, c / n));
    }
    path.push_back(start);
    std::reverse(path.begin(), path.end());
    return path;
  }

  bool planned_ = false;
  std::uint64_t planned_seed_ = 0;
  std::size_t cursor_ = 0;
  std::vector<Vec2> path_;
};

enum class PolicyKind { kNoop, kRandom, kOracle };

inline PolicyKind parse_policy_kind(const std::string& s) {
  if (s == "noop") return PolicyKind::kNoop;
  if (s == "random") return PolicyKind::kRandom;
  if (s == "oracle") return PolicyKind::kOracle;
  throw ConfigError("unknown policy '" + s + "' (valid: random, noop, oracle)");
}

inline const char* policy_kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::kNoop: return "noop";
    case PolicyKind::kRandom: return "random";
    case PolicyKind::kOracle: return "oracle";
  }
  return "?";
}

inline std::unique_ptr<Policy> make_policy(PolicyKind kind, std::uint64_t seed) {
  switch (kind) {
    case PolicyKind::kNoop: return std::make_unique<NoopPolicy>();
    case PolicyKind::kRandom: return std::make_unique<RandomPolicy>(seed);
    case PolicyKind::kOracle: return std::make_unique<OraclePolicy>();
  }
  throw ConfigError("unknown policy kind");
}

}  // namespace echosim::world
