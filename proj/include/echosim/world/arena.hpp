#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <vector>

#include "echosim/geometry.hpp"

namespace echosim::world {

struct Room {
  Vec2 lo;
  Vec2 hi;

  bool contains(Vec2 p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
};

// Square arena [0, size]^2 split into four rooms by a wall at x = size/2 and
// one at y = size/2. Each dividing wall has two doorways, centered at the
// quarter points, so every room connects to both of its neighbours.
struct Arena {
  double size = 16.0;
  double doorway_width = 2.0;
  std::vector<Segment> walls;
  std::array<Room, 4> rooms{};
  std::vector<Vec2> doorways;

  double wall_distance(Vec2 p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : walls) best = std::min(best, distance_to_segment(p, w));
    return best;
  }

  bool inside(Vec2 p) const { return p.x >= 0.0 && p.x <= size && p.y >= 0.0 && p.y <= size; }

  int room_of(Vec2 p) const {
    for (std::size_t i = 0; i < rooms.size(); ++i) {
      if (rooms[i].contains(p)) return static_cast<int>(i);
    }
    return -1;
  }
};

inline Arena make_arena(double size, double doorway_width) {
  Arena a;
  a.size = size;
  a.doorway_width = doorway_width;
  const double h = size / 2.0;
  const double q1 = size / 4.0;
  const double q3 = 3.0 * size / 4.0;
  const double g = doorway_width / 2.0;

  a.walls = {
      {{0, 0}, {size, 0}},
      {{size, 0}, {size, size}},
      {{size, size}, {0, size}},
      {{0, size}, {0, 0}},
      // x = h divider
      {{h, 0}, {h, q1 - g}},
      {{h, q1 + g}, {h, q3 - g}},
      {{h, q3 + g}, {h, size}},
      // y = h divider
      {{0, h}, {q1 - g, h}},
      {{q1 + g, h}, {q3 - g, h}},
      {{q3 + g, h}, {size, h}},
  };
  a.doorways = {{h, q1}, {h, q3}, {q1, h}, {q3, h}};
  a.rooms = {Room{{0, 0}, {h, h}}, Room{{h, 0}, {size, h}}, Room{{0, h}, {h, size}}, Room{{h, h}, {size, size}}};
  return a;
}

}  // namespace echosim::world
