// Copyright 2026 The T2E Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Per-robot observations.
//
// Captors share internal state with each other but only see the target's
// pose; the target sees every captor's speed and pose. Each robot also gets
// a local obstacle mask that turns with it: row 0 is the far edge ahead of
// the robot, column 0 the far edge on its left.

#ifndef T2E_PERCEPTION_HPP_
#define T2E_PERCEPTION_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "t2e/dynamics.hpp"
#include "t2e/errors.hpp"
#include "t2e/gridmap.hpp"
#include "t2e/snapshot.hpp"
#include "t2e/vec2.hpp"

namespace t2e {

struct PerceptionConfig {
  int window_cells = 25;
  double window_resolution = 0.2;
  /// Emit the observer's own speed in teammate blocks instead of the
  /// teammate's.
  bool teammate_speed_self = false;
  /// Emit (vx, vy) instead of the scalar speed.
  bool full_velocity = false;
};

struct SelfBlock {
  Vec2 velocity;
  double speed = 0.0;
  Vec2 position;  // normalized by map extent to [0, 1]^2
  double heading = 0.0;
};

struct PeerBlock {
  std::optional<double> speed;     // absent for captors observing the target
  std::optional<Vec2> velocity;
  Vec2 relative_position;          // observer minus observed, meters
  double relative_heading = 0.0;   // observer minus observed, [-pi, pi)
};

struct AgentObservation {
  SelfBlock self;
  std::vector<PeerBlock> teammates;  // ascending robot index
  std::vector<PeerBlock> opponents;  // ascending robot index

  std::vector<double> flatten(const PerceptionConfig& config) const {
    std::vector<double> out;
    auto push_motion = [&](const std::optional<double>& speed,
                           const std::optional<Vec2>& velocity) {
      if (config.full_velocity) {
        if (velocity) {
          out.push_back(velocity->x);
          out.push_back(velocity->y);
        }
      } else if (speed) {
        out.push_back(*speed);
      }
    };
    push_motion(self.speed, self.velocity);
    out.push_back(self.position.x);
    out.push_back(self.position.y);
    out.push_back(self.heading);
    for (const auto* group : {&teammates, &opponents}) {
      for (const PeerBlock& b : *group) {
        push_motion(b.speed, b.velocity);
        out.push_back(b.relative_position.x);
        out.push_back(b.relative_position.y);
        out.push_back(b.relative_heading);
      }
    }
    return out;
  }
};

struct ObstacleObservation {
  int size = 0;
  double window_resolution = 0.0;
  std::vector<std::uint8_t> mask;  // row-major size x size, 1 = obstacle

  std::uint8_t at(int row, int col) const {
    return mask[static_cast<std::size_t>(row) * size + col];
  }
};

struct Observation {
  AgentObservation agent;
  ObstacleObservation obstacle;
};

/// Flattened agent vector length for a team with `n_captors` captors.
inline std::size_t agent_observation_size(std::size_t n_captors, Team team,
                                          const PerceptionConfig& config = {}) {
  const std::size_t motion = config.full_velocity ? 2 : 1;
  const std::size_t full = motion + 3;
  if (team == Team::Captor) return full + full * (n_captors - 1) + 3;
  return full + full * n_captors;
}

/// Samples the map around a pose on a heading-aligned window, nearest cell.
inline ObstacleObservation observe_obstacles(const OccupancyGrid& grid,
                                             const RobotState& state,
                                             const PerceptionConfig& config) {
  ObstacleObservation out;
  out.size = config.window_cells;
  out.window_resolution = config.window_resolution;
  out.mask.assign(static_cast<std::size_t>(out.size) * out.size, 0);
  const Vec2 ahead = unit_from_angle(state.heading);
  const Vec2 left{-ahead.y, ahead.x};
  const double half = 0.5 * (out.size - 1);
  for (int r = 0; r < out.size; ++r) {
    const double fwd = (half - r) * config.window_resolution;
    for (int c = 0; c < out.size; ++c) {
      const double lft = (half - c) * config.window_resolution;
      const Vec2 p = state.position + ahead * fwd + left * lft;
      out.mask[static_cast<std::size_t>(r) * out.size + c] =
          grid.occupied_at(p) ? 1 : 0;
    }
  }
  return out;
}

inline Observation observe(const OccupancyGrid& grid, const Snapshot& snap,
                           std::size_t robot_index,
                           const PerceptionConfig& config = {}) {
  if (robot_index >= snap.robots.size()) {
    throw InvalidIndex("robot index out of range");
  }
  const RobotState& me = snap.robots[robot_index];
  Observation obs;
  AgentObservation& a = obs.agent;
  a.self.velocity = me.velocity;
  a.self.speed = me.speed();
  a.self.position = {me.position.x / grid.extent_x(),
                     me.position.y / grid.extent_y()};
  a.self.heading = me.heading;

  auto full_block = [&](const RobotState& other) {
    PeerBlock b;
    b.speed = other.speed();
    b.velocity = other.velocity;
    b.relative_position = me.position - other.position;
    b.relative_heading = wrap_angle(me.heading - other.heading);
    return b;
  };

  if (snap.team_of(robot_index) == Team::Captor) {
    for (std::size_t k = 0; k < snap.n_captors; ++k) {
      if (k == robot_index) continue;
      PeerBlock b = full_block(snap.robots[k]);
      if (config.teammate_speed_self) {
        b.speed = me.speed();
        b.velocity = me.velocity;
      }
      a.teammates.push_back(b);
    }
    PeerBlock t = full_block(snap.target());
    t.speed.reset();
    t.velocity.reset();
    a.opponents.push_back(t);
  } else {
    for (std::size_t i = 0; i < snap.n_captors; ++i) {
      a.opponents.push_back(full_block(snap.robots[i]));
    }
  }
  obs.obstacle = observe_obstacles(grid, me, config);
  return obs;
}

}  // namespace t2e

#endif  // T2E_PERCEPTION_HPP_
