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

// Per-robot motion model.
//
// Each step a discrete action becomes an action force, obstacle repulsion is
// added, the sum is clamped to the robot's acceleration limit, and the robot
// is integrated with semi-implicit Euler. Forces are expressed in
// acceleration units (m/s2).

#ifndef T2E_DYNAMICS_HPP_
#define T2E_DYNAMICS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>

#include "t2e/gridmap.hpp"
#include "t2e/vec2.hpp"

namespace t2e {

enum class Team { Captor, Target };

inline const char* to_string(Team team) {
  return team == Team::Captor ? "captor" : "target";
}

/// Wire codes are the enumerator values.
enum class Action : int {
  Forward = 0,
  TurnLeft = 1,
  TurnRight = 2,
  Stop = 3,
  Backward = 4,
};

inline constexpr std::array<Action, 5> kAllActions = {
    Action::Forward, Action::TurnLeft, Action::TurnRight, Action::Stop,
    Action::Backward};

inline constexpr int to_code(Action a) { return static_cast<int>(a); }

inline std::optional<Action> action_from_code(long long code) {
  if (code < 0 || code > 4) return std::nullopt;
  return static_cast<Action>(code);
}

inline const char* to_string(Action a) {
  switch (a) {
    case Action::Forward:
      return "forward";
    case Action::TurnLeft:
      return "turnleft";
    case Action::TurnRight:
      return "turnright";
    case Action::Stop:
      return "stop";
    case Action::Backward:
      return "backward";
  }
  return "?";
}

inline constexpr double kRobotRadius = 0.2;
inline constexpr double kMaxTurn = std::numbers::pi / 6.0;
inline constexpr double kCaptorMaxAccel = 3.0;
inline constexpr double kTargetMaxAccel = 4.0;
inline constexpr double kCaptorMaxSpeed = 1.0;
inline constexpr double kDefaultDt = 0.1;

struct RobotSpec {
  Team team = Team::Captor;
  double radius = kRobotRadius;
  double max_speed = kCaptorMaxSpeed;
  double max_accel = kCaptorMaxAccel;
  double max_turn = kMaxTurn;
  double action_force_mag = kCaptorMaxAccel;
  int repulse_m = 12;        // sampled repulsion directions
  double repulse_k = 3.0;    // danger radius = repulse_k * radius
  bool turn_thrust = true;   // turns also push along the new heading

  double danger_radius() const { return repulse_k * radius; }
};

inline RobotSpec captor_spec(double max_speed = kCaptorMaxSpeed) {
  RobotSpec s;
  s.team = Team::Captor;
  s.max_speed = max_speed;
  s.max_accel = kCaptorMaxAccel;
  s.action_force_mag = kCaptorMaxAccel;
  return s;
}

/// Target spec with max speed `speed_ratio` times the captor max speed.
inline RobotSpec target_spec(double speed_ratio = 1.0,
                             double captor_max_speed = kCaptorMaxSpeed) {
  RobotSpec s;
  s.team = Team::Target;
  s.max_speed = speed_ratio * captor_max_speed;
  s.max_accel = kTargetMaxAccel;
  s.action_force_mag = kTargetMaxAccel;
  return s;
}

struct RobotState {
  Vec2 position;
  Vec2 velocity;
  double heading = 0.0;  // [-pi, pi)

  double speed() const { return norm(velocity); }
  friend bool operator==(const RobotState&, const RobotState&) = default;
};

struct ActionEffect {
  double heading = 0.0;
  Vec2 force;
};

/// Heading after the action and the force it produces.
inline ActionEffect action_force(const RobotState& state, Action action,
                                 const RobotSpec& spec, double dt) {
  ActionEffect out{state.heading, {}};
  switch (action) {
    case Action::Forward:
      out.force = unit_from_angle(state.heading) * spec.action_force_mag;
      break;
    case Action::Backward:
      out.force = unit_from_angle(state.heading) * -spec.action_force_mag;
      break;
    case Action::Stop: {
      const double speed = state.speed();
      if (speed > 0.0) {
        const double mag = std::min(speed / dt, spec.max_accel);
        out.force = state.velocity * (-mag / speed);
      }
      break;
    }
    case Action::TurnLeft:
    case Action::TurnRight: {
      const double sign = action == Action::TurnLeft ? 1.0 : -1.0;
      out.heading = wrap_angle(state.heading + sign * spec.max_turn);
      if (spec.turn_thrust) {
        out.force = unit_from_angle(out.heading) * spec.action_force_mag;
      }
      break;
    }
  }
  return out;
}

/// Potential-field push away from obstacles sensed along `repulse_m`
/// directions around the heading. Each direction closer than the danger
/// radius contributes (1 - log(d / danger)) pointing away from the hit.
inline Vec2 repulsion_force(const OccupancyGrid& grid, const RobotState& state,
                            const RobotSpec& spec) {
  const double danger = spec.danger_radius();
  Vec2 total;
  for (int m = 1; m <= spec.repulse_m; ++m) {
    const double theta =
        state.heading + 2.0 * std::numbers::pi * m / spec.repulse_m;
    const Vec2 u = unit_from_angle(theta);
    const double d = cast_ray(grid, state.position, u, 2.0 * danger);
    if (d < danger) {
      const double mag = -std::log(std::max(d, kMinRayDistance) / danger) + 1.0;
      total -= u * mag;
    }
  }
  return total;
}

inline Vec2 clamp_norm(Vec2 v, double limit) {
  const double n = norm(v);
  if (n > limit) return v * (limit / n);
  return v;
}

struct RobotStep {
  RobotState state;
  Vec2 repulsion;
  bool repulsed = false;  // |f_v| > 0 this step
  bool collided = false;  // swept segment hit an obstacle; velocity zeroed
};

/// Advances one robot by `dt`. If the swept segment enters an occupied cell
/// the robot stops at the last free sample (samples every half cell) with
/// zero velocity.
inline RobotStep advance_robot(const OccupancyGrid& grid,
                               const RobotState& state, Action action,
                               const RobotSpec& spec, double dt) {
  const ActionEffect effect = action_force(state, action, spec, dt);
  RobotStep out;
  out.repulsion = repulsion_force(grid, state, spec);
  out.repulsed = out.repulsion.x != 0.0 || out.repulsion.y != 0.0;

  const Vec2 accel = clamp_norm(effect.force + out.repulsion, spec.max_accel);
  const Vec2 velocity = clamp_norm(state.velocity + accel * dt, spec.max_speed);
  const Vec2 delta = velocity * dt;
  const double travel = norm(delta);

  out.state.heading = effect.heading;
  out.state.velocity = velocity;
  out.state.position = state.position + delta;
  if (travel == 0.0) {
    out.state.position = state.position;
    return out;
  }

  const Vec2 dir = delta * (1.0 / travel);
  const double hit = cast_ray(grid, state.position, dir, travel);
  if (hit < travel || grid.occupied_at(out.state.position)) {
    const double spacing = 0.5 * grid.resolution();
    long k = static_cast<long>(std::ceil(std::min(hit, travel) / spacing)) - 1;
    Vec2 stop = state.position;
    for (; k > 0; --k) {
      const Vec2 sample = state.position + dir * (spacing * k);
      if (!grid.occupied_at(sample)) {
        stop = sample;
        break;
      }
    }
    out.state.position = stop;
    out.state.velocity = {};
    out.collided = true;
  }
  return out;
}

inline RobotState step_robot(const OccupancyGrid& grid,
                             const RobotState& state, Action action,
                             const RobotSpec& spec, double dt) {
  return advance_robot(grid, state, action, spec, dt).state;
}

}  // namespace t2e

#endif  // T2E_DYNAMICS_HPP_
