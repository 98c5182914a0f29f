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

// Rule-based virtual-force policies.
//
// A policy sums virtual forces into a desired direction, then picks the
// action whose induced motion (the velocity after one simulated step of the
// action force) points closest to it. Ties within kCosineTieTolerance go to
// the earlier action in Forward, TurnLeft, TurnRight, Backward order.

#ifndef T2E_AGENTS_HPP_
#define T2E_AGENTS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "t2e/dynamics.hpp"
#include "t2e/eikonal.hpp"
#include "t2e/gridmap.hpp"
#include "t2e/rng.hpp"
#include "t2e/snapshot.hpp"

namespace t2e {

struct HeuristicConfig {
  double w_opponent = 1.0;
  double w_teammate = 0.5;
  double w_obstacle = 1.0;
  double perception_radius = 6.0;
  double teammate_radius = 1.0;
  double hold_distance = 0.3;  // pursuers stop inside this (m)
  double stop_threshold = 1e-6;
  double noise_sigma = 0.0;  // softmax temperature over cosines; 0 = argmax
};

inline constexpr double kCosineTieTolerance = 1e-9;

inline constexpr std::array<Action, 4> kMovingActionsByPriority = {
    Action::Forward, Action::TurnLeft, Action::TurnRight, Action::Backward};

/// Direction cosine between `desired` and the velocity each moving action
/// would produce, in kMovingActionsByPriority order. `external` is the
/// obstacle repulsion acting on the robot this step.
inline std::array<double, 4> action_alignment(const RobotState& state,
                                              const RobotSpec& spec,
                                              Vec2 desired, double dt,
                                              Vec2 external = {}) {
  std::array<double, 4> cosines{};
  const double dn = norm(desired);
  for (std::size_t k = 0; k < kMovingActionsByPriority.size(); ++k) {
    const ActionEffect e =
        action_force(state, kMovingActionsByPriority[k], spec, dt);
    const Vec2 v = clamp_norm(
        state.velocity + clamp_norm(e.force + external, spec.max_accel) * dt,
        spec.max_speed);
    const double vn = norm(v);
    cosines[k] = (vn > 0.0 && dn > 0.0) ? dot(v, desired) / (vn * dn) : -1.0;
  }
  return cosines;
}

inline Action project_force(const RobotState& state, const RobotSpec& spec,
                            Vec2 desired, double dt,
                            const HeuristicConfig& config,
                            Rng* rng = nullptr, Vec2 external = {}) {
  if (norm(desired) < config.stop_threshold) return Action::Stop;
  const std::array<double, 4> cosines =
      action_alignment(state, spec, desired, dt, external);
  if (config.noise_sigma > 0.0 && rng != nullptr) {
    std::array<double, 4> weights{};
    double total = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      weights[k] = std::exp((cosines[k] - 1.0) / config.noise_sigma);
      total += weights[k];
    }
    double pick = rng->uniform01() * total;
    for (std::size_t k = 0; k < 4; ++k) {
      pick -= weights[k];
      if (pick < 0.0) return kMovingActionsByPriority[k];
    }
    return kMovingActionsByPriority[3];
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < 4; ++k) {
    if (cosines[k] > cosines[best] + kCosineTieTolerance) best = k;
  }
  return kMovingActionsByPriority[best];
}

/// Desired force on the target: inverse-distance push away from every
/// captor in range plus the obstacle repulsion term.
inline Vec2 evader_force(const OccupancyGrid& grid, const Snapshot& snap,
                         std::span<const RobotSpec> specs,
                         const HeuristicConfig& config) {
  const RobotState& me = snap.target();
  Vec2 force;
  for (std::size_t i = 0; i < snap.n_captors; ++i) {
    const Vec2 away = me.position - snap.robots[i].position;
    const double d2 = dot(away, away);
    if (d2 == 0.0 || d2 > config.perception_radius * config.perception_radius) {
      continue;
    }
    force += away * (config.w_opponent / d2);
  }
  force += repulsion_force(grid, me, specs[snap.target_index()]) *
           config.w_obstacle;
  return force;
}

inline Action evader_policy(const OccupancyGrid& grid, const Snapshot& snap,
                            std::span<const RobotSpec> specs,
                            const HeuristicConfig& config, double dt,
                            Rng* rng = nullptr) {
  const Vec2 force = evader_force(grid, snap, specs, config);
  const RobotSpec& spec = specs[snap.target_index()];
  return project_force(snap.target(), spec, force, dt, config, rng,
                       repulsion_force(grid, snap.target(), spec));
}

/// Path-length field from the target used to steer captors around walls.
/// Cells closer than `inflation` to a wall are avoided where possible.
struct PursuitField {
  std::vector<double> inflated;
  std::vector<double> plain;
};

inline PursuitField make_pursuit_field(const OccupancyGrid& grid, Vec2 target,
                                       double inflation = kRobotRadius) {
  PursuitField field;
  field.inflated = solve_distance(grid, target, {.inflation_radius = inflation});
  field.plain = solve_distance(grid, target);
  return field;
}

inline constexpr int kGuidanceDirections = 16;
inline constexpr double kGuidanceLookaheadCells = 3.0;

/// Unit direction of steepest path-length descent from `from`, probing
/// kGuidanceDirections straight segments. Falls back to the straight line
/// toward `goal` when no probe improves on the current cell.
inline Vec2 guidance_direction(const OccupancyGrid& grid,
                               const PursuitField& field, Vec2 from,
                               Vec2 goal) {
  const Vec2 straight = goal - from;
  const double gap = norm(straight);
  const double look = kGuidanceLookaheadCells * grid.resolution();
  if (gap == 0.0) return {};
  if (gap <= look && cast_ray(grid, from, straight * (1.0 / gap), gap) >= gap) {
    return straight * (1.0 / gap);
  }
  const Cell here = grid.cell_of(from);
  const std::vector<double>* values = &field.inflated;
  if (!std::isfinite((*values)[grid.index(here)])) values = &field.plain;
  double best = (*values)[grid.index(here)];
  Vec2 best_dir = straight * (1.0 / gap);
  for (int k = 0; k < kGuidanceDirections; ++k) {
    const Vec2 u = unit_from_angle(2.0 * std::numbers::pi * k /
                                   kGuidanceDirections);
    if (cast_ray(grid, from, u, look) < look) continue;
    const double v = (*values)[grid.index(grid.cell_of(from + u * look))];
    if (v < best - kCosineTieTolerance) {
      best = v;
      best_dir = u;
    }
  }
  return best_dir;
}

/// Desired force on captor `i`: unit pull toward the target (along the
/// path-length field when one is given), linear push away from teammates
/// closer than teammate_radius that are no farther from the target, obstacle
/// repulsion.
inline Vec2 pursuer_force(const OccupancyGrid& grid, const Snapshot& snap,
                          std::span<const RobotSpec> specs, std::size_t i,
                          const HeuristicConfig& config,
                          const PursuitField* field = nullptr) {
  const RobotState& me = snap.robots[i];
  const Vec2 to_target = snap.target().position - me.position;
  const double dt_norm = norm(to_target);
  Vec2 force;
  Vec2 pull_dir{1.0, 0.0};
  if (dt_norm > 0.0) {
    pull_dir = field ? guidance_direction(grid, *field, me.position,
                                          snap.target().position)
                     : to_target * (1.0 / dt_norm);
    force += pull_dir;
  }
  const Vec2 goal = snap.target().position;
  for (std::size_t k = 0; k < snap.n_captors; ++k) {
    if (k == i) continue;
    const Vec2 away = me.position - snap.robots[k].position;
    const double d = norm(away);
    if (d >= config.teammate_radius) continue;
    // Only teammates at least as close to the target push; a captor is never
    // held back by the ones queueing behind it.
    if (distance(snap.robots[k].position, goal) > dt_norm) continue;
    Vec2 dir;
    if (d > 0.0) {
      dir = away * (1.0 / d);
    } else {
      // Co-located: split sideways relative to the target, by index.
      const Vec2 side{-pull_dir.y, pull_dir.x};
      dir = i < k ? side : -side;
    }
    force += dir * (config.w_teammate * (1.0 - d / config.teammate_radius));
  }
  // The wall term may steer sideways but never against the pull, so narrow
  // doorways do not stall a captor.
  Vec2 wall = repulsion_force(grid, me, specs[i]) * config.w_obstacle;
  const double back = dot(wall, pull_dir);
  if (back < 0.0) wall -= pull_dir * back;
  force += wall;
  return force;
}

inline std::vector<Action> pursuer_policy(const OccupancyGrid& grid,
                                          const Snapshot& snap,
                                          std::span<const RobotSpec> specs,
                                          const HeuristicConfig& config,
                                          double dt, Rng* rng = nullptr,
                                          const PursuitField* field = nullptr) {
  std::vector<Action> actions(snap.n_captors, Action::Stop);
  for (std::size_t i = 0; i < snap.n_captors; ++i) {
    if (distance(snap.robots[i].position, snap.target().position) <
        config.hold_distance) {
      continue;
    }
    actions[i] = project_force(
        snap.robots[i], specs[i],
        pursuer_force(grid, snap, specs, i, config, field), dt, config, rng,
        repulsion_force(grid, snap.robots[i], specs[i]));
  }
  return actions;
}

}  // namespace t2e

#endif  // T2E_AGENTS_HPP_
