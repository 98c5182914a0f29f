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

#ifndef T2E_REWARDS_HPP_
#define T2E_REWARDS_HPP_

#include <span>
#include <vector>

#include "t2e/dynamics.hpp"
#include "t2e/eikonal.hpp"
#include "t2e/errors.hpp"
#include "t2e/gridmap.hpp"
#include "t2e/snapshot.hpp"

namespace t2e {

enum class RewardMode { Cooperative, Competitive };
enum class CaptureMethod { AszThreshold, CollisionProxy };

inline const char* to_string(RewardMode m) {
  return m == RewardMode::Cooperative ? "cooperative" : "competitive";
}
inline const char* to_string(CaptureMethod m) {
  return m == CaptureMethod::AszThreshold ? "asz" : "proxy";
}

struct RewardConfig {
  double k1 = -1.0;  // per meter of captor-target distance change
  double k2 = 5.0;   // contact bonus
  double k3 = 10.0;  // capture bonus
  double d_cs = 2.0 * kRobotRadius;
  double f_thre = kDefaultCaptureArea;
  double step_penalty = -0.4;
  double repulse_penalty = -1.0;
  RewardMode mode = RewardMode::Cooperative;
};

struct RewardBreakdown {
  double competition = 0.0;
  double private_reward = 0.0;
  double total = 0.0;
  double progress = 0.0;  // the k1 term alone (captors only)
  friend bool operator==(const RewardBreakdown&,
                         const RewardBreakdown&) = default;
};

/// Per-captor competition reward between consecutive snapshots. The
/// distance, contact and capture terms are summed.
inline std::vector<RewardBreakdown> competition_reward(
    const Snapshot& prev, const Snapshot& snap, bool captured,
    const RewardConfig& config) {
  std::vector<RewardBreakdown> out(snap.n_captors);
  const Vec2 target_now = snap.target().position;
  const Vec2 target_before = prev.target().position;
  for (std::size_t i = 0; i < snap.n_captors; ++i) {
    const double d_now = distance(snap.robots[i].position, target_now);
    const double d_before = distance(prev.robots[i].position, target_before);
    RewardBreakdown& r = out[i];
    r.progress = config.k1 * (d_now - d_before);
    r.competition = r.progress + (d_now < config.d_cs ? config.k2 : 0.0) +
                    (captured ? config.k3 : 0.0);
  }
  return out;
}

/// Step penalty plus the repulsion penalty when |f_v| > 0.
inline double private_reward(bool repulsed, const RewardConfig& config) {
  return config.step_penalty + (repulsed ? config.repulse_penalty : 0.0);
}

/// Zero-sum target reward: minus the captors' summed competition reward.
inline RewardBreakdown target_reward(
    std::span<const RewardBreakdown> captor_rewards, bool repulsed,
    const RewardConfig& config) {
  if (config.mode != RewardMode::Competitive) {
    throw ModeError("target competition reward requires competitive mode");
  }
  double sum = 0.0;
  for (const RewardBreakdown& r : captor_rewards) sum += r.competition;
  RewardBreakdown out;
  out.competition = -sum;
  out.private_reward = private_reward(repulsed, config);
  out.total = out.competition + out.private_reward;
  return out;
}

/// Full per-robot rewards for one step (captors first, then the target).
/// In cooperative mode the target only collects its private reward.
inline std::vector<RewardBreakdown> step_rewards(
    const Snapshot& prev, const Snapshot& snap,
    std::span<const std::uint8_t> repulsed, bool captured,
    const RewardConfig& config) {
  std::vector<RewardBreakdown> out =
      competition_reward(prev, snap, captured, config);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].private_reward = private_reward(repulsed[i] != 0, config);
    out[i].total = out[i].competition + out[i].private_reward;
  }
  const bool target_repulsed = repulsed[snap.target_index()] != 0;
  if (config.mode == RewardMode::Competitive) {
    out.push_back(target_reward(out, target_repulsed, config));
  } else {
    RewardBreakdown t;
    t.private_reward = private_reward(target_repulsed, config);
    t.total = t.private_reward;
    out.push_back(t);
  }
  return out;
}

/// Collision-proxy predicate: the target is trapped when every one of its
/// five actions either ends in an obstacle stop that moved it less than a
/// cell, or ends strictly within d_cs of a captor.
inline bool proxy_trapped(const OccupancyGrid& grid, const Snapshot& snap,
                          std::span<const RobotSpec> specs,
                          const RewardConfig& config, double dt) {
  const RobotState& target = snap.target();
  const RobotSpec& spec = specs[snap.target_index()];
  for (Action a : kAllActions) {
    const RobotStep step = advance_robot(grid, target, a, spec, dt);
    const bool blocked =
        step.collided &&
        distance(step.state.position, target.position) < grid.resolution();
    bool contact = false;
    for (std::size_t i = 0; i < snap.n_captors && !contact; ++i) {
      contact = distance(step.state.position, snap.robots[i].position) <
                config.d_cs;
    }
    if (!blocked && !contact) return false;
  }
  return true;
}

inline AszReport snapshot_asz(const OccupancyGrid& grid, const Snapshot& snap,
                              std::span<const RobotSpec> specs, double f_thre,
                              const AszOptions& options = {}) {
  std::vector<Vec2> captors;
  for (std::size_t i = 0; i < snap.n_captors; ++i) {
    captors.push_back(snap.robots[i].position);
  }
  return compute_asz(grid, captors, specs[0].max_speed,
                     snap.target().position,
                     specs[snap.target_index()].max_speed, f_thre, options);
}

inline bool capture_check(const OccupancyGrid& grid, const Snapshot& snap,
                          std::span<const RobotSpec> specs,
                          const RewardConfig& config, CaptureMethod method,
                          double dt = kDefaultDt) {
  if (method == CaptureMethod::AszThreshold) {
    return snapshot_asz(grid, snap, specs, config.f_thre).captured;
  }
  return proxy_trapped(grid, snap, specs, config, dt);
}

}  // namespace t2e

#endif  // T2E_REWARDS_HPP_
