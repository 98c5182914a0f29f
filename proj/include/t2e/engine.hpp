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

#ifndef T2E_ENGINE_HPP_
#define T2E_ENGINE_HPP_

#include <cstdint>
#include <fstream>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "t2e/agents.hpp"
#include "t2e/dynamics.hpp"
#include "t2e/errors.hpp"
#include "t2e/gridmap.hpp"
#include "t2e/perception.hpp"
#include "t2e/rewards.hpp"
#include "t2e/rng.hpp"
#include "t2e/snapshot.hpp"

namespace t2e {

inline constexpr int kEvalMaxSteps = 500;
inline constexpr int kTrainMaxSteps = 200;

struct SpawnConfig {
  double max_captor_spread = 4.0;
  double max_captor_target_dist = 10.0;
  double min_captor_target_dist = 2.0;
  double min_wall_clearance = kRobotRadius + 0.05;
  int max_attempts = 10000;
};

struct EpisodeConfig {
  std::string map;
  int n_captors = 3;
  double speed_ratio = 1.0;  // target max speed / captor max speed
  int max_steps = kEvalMaxSteps;
  std::uint64_t seed = 0;
  RewardConfig reward;
  CaptureMethod capture_method = CaptureMethod::CollisionProxy;
  double dt = kDefaultDt;
  SpawnConfig spawn;
  double captor_max_speed = kCaptorMaxSpeed;
  bool turn_thrust = true;
  bool hard_body = false;
  int repulse_m = 12;
  double repulse_k = 3.0;
  PerceptionConfig perception;

  void validate() const {
    if (n_captors < 1) throw ConfigError("n_captors must be >= 1");
    if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
    if (!(speed_ratio > 0.0)) throw ConfigError("speed_ratio must be > 0");
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (!(captor_max_speed > 0.0)) {
      throw ConfigError("captor_max_speed must be > 0");
    }
    if (!(reward.d_cs > 0.0) || !(reward.f_thre > 0.0)) {
      throw ConfigError("d_cs and f_thre must be > 0");
    }
    if (repulse_m < 1 || !(repulse_k > 0.0)) {
      throw ConfigError("repulsion parameters must be positive");
    }
    const SpawnConfig& s = spawn;
    if (!(s.max_captor_spread > 0.0) || !(s.max_captor_target_dist > 0.0) ||
        !(s.min_captor_target_dist > 0.0) || !(s.min_wall_clearance > 0.0)) {
      throw ConfigError("spawn distances must be positive");
    }
    if (!(s.min_captor_target_dist < s.max_captor_target_dist)) {
      throw ConfigError("spawn min captor-target distance must be < max");
    }
  }
};

/// Robot specs in snapshot order: captors, then the target.
inline std::vector<RobotSpec> make_specs(const EpisodeConfig& config) {
  std::vector<RobotSpec> specs;
  auto tune = [&](RobotSpec s) {
    s.turn_thrust = config.turn_thrust;
    s.repulse_m = config.repulse_m;
    s.repulse_k = config.repulse_k;
    return s;
  };
  for (int i = 0; i < config.n_captors; ++i) {
    specs.push_back(tune(captor_spec(config.captor_max_speed)));
  }
  specs.push_back(
      tune(target_spec(config.speed_ratio, config.captor_max_speed)));
  return specs;
}

// ---------------------------------------------------------------------------
// Spawning

/// Rejection-samples an initial snapshot. Each attempt draws the target cell
/// and then captor cells in index order, uniformly over free cells with
/// enough wall clearance, and stops at the first violated constraint. After
/// a success headings are drawn for captors in index order, then the target.
inline Snapshot spawn(const OccupancyGrid& grid, const EpisodeConfig& config,
                      Rng& rng) {
  const SpawnConfig& sc = config.spawn;
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.cells()[i] && grid.center_clearance(i) >= sc.min_wall_clearance) {
      eligible.push_back(i);
    }
  }
  const std::size_t n_captors = static_cast<std::size_t>(config.n_captors);
  if (eligible.empty()) {
    throw SpawnExhausted("no free cell has the required wall clearance");
  }
  const std::vector<int> component = connected_components(grid);

  std::vector<std::size_t> cells(n_captors + 1);
  for (int attempt = 0; attempt < sc.max_attempts; ++attempt) {
    const std::size_t target = eligible[rng.uniform_index(eligible.size())];
    const Vec2 tp = grid.center(target);
    bool ok = true;
    for (std::size_t i = 0; i < n_captors && ok; ++i) {
      const std::size_t c = eligible[rng.uniform_index(eligible.size())];
      const Vec2 cp = grid.center(c);
      const double d = distance(cp, tp);
      ok = component[c] == component[target] &&
           d >= sc.min_captor_target_dist && d <= sc.max_captor_target_dist;
      for (std::size_t k = 0; k < i && ok; ++k) {
        ok = distance(cp, grid.center(cells[k])) <= sc.max_captor_spread;
      }
      cells[i] = c;
    }
    if (!ok) continue;
    cells[n_captors] = target;
    Snapshot snap;
    snap.n_captors = n_captors;
    snap.robots.resize(n_captors + 1);
    for (std::size_t i = 0; i <= n_captors; ++i) {
      snap.robots[i].position = grid.center(cells[i]);
      snap.robots[i].heading = rng.heading();
    }
    return snap;
  }
  throw SpawnExhausted("spawn constraints not met after " +
                       std::to_string(sc.max_attempts) + " attempts");
}

// ---------------------------------------------------------------------------
// Episode stepping

struct StepInfo {
  int step = 0;
  bool captured = false;
  std::vector<std::uint8_t> repulsed;  // per robot, |f_v| > 0
  std::vector<std::uint8_t> collided;  // per robot, obstacle or body stop
};

struct StepRecord {
  int t = 0;  // index of the step that produced this state (1-based)
  std::vector<Action> actions;
  Snapshot snapshot;
  std::vector<std::uint8_t> repulsed;
  std::vector<std::uint8_t> collided;
  std::vector<RewardBreakdown> rewards;
  std::vector<double> captor_distances;
  bool captured = false;
};

struct Outcome {
  bool success = false;
  int steps_used = 0;
};

struct TrajectoryLog {
  EpisodeConfig config;
  std::string map_name;
  std::string map_hash;
  std::string captor_policy;
  std::string target_policy;
  Snapshot initial;
  std::vector<StepRecord> steps;
  Outcome outcome;
};

/// Advances every robot from the same pre-step snapshot.
inline std::vector<RobotStep> advance_all(const OccupancyGrid& grid,
                                          const Snapshot& prev,
                                          std::span<const Action> actions,
                                          std::span<const RobotSpec> specs,
                                          double dt, bool hard_body) {
  std::vector<RobotStep> out;
  out.reserve(prev.robots.size());
  for (std::size_t i = 0; i < prev.robots.size(); ++i) {
    out.push_back(advance_robot(grid, prev.robots[i], actions[i], specs[i], dt));
  }
  if (hard_body) {
    // Overlapping pairs are rolled back to their pre-step positions.
    std::vector<std::uint8_t> revert(out.size(), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t k = i + 1; k < out.size(); ++k) {
        if (distance(out[i].state.position, out[k].state.position) <
            specs[i].radius + specs[k].radius) {
          revert[i] = revert[k] = 1;
        }
      }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!revert[i]) continue;
      out[i].state.position = prev.robots[i].position;
      out[i].state.velocity = {};
      out[i].collided = true;
    }
  }
  return out;
}

class Episode {
 public:
  /// Spawns from `config.seed`.
  Episode(std::shared_ptr<const OccupancyGrid> grid, EpisodeConfig config)
      : grid_(std::move(grid)), config_(std::move(config)), rng_(config_.seed) {
    config_.validate();
    specs_ = make_specs(config_);
    snapshot_ = spawn(*grid_, config_, rng_);
    initial_ = snapshot_;
  }

  /// Starts from a given snapshot; the RNG is still seeded from the config
  /// but no spawn draws are made.
  Episode(std::shared_ptr<const OccupancyGrid> grid, EpisodeConfig config,
          Snapshot initial)
      : grid_(std::move(grid)), config_(std::move(config)), rng_(config_.seed) {
    config_.validate();
    specs_ = make_specs(config_);
    if (initial.robots.size() != specs_.size() ||
        initial.n_captors != static_cast<std::size_t>(config_.n_captors)) {
      throw ConfigError("initial snapshot does not match config");
    }
    snapshot_ = std::move(initial);
    initial_ = snapshot_;
  }

  const OccupancyGrid& grid() const { return *grid_; }
  std::shared_ptr<const OccupancyGrid> grid_ptr() const { return grid_; }
  const EpisodeConfig& config() const { return config_; }
  const std::vector<RobotSpec>& specs() const { return specs_; }
  const Snapshot& snapshot() const { return snapshot_; }
  const Snapshot& initial() const { return initial_; }
  int step_index() const { return step_; }
  bool done() const { return done_; }
  bool captured() const { return captured_; }
  Rng& rng() { return rng_; }
  std::size_t robot_count() const { return snapshot_.robots.size(); }

  Observation observe(std::size_t robot) const {
    return t2e::observe(*grid_, snapshot_, robot, config_.perception);
  }

  StepRecord step(std::span<const Action> actions) {
    if (done_) throw EpisodeFinished("episode already finished");
    if (actions.size() != snapshot_.robots.size()) {
      throw ActionCountMismatch("expected " +
                                std::to_string(snapshot_.robots.size()) +
                                " actions, got " +
                                std::to_string(actions.size()));
    }
    const Snapshot prev = snapshot_;
    const std::vector<RobotStep> moved = advance_all(
        *grid_, prev, actions, specs_, config_.dt, config_.hard_body);

    StepRecord rec;
    rec.t = ++step_;
    rec.actions.assign(actions.begin(), actions.end());
    rec.snapshot.n_captors = prev.n_captors;
    for (const RobotStep& m : moved) {
      rec.snapshot.robots.push_back(m.state);
      rec.repulsed.push_back(m.repulsed ? 1 : 0);
      rec.collided.push_back(m.collided ? 1 : 0);
    }
    rec.captured = capture_check(*grid_, rec.snapshot, specs_, config_.reward,
                                 config_.capture_method, config_.dt);
    rec.rewards = step_rewards(prev, rec.snapshot, rec.repulsed, rec.captured,
                               config_.reward);
    for (std::size_t i = 0; i < rec.snapshot.n_captors; ++i) {
      rec.captor_distances.push_back(
          distance(rec.snapshot.robots[i].position,
                   rec.snapshot.target().position));
    }
    snapshot_ = rec.snapshot;
    captured_ = rec.captured;
    done_ = rec.captured || step_ >= config_.max_steps;
    return rec;
  }

 private:
  std::shared_ptr<const OccupancyGrid> grid_;
  EpisodeConfig config_;
  Rng rng_;
  std::vector<RobotSpec> specs_;
  Snapshot snapshot_;
  Snapshot initial_;
  int step_ = 0;
  bool done_ = false;
  bool captured_ = false;
};

// ---------------------------------------------------------------------------
// Policies

/// Chooses actions for a set of robots given the live episode.
class Policy {
 public:
  virtual ~Policy() = default;
  /// Fills `out[j]` with the action for robot `robots[j]`.
  virtual void act(Episode& episode, std::span<const std::size_t> robots,
                   std::span<Action> out) = 0;
  virtual std::string id() const = 0;
};

class StopPolicy final : public Policy {
 public:
  void act(Episode&, std::span<const std::size_t>,
           std::span<Action> out) override {
    for (Action& a : out) a = Action::Stop;
  }
  std::string id() const override { return "stop"; }
};

/// Uniform random actions drawn from the episode RNG.
class RandomPolicy final : public Policy {
 public:
  void act(Episode& episode, std::span<const std::size_t>,
           std::span<Action> out) override {
    for (Action& a : out) {
      a = static_cast<Action>(episode.rng().uniform_index(kAllActions.size()));
    }
  }
  std::string id() const override { return "random"; }
};

class HeuristicPursuer final : public Policy {
 public:
  explicit HeuristicPursuer(HeuristicConfig config = {}) : config_(config) {}
  void act(Episode& ep, std::span<const std::size_t> robots,
           std::span<Action> out) override {
    const Snapshot& snap = ep.snapshot();
    const Cell cell = ep.grid().cell_of(snap.target().position);
    if (field_grid_ != &ep.grid() || !(field_cell_ == cell)) {
      field_ = make_pursuit_field(ep.grid(), snap.target().position);
      field_grid_ = &ep.grid();
      field_cell_ = cell;
    }
    const std::vector<Action> all = pursuer_policy(
        ep.grid(), snap, ep.specs(), config_, ep.config().dt, &ep.rng(), &field_);
    for (std::size_t j = 0; j < robots.size(); ++j) {
      out[j] = robots[j] < all.size() ? all[robots[j]] : Action::Stop;
    }
  }
  std::string id() const override { return "heuristic-pursuer"; }

 private:
  HeuristicConfig config_;
  // The path-length field only depends on the target's cell.
  PursuitField field_;
  const OccupancyGrid* field_grid_ = nullptr;
  Cell field_cell_{};
};

class HeuristicEvader final : public Policy {
 public:
  explicit HeuristicEvader(HeuristicConfig config = {}) : config_(config) {}
  void act(Episode& ep, std::span<const std::size_t>,
           std::span<Action> out) override {
    const Action a = evader_policy(ep.grid(), ep.snapshot(), ep.specs(),
                                   config_, ep.config().dt, &ep.rng());
    for (Action& o : out) o = a;
  }
  std::string id() const override { return "heuristic-evader"; }

 private:
  HeuristicConfig config_;
};

/// Replays fixed per-step action rows. Row t holds one action per controlled
/// robot in index order; once rows run out every robot stops.
class ScriptedPolicy final : public Policy {
 public:
  ScriptedPolicy(std::vector<std::vector<Action>> rows, std::string source)
      : rows_(std::move(rows)), source_(std::move(source)) {}

  /// Whitespace-separated action codes, one line per step. Lines starting
  /// with '#' are comments.
  static ScriptedPolicy from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open script: " + path);
    std::vector<std::vector<Action>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss(line);
      std::vector<Action> row;
      long long code = 0;
      while (ss >> code) {
        const auto a = action_from_code(code);
        if (!a) throw ConfigError("bad action code in script: " + path);
        row.push_back(*a);
      }
      if (!ss.eof()) throw ConfigError("malformed script line: " + path);
      rows.push_back(std::move(row));
    }
    return ScriptedPolicy(std::move(rows), "scripted:" + path);
  }

  void act(Episode& ep, std::span<const std::size_t>,
           std::span<Action> out) override {
    const std::size_t t = static_cast<std::size_t>(ep.step_index());
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] = (t < rows_.size() && j < rows_[t].size()) ? rows_[t][j]
                                                          : Action::Stop;
    }
  }
  std::string id() const override { return source_; }

 private:
  std::vector<std::vector<Action>> rows_;
  std::string source_;
};

/// Builds a built-in policy from its identifier.
inline std::unique_ptr<Policy> make_policy(const std::string& id,
                                           const HeuristicConfig& heuristic = {}) {
  if (id == "heuristic-pursuer") {
    return std::make_unique<HeuristicPursuer>(heuristic);
  }
  if (id == "heuristic-evader") {
    return std::make_unique<HeuristicEvader>(heuristic);
  }
  if (id == "stop" || id == "stationary") return std::make_unique<StopPolicy>();
  if (id == "random") return std::make_unique<RandomPolicy>();
  if (id.starts_with("scripted:")) {
    return std::make_unique<ScriptedPolicy>(
        ScriptedPolicy::from_file(id.substr(9)));
  }
  throw ConfigError("unknown policy: " + id);
}

/// Collects one action per robot: captors from `captors`, target from
/// `target`. Captor policy runs first.
inline std::vector<Action> gather_actions(Episode& ep, Policy& captors,
                                          Policy& target) {
  const std::size_t n = ep.snapshot().n_captors;
  std::vector<std::size_t> captor_ids(n);
  for (std::size_t i = 0; i < n; ++i) captor_ids[i] = i;
  std::vector<Action> actions(n + 1, Action::Stop);
  captors.act(ep, captor_ids, std::span<Action>(actions.data(), n));
  const std::size_t t = n;
  target.act(ep, std::span<const std::size_t>(&t, 1),
             std::span<Action>(actions.data() + n, 1));
  return actions;
}

inline TrajectoryLog make_log_header(const Episode& ep,
                                     const std::string& captor_policy,
                                     const std::string& target_policy) {
  TrajectoryLog log;
  log.config = ep.config();
  log.map_name = ep.grid().name();
  log.map_hash = map_hash(ep.grid());
  log.captor_policy = captor_policy;
  log.target_policy = target_policy;
  log.initial = ep.initial();
  return log;
}

/// Runs an episode to completion.
inline TrajectoryLog run_episode(Episode& ep, Policy& captors, Policy& target) {
  TrajectoryLog log = make_log_header(ep, captors.id(), target.id());
  while (!ep.done()) {
    const std::vector<Action> actions = gather_actions(ep, captors, target);
    log.steps.push_back(ep.step(actions));
  }
  log.outcome.success = ep.captured();
  log.outcome.steps_used = ep.step_index();
  return log;
}

inline TrajectoryLog run_episode(std::shared_ptr<const OccupancyGrid> grid,
                                 const EpisodeConfig& config, Policy& captors,
                                 Policy& target) {
  Episode ep(std::move(grid), config);
  return run_episode(ep, captors, target);
}

}  // namespace t2e

#endif  // T2E_ENGINE_HPP_
