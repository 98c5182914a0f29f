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

#include <algorithm>
#include <filesystem>
#include <memory>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "t2e/engine.hpp"

namespace t2e {
namespace {

namespace fs = std::filesystem;

std::vector<fs::path> shipped_maps() {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(T2E_TEST_MAP_DIR)) {
    if (e.path().string().ends_with(".t2e.map")) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::shared_ptr<const OccupancyGrid> fixture(const char* name) {
  return std::make_shared<const OccupancyGrid>(
      load_map(fs::path(T2E_TEST_MAP_DIR) / "fixtures" / name));
}

// Exact distance from a point to the nearest occupied cell box.
double box_clearance(const OccupancyGrid& g, Vec2 p) {
  const double res = g.resolution();
  double best = 1e9;
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      if (!g.occupied(c, r)) continue;
      const double dx = std::max({c * res - p.x, 0.0, p.x - (c + 1) * res});
      const double dy = std::max({r * res - p.y, 0.0, p.y - (r + 1) * res});
      best = std::min(best, std::hypot(dx, dy));
    }
  }
  return best;
}

TEST(Spawn, ConstraintsOnEveryShippedMap) {
  const auto maps = shipped_maps();
  ASSERT_GE(maps.size(), 10u);
  for (const fs::path& p : maps) {
    const OccupancyGrid g = load_map(p);
    const std::vector<int> comp = connected_components(g);
    EpisodeConfig cfg;
    cfg.n_captors = 3;
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
      Rng rng(seed);
      const Snapshot s = spawn(g, cfg, rng);
      ASSERT_EQ(s.robots.size(), 4u);
      const Vec2 tp = s.target().position;
      for (std::size_t i = 0; i < 4; ++i) {
        const RobotState& r = s.robots[i];
        EXPECT_EQ(r.velocity, Vec2{});
        EXPECT_GE(r.heading, -std::numbers::pi);
        EXPECT_LT(r.heading, std::numbers::pi);
        EXPECT_GE(oracle::brute_clearance(g, r.position) + 1e-12,
                  cfg.spawn.min_wall_clearance)
            << p;
        EXPECT_GT(box_clearance(g, r.position), kRobotRadius);
        EXPECT_EQ(comp[g.index(g.cell_of(r.position))],
                  comp[g.index(g.cell_of(tp))]);
      }
      for (std::size_t i = 0; i < 3; ++i) {
        const double d = distance(s.robots[i].position, tp);
        EXPECT_GE(d, 2.0);
        EXPECT_LE(d, 10.0);
        for (std::size_t k = 0; k < i; ++k) {
          EXPECT_LE(distance(s.robots[i].position, s.robots[k].position), 4.0);
        }
      }
    }
  }
}

TEST(Spawn, SeedDeterminesSnapshot) {
  const auto g = fixture("u_wall.t2e.map");
  EpisodeConfig cfg;
  Rng a(99), b(99), c(100);
  const Snapshot sa = spawn(*g, cfg, a);
  EXPECT_EQ(sa, spawn(*g, cfg, b));
  EXPECT_NE(sa, spawn(*g, cfg, c));
}

TEST(Spawn, SingleCaptor) {
  const auto g = fixture("open_arena.t2e.map");
  EpisodeConfig cfg;
  cfg.n_captors = 1;
  Rng rng(4);
  EXPECT_EQ(spawn(*g, cfg, rng).robots.size(), 2u);
}

TEST(Spawn, PocketExhausts) {
  // Free space is a 0.3 m wide strip: no cell has the wall clearance.
  std::vector<std::string> rows(20, std::string(40, '#'));
  for (int c = 1; c < 39; ++c) rows[9][c] = rows[10][c] = rows[11][c] = '.';
  const OccupancyGrid g = oracle::grid_from_rows(rows);
  EpisodeConfig cfg;
  Rng rng(1);
  EXPECT_THROW(spawn(g, cfg, rng), SpawnExhausted);

  // Roomy but too small for the distance constraints.
  const OccupancyGrid small = oracle::empty_grid(12, 12);
  cfg.spawn.max_attempts = 500;
  EXPECT_THROW(spawn(small, cfg, rng), SpawnExhausted);
}

TEST(Config, Validation) {
  EpisodeConfig c;
  EXPECT_NO_THROW(c.validate());
  auto bad = [](auto mutate) {
    EpisodeConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  bad([](EpisodeConfig& c) { c.n_captors = 0; });
  bad([](EpisodeConfig& c) { c.max_steps = 0; });
  bad([](EpisodeConfig& c) { c.speed_ratio = 0.0; });
  bad([](EpisodeConfig& c) { c.dt = -0.1; });
  bad([](EpisodeConfig& c) { c.reward.f_thre = 0.0; });
  bad([](EpisodeConfig& c) { c.spawn.min_captor_target_dist = 12.0; });
}

Snapshot resting(std::vector<Vec2> positions) {
  Snapshot s;
  s.n_captors = positions.size() - 1;
  for (Vec2 p : positions) {
    RobotState r;
    r.position = p;
    s.robots.push_back(r);
  }
  return s;
}

TEST(Step, AllStopIsFixedPoint) {
  const auto g = fixture("open_arena.t2e.map");
  EpisodeConfig cfg;
  cfg.n_captors = 2;
  Episode ep(g, cfg, resting({{2, 2}, {4, 2}, {6, 6}}));
  const std::vector<Action> stop(3, Action::Stop);
  const StepRecord r = ep.step(stop);
  EXPECT_EQ(r.snapshot, ep.initial());
  for (const RewardBreakdown& b : r.rewards) EXPECT_EQ(b.total, -0.4);
  EXPECT_EQ(r.t, 1);
  EXPECT_FALSE(r.captured);
}

TEST(Step, ErrorsAndTimeout) {
  const auto g = fixture("open_arena.t2e.map");
  EpisodeConfig cfg;
  cfg.n_captors = 1;
  cfg.max_steps = 10;
  Episode ep(g, cfg, resting({{2, 2}, {6, 6}}));
  const std::vector<Action> one(1, Action::Stop), two(2, Action::Stop);
  EXPECT_THROW(ep.step(one), ActionCountMismatch);
  for (int t = 0; t < 10; ++t) {
    EXPECT_FALSE(ep.done());
    ep.step(two);
  }
  EXPECT_TRUE(ep.done());
  EXPECT_FALSE(ep.captured());
  EXPECT_THROW(ep.step(two), EpisodeFinished);

  StopPolicy stop;
  Episode again(g, cfg, resting({{2, 2}, {6, 6}}));
  const TrajectoryLog log = run_episode(again, stop, stop);
  ASSERT_EQ(log.steps.size(), 10u);
  for (const StepRecord& s : log.steps) EXPECT_EQ(s.snapshot, log.initial);
  EXPECT_FALSE(log.outcome.success);
  EXPECT_EQ(log.outcome.steps_used, 10);
}

TEST(Step, InitialSnapshotMustMatchConfig) {
  const auto g = fixture("open_arena.t2e.map");
  EpisodeConfig cfg;
  cfg.n_captors = 2;
  EXPECT_THROW(Episode(g, cfg, resting({{2, 2}, {6, 6}})), ConfigError);
}

// Captor drives into the dead end; the episode ends on the first step whose
// resulting snapshot satisfies the proxy.
TEST(Step, DeadEndCaptureOnFirstProxyStep) {
  const auto g = fixture("dead_end.t2e.map");
  EpisodeConfig cfg;
  cfg.n_captors = 1;
  cfg.max_steps = 60;
  Episode ep(g, cfg, resting({{4.6, 2.1}, {5.85, 2.1}}));
  const std::vector<Action> go = {Action::Forward, Action::Stop};
  bool done = false;
  while (!ep.done()) {
    const StepRecord r = ep.step(go);
    const bool proxy = capture_check(*g, r.snapshot, ep.specs(), cfg.reward,
                                     CaptureMethod::CollisionProxy);
    EXPECT_EQ(r.captured, proxy);
    EXPECT_EQ(ep.done(), proxy || r.t == cfg.max_steps);
    done = proxy;
  }
  EXPECT_TRUE(done);
  EXPECT_GT(ep.step_index(), 3);
  EXPECT_LT(ep.step_index(), 60);
}

TEST(Step, PermutingCaptorsPermutesTrajectory) {
  const auto g = fixture("u_wall.t2e.map");
  EpisodeConfig cfg;
  cfg.n_captors = 3;
  cfg.max_steps = 80;
  Rng spawn_rng(5);
  const Snapshot s0 = spawn(*g, cfg, spawn_rng);
  const std::vector<std::size_t> perm = {2, 0, 1};
  Snapshot p0 = s0;
  for (std::size_t j = 0; j < 3; ++j) p0.robots[j] = s0.robots[perm[j]];
  Episode a(g, cfg, s0), b(g, cfg, p0);
  Rng acts(77);
  while (!a.done()) {
    std::vector<Action> x(4), y(4);
    for (Action& v : x) v = *action_from_code(static_cast<int>(acts.uniform_index(5)));
    for (std::size_t j = 0; j < 3; ++j) y[j] = x[perm[j]];
    y[3] = x[3];
    const StepRecord ra = a.step(x);
    const StepRecord rb = b.step(y);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(rb.snapshot.robots[j], ra.snapshot.robots[perm[j]]);
      EXPECT_EQ(rb.rewards[j], ra.rewards[perm[j]]);
      EXPECT_EQ(rb.repulsed[j], ra.repulsed[perm[j]]);
    }
    EXPECT_EQ(rb.snapshot.target(), ra.snapshot.target());
    EXPECT_EQ(rb.captured, ra.captured);
    ASSERT_EQ(b.done(), a.done());
  }
  EXPECT_GT(a.step_index(), 10);
}

TEST(Episode, SameSeedSameTrajectory) {
  const auto g = fixture("corner.t2e.map");
  EpisodeConfig cfg;
  cfg.seed = 31;
  cfg.max_steps = 120;
  auto run = [&] {
    HeuristicPursuer p;
    HeuristicEvader e;
    return run_episode(g, cfg, p, e);
  };
  const TrajectoryLog x = run(), y = run();
  EXPECT_EQ(x.initial, y.initial);
  ASSERT_EQ(x.steps.size(), y.steps.size());
  for (std::size_t t = 0; t < x.steps.size(); ++t) {
    EXPECT_EQ(x.steps[t].snapshot, y.steps[t].snapshot);
    EXPECT_EQ(x.steps[t].actions, y.steps[t].actions);
    EXPECT_EQ(x.steps[t].rewards, y.steps[t].rewards);
  }
  EXPECT_EQ(x.outcome.success, y.outcome.success);
}

TEST(Episode, HeuristicCaptorsTrapStationaryTargetInCorridor) {
  const auto g = fixture("corridor.t2e.map");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EpisodeConfig cfg;
    cfg.seed = seed;
    HeuristicPursuer p;
    StopPolicy s;
    const TrajectoryLog log = run_episode(g, cfg, p, s);
    EXPECT_TRUE(log.outcome.success) << seed;
    EXPECT_LE(log.outcome.steps_used, cfg.max_steps);
    EXPECT_TRUE(log.steps.back().captured);
  }
}

TEST(Episode, HardBodyKeepsRobotsApart) {
  const auto g = fixture("open_arena.t2e.map");
  EpisodeConfig cfg;
  cfg.n_captors = 2;
  cfg.hard_body = true;
  cfg.max_steps = 200;
  Episode ep(g, cfg, resting({{3, 5}, {7, 5}, {5, 5}}));
  HeuristicPursuer p;
  StopPolicy s;
  const TrajectoryLog log = run_episode(ep, p, s);
  for (const StepRecord& r : log.steps) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t k = i + 1; k < 3; ++k) {
        EXPECT_GE(distance(r.snapshot.robots[i].position,
                           r.snapshot.robots[k].position),
                  2 * kRobotRadius);
      }
    }
  }
}

TEST(Policies, Factory) {
  EXPECT_EQ(make_policy("heuristic-pursuer")->id(), "heuristic-pursuer");
  EXPECT_EQ(make_policy("heuristic-evader")->id(), "heuristic-evader");
  EXPECT_EQ(make_policy("stationary")->id(), "stop");
  EXPECT_EQ(make_policy("random")->id(), "random");
  EXPECT_THROW(make_policy("nope"), ConfigError);
  EXPECT_THROW(make_policy("scripted:/no/such/file"), ConfigError);
}

TEST(Policies, ScriptedFile) {
  const fs::path p = fs::temp_directory_path() / "t2e_script_test.txt";
  {
    std::ofstream out(p);
    out << "# two captors\n0 1\n\n3 4\n";
  }
  auto pol = make_policy("scripted:" + p.string());
  const auto g = fixture("open_arena.t2e.map");
  EpisodeConfig cfg;
  cfg.n_captors = 2;
  Episode ep(g, cfg, resting({{2, 2}, {4, 2}, {6, 6}}));
  StopPolicy stop;
  std::vector<Action> a = gather_actions(ep, *pol, stop);
  EXPECT_EQ(a, (std::vector<Action>{Action::Forward, Action::TurnLeft, Action::Stop}));
  ep.step(a);
  a = gather_actions(ep, *pol, stop);
  EXPECT_EQ(a, (std::vector<Action>{Action::Stop, Action::Backward, Action::Stop}));
  ep.step(a);
  a = gather_actions(ep, *pol, stop);
  EXPECT_EQ(a, (std::vector<Action>(3, Action::Stop)));

  {
    std::ofstream out(p);
    out << "0 7\n";
  }
  EXPECT_THROW(make_policy("scripted:" + p.string()), ConfigError);
  {
    std::ofstream out(p);
    out << "0 x\n";
  }
  EXPECT_THROW(make_policy("scripted:" + p.string()), ConfigError);
  fs::remove(p);
}

}  // namespace
}  // namespace t2e
