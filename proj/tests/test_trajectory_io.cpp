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

#include <memory>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "t2e/trajectory_io.hpp"

namespace t2e {
namespace {

std::shared_ptr<const OccupancyGrid> arena(const char* name) {
  return std::make_shared<const OccupancyGrid>(
      load_map(std::string(T2E_TEST_MAP_DIR) + "/fixtures/" + name));
}

TrajectoryLog sample_log(std::uint64_t seed, RewardMode mode = RewardMode::Competitive) {
  EpisodeConfig cfg;
  cfg.seed = seed;
  cfg.max_steps = 60;
  cfg.reward.mode = mode;
  HeuristicPursuer p;
  HeuristicEvader e;
  return run_episode(arena("u_wall.t2e.map"), cfg, p, e);
}

TEST(Config, JsonRoundTrip) {
  EpisodeConfig c;
  c.map = "corridor";
  c.n_captors = 2;
  c.speed_ratio = 1.2;
  c.seed = 0xFFFFFFFFFFFFFFFFull;
  c.reward.mode = RewardMode::Competitive;
  c.capture_method = CaptureMethod::AszThreshold;
  c.hard_body = true;
  c.perception.full_velocity = true;
  const EpisodeConfig back = episode_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  EXPECT_EQ(back.seed, c.seed);
}

TEST(Config, PartialKeepsDefaultsUnknownRejected) {
  const EpisodeConfig c =
      episode_config_from_json(ojson::parse(R"({"n_captors": 4, "reward": {"k3": 20}})"));
  EXPECT_EQ(c.n_captors, 4);
  EXPECT_EQ(c.reward.k3, 20.0);
  EXPECT_EQ(c.reward.k2, 5.0);
  EXPECT_EQ(c.max_steps, kEvalMaxSteps);
  EXPECT_THROW(episode_config_from_json(ojson::parse(R"({"captors": 3})")),
               ConfigError);
  EXPECT_THROW(episode_config_from_json(ojson::parse(R"({"reward": {"k9": 1}})")),
               ConfigError);
  EXPECT_THROW(episode_config_from_json(ojson::parse(R"({"n_captors": "three"})")),
               ConfigError);
  EXPECT_THROW(episode_config_from_json(ojson::parse(R"({"capture_method": "magic"})")),
               ConfigError);
  EXPECT_THROW(episode_config_from_json(ojson::parse("[1, 2]")), ConfigError);
}

TEST(Log, LayoutAndVersion) {
  const TrajectoryLog log = sample_log(3);
  std::istringstream in(log_to_string(log));
  std::string line;
  std::vector<ojson> recs;
  while (std::getline(in, line)) recs.push_back(ojson::parse(line));
  ASSERT_EQ(recs.size(), log.steps.size() + 2);
  EXPECT_EQ(recs.front()["type"], "header");
  EXPECT_EQ(recs.back()["type"], "outcome");
  for (const ojson& r : recs) EXPECT_EQ(r["v"], 1);
  // Header key order is fixed.
  std::vector<std::string> keys;
  for (const auto& it : recs.front().items()) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"v", "type", "config", "map",
                                            "policies", "initial"}));
  const ojson& step = recs[1];
  EXPECT_EQ(step["robots"].size(), 4u);
  EXPECT_TRUE(step["robots"][0].contains("dist"));
  EXPECT_FALSE(step["robots"][3].contains("dist"));
  EXPECT_EQ(step["robots"][3]["team"], "target");
}

TEST(Log, ParseThenWriteIsByteIdentical) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const std::string text = log_to_string(sample_log(seed));
    EXPECT_EQ(log_to_string(log_from_string(text)), text);
  }
}

TEST(Log, SameSeedSameBytes) {
  EXPECT_EQ(log_to_string(sample_log(8)), log_to_string(sample_log(8)));
  EXPECT_NE(log_to_string(sample_log(8)), log_to_string(sample_log(9)));
}

TEST(Log, ParsedValuesExact) {
  const TrajectoryLog log = sample_log(4);
  const TrajectoryLog back = log_from_string(log_to_string(log));
  EXPECT_EQ(back.initial, log.initial);
  ASSERT_EQ(back.steps.size(), log.steps.size());
  for (std::size_t t = 0; t < log.steps.size(); ++t) {
    EXPECT_EQ(back.steps[t].snapshot, log.steps[t].snapshot);
    EXPECT_EQ(back.steps[t].rewards, log.steps[t].rewards);
    EXPECT_EQ(back.steps[t].actions, log.steps[t].actions);
    EXPECT_EQ(back.steps[t].captor_distances, log.steps[t].captor_distances);
  }
}

TEST(Log, MalformedInputs) {
  const std::string good = log_to_string(sample_log(5));
  EXPECT_THROW(log_from_string(""), ParseError);
  EXPECT_THROW(log_from_string("{not json}\n{}\n"), ParseError);
  std::string v2 = good;
  v2.replace(v2.find("\"v\":1"), 5, "\"v\":2");
  EXPECT_THROW(log_from_string(v2), ParseError);
  // Drop the outcome line.
  const std::string trimmed = good.substr(0, good.rfind('{'));
  EXPECT_THROW(log_from_string(trimmed), ParseError);
  std::string bad_action = good;
  const auto pos = bad_action.find("\"a\":");
  bad_action.replace(pos, 5, "\"a\":9");
  EXPECT_THROW(log_from_string(bad_action), ParseError);
  std::string bad_cfg = good;
  bad_cfg.replace(bad_cfg.find("\"n_captors\""), 11, "\"n_kaptors\"");
  EXPECT_THROW(log_from_string(bad_cfg), ParseError);
}

TEST(Replay, ResimulationMatches) {
  for (RewardMode mode : {RewardMode::Cooperative, RewardMode::Competitive}) {
    const TrajectoryLog log = log_from_string(log_to_string(sample_log(6, mode)));
    const TrajectoryLog again = resimulate(log, arena("u_wall.t2e.map"));
    EXPECT_TRUE(diff_logs(log, again).empty());
    EXPECT_TRUE(rederive_rewards(log).empty());
  }
}

TEST(Replay, TamperingIsReported) {
  TrajectoryLog log = sample_log(7);
  ASSERT_GT(log.steps.size(), 5u);
  TrajectoryLog moved = log;
  moved.steps[2].actions[0] =
      moved.steps[2].actions[0] == Action::Stop ? Action::Forward : Action::Stop;
  EXPECT_FALSE(diff_logs(moved, resimulate(moved, arena("u_wall.t2e.map"))).empty());

  TrajectoryLog paid = log;
  paid.steps[4].rewards[1].total += 1.0;
  const auto d = rederive_rewards(paid);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NE(d[0].find("robot 1"), std::string::npos);
}

}  // namespace
}  // namespace t2e
