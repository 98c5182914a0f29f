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

// JSON forms of episode configs and replay logs.
//
// A replay log is a JSON-lines file: one header object, one object per step,
// one outcome object. Every object carries "v":1 and a "type" tag. Keys are
// written in a fixed order and doubles in shortest round-trip form, so a log
// re-serialized from its parsed form is byte-identical.

#ifndef T2E_TRAJECTORY_IO_HPP_
#define T2E_TRAJECTORY_IO_HPP_

#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "t2e/engine.hpp"
#include "t2e/errors.hpp"

namespace t2e {

using ojson = nlohmann::ordered_json;

inline constexpr int kLogVersion = 1;

namespace detail {

inline void reject_unknown(const nlohmann::ordered_json& j,
                           std::initializer_list<const char*> known,
                           const char* where) {
  std::set<std::string> names(known.begin(), known.end());
  for (const auto& item : j.items()) {
    if (!names.count(item.key())) {
      throw ConfigError(std::string("unknown field '") + item.key() +
                        "' in " + where);
    }
  }
}

template <typename T>
void read_opt(const ojson& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad value for '") + key + "': " +
                        e.what());
    }
  }
}

}  // namespace detail

inline RewardMode parse_reward_mode(const std::string& s) {
  if (s == "cooperative") return RewardMode::Cooperative;
  if (s == "competitive") return RewardMode::Competitive;
  throw ConfigError("unknown reward mode: " + s);
}

inline CaptureMethod parse_capture_method(const std::string& s) {
  if (s == "proxy" || s == "collision-proxy") {
    return CaptureMethod::CollisionProxy;
  }
  if (s == "asz" || s == "asz-threshold") return CaptureMethod::AszThreshold;
  throw ConfigError("unknown capture method: " + s);
}

inline ojson to_json(const EpisodeConfig& c) {
  ojson j;
  j["map"] = c.map;
  j["n_captors"] = c.n_captors;
  j["speed_ratio"] = c.speed_ratio;
  j["max_steps"] = c.max_steps;
  j["seed"] = c.seed;
  j["reward"] = {{"k1", c.reward.k1},
                 {"k2", c.reward.k2},
                 {"k3", c.reward.k3},
                 {"d_cs", c.reward.d_cs},
                 {"f_thre", c.reward.f_thre},
                 {"step_penalty", c.reward.step_penalty},
                 {"repulse_penalty", c.reward.repulse_penalty},
                 {"mode", to_string(c.reward.mode)}};
  j["capture_method"] = to_string(c.capture_method);
  j["dt"] = c.dt;
  j["spawn"] = {{"max_captor_spread", c.spawn.max_captor_spread},
                {"max_captor_target_dist", c.spawn.max_captor_target_dist},
                {"min_captor_target_dist", c.spawn.min_captor_target_dist},
                {"min_wall_clearance", c.spawn.min_wall_clearance},
                {"max_attempts", c.spawn.max_attempts}};
  j["captor_max_speed"] = c.captor_max_speed;
  j["turn_thrust"] = c.turn_thrust;
  j["hard_body"] = c.hard_body;
  j["repulse_m"] = c.repulse_m;
  j["repulse_k"] = c.repulse_k;
  j["perception"] = {
      {"window_cells", c.perception.window_cells},
      {"window_resolution", c.perception.window_resolution},
      {"teammate_speed_self", c.perception.teammate_speed_self},
      {"full_velocity", c.perception.full_velocity}};
  return j;
}

/// Missing fields keep their defaults; unknown fields are rejected.
inline EpisodeConfig episode_config_from_json(const ojson& j,
                                              EpisodeConfig c = {}) {
  using detail::read_opt;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  detail::reject_unknown(
      j,
      {"map", "n_captors", "speed_ratio", "max_steps", "seed", "reward",
       "capture_method", "dt", "spawn", "captor_max_speed", "turn_thrust",
       "hard_body", "repulse_m", "repulse_k", "perception"},
      "config");
  read_opt(j, "map", c.map);
  read_opt(j, "n_captors", c.n_captors);
  read_opt(j, "speed_ratio", c.speed_ratio);
  read_opt(j, "max_steps", c.max_steps);
  read_opt(j, "seed", c.seed);
  read_opt(j, "dt", c.dt);
  read_opt(j, "captor_max_speed", c.captor_max_speed);
  read_opt(j, "turn_thrust", c.turn_thrust);
  read_opt(j, "hard_body", c.hard_body);
  read_opt(j, "repulse_m", c.repulse_m);
  read_opt(j, "repulse_k", c.repulse_k);
  if (auto it = j.find("capture_method"); it != j.end()) {
    c.capture_method = parse_capture_method(it->get<std::string>());
  }
  if (auto it = j.find("reward"); it != j.end()) {
    const ojson& r = *it;
    detail::reject_unknown(r,
                           {"k1", "k2", "k3", "d_cs", "f_thre", "step_penalty",
                            "repulse_penalty", "mode"},
                           "reward");
    read_opt(r, "k1", c.reward.k1);
    read_opt(r, "k2", c.reward.k2);
    read_opt(r, "k3", c.reward.k3);
    read_opt(r, "d_cs", c.reward.d_cs);
    read_opt(r, "f_thre", c.reward.f_thre);
    read_opt(r, "step_penalty", c.reward.step_penalty);
    read_opt(r, "repulse_penalty", c.reward.repulse_penalty);
    if (auto m = r.find("mode"); m != r.end()) {
      c.reward.mode = parse_reward_mode(m->get<std::string>());
    }
  }
  if (auto it = j.find("spawn"); it != j.end()) {
    const ojson& s = *it;
    detail::reject_unknown(s,
                           {"max_captor_spread", "max_captor_target_dist",
                            "min_captor_target_dist", "min_wall_clearance",
                            "max_attempts"},
                           "spawn");
    read_opt(s, "max_captor_spread", c.spawn.max_captor_spread);
    read_opt(s, "max_captor_target_dist", c.spawn.max_captor_target_dist);
    read_opt(s, "min_captor_target_dist", c.spawn.min_captor_target_dist);
    read_opt(s, "min_wall_clearance", c.spawn.min_wall_clearance);
    read_opt(s, "max_attempts", c.spawn.max_attempts);
  }
  if (auto it = j.find("perception"); it != j.end()) {
    const ojson& p = *it;
    detail::reject_unknown(p,
                           {"window_cells", "window_resolution",
                            "teammate_speed_self", "full_velocity"},
                           "perception");
    read_opt(p, "window_cells", c.perception.window_cells);
    read_opt(p, "window_resolution", c.perception.window_resolution);
    read_opt(p, "teammate_speed_self", c.perception.teammate_speed_self);
    read_opt(p, "full_velocity", c.perception.full_velocity);
  }
  return c;
}

inline ojson reward_to_json(const RewardBreakdown& r) {
  return {{"competition", r.competition},
          {"private", r.private_reward},
          {"total", r.total}};
}

inline ojson robot_state_json(const Snapshot& s, std::size_t i) {
  const RobotState& r = s.robots[i];
  return {{"id", i},
          {"team", to_string(s.team_of(i))},
          {"x", r.position.x},
          {"y", r.position.y},
          {"vx", r.velocity.x},
          {"vy", r.velocity.y},
          {"heading", r.heading}};
}

inline ojson header_json(const TrajectoryLog& log) {
  ojson j;
  j["v"] = kLogVersion;
  j["type"] = "header";
  j["config"] = to_json(log.config);
  j["map"] = {{"name", log.map_name}, {"hash", log.map_hash}};
  j["policies"] = {{"captor", log.captor_policy},
                   {"target", log.target_policy}};
  ojson robots = ojson::array();
  for (std::size_t i = 0; i < log.initial.robots.size(); ++i) {
    robots.push_back(robot_state_json(log.initial, i));
  }
  j["initial"] = std::move(robots);
  return j;
}

inline ojson step_json(const StepRecord& s) {
  ojson j;
  j["v"] = kLogVersion;
  j["type"] = "step";
  j["t"] = s.t;
  j["captured"] = s.captured;
  ojson robots = ojson::array();
  for (std::size_t i = 0; i < s.snapshot.robots.size(); ++i) {
    ojson r = robot_state_json(s.snapshot, i);
    r["a"] = to_code(s.actions[i]);
    r["repulsed"] = s.repulsed[i] != 0;
    r["collided"] = s.collided[i] != 0;
    r["reward"] = reward_to_json(s.rewards[i]);
    if (i < s.snapshot.n_captors) {
      r["dist"] = s.captor_distances[i];
      r["progress"] = s.rewards[i].progress;
    }
    robots.push_back(std::move(r));
  }
  j["robots"] = std::move(robots);
  return j;
}

inline ojson outcome_json(const Outcome& o) {
  return {{"v", kLogVersion},
          {"type", "outcome"},
          {"success", o.success},
          {"steps_used", o.steps_used}};
}

inline void write_log(std::ostream& out, const TrajectoryLog& log) {
  out << header_json(log).dump() << '\n';
  for (const StepRecord& s : log.steps) out << step_json(s).dump() << '\n';
  out << outcome_json(log.outcome).dump() << '\n';
}

inline std::string log_to_string(const TrajectoryLog& log) {
  std::ostringstream ss;
  write_log(ss, log);
  return ss.str();
}

namespace detail {

inline void check_version(const ojson& j, const char* type) {
  if (!j.is_object() || j.value("v", 0) != kLogVersion ||
      j.value("type", std::string()) != type) {
    throw ParseError(std::string("expected v1 '") + type + "' log record");
  }
}

inline RobotState robot_state_from_json(const ojson& r) {
  RobotState s;
  s.position = {r.at("x").get<double>(), r.at("y").get<double>()};
  s.velocity = {r.at("vx").get<double>(), r.at("vy").get<double>()};
  s.heading = r.at("heading").get<double>();
  return s;
}

inline Snapshot snapshot_from_json(const ojson& robots, std::size_t n_captors) {
  Snapshot snap;
  snap.n_captors = n_captors;
  for (const ojson& r : robots) snap.robots.push_back(robot_state_from_json(r));
  return snap;
}

}  // namespace detail

inline TrajectoryLog read_log(std::istream& in) {
  TrajectoryLog log;
  std::string line;
  std::vector<ojson> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      records.push_back(ojson::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed log line: ") + e.what());
    }
  }
  if (records.size() < 2) throw ParseError("log needs header and outcome");
  try {
    const ojson& h = records.front();
    detail::check_version(h, "header");
    log.config = episode_config_from_json(h.at("config"));
    log.map_name = h.at("map").at("name").get<std::string>();
    log.map_hash = h.at("map").at("hash").get<std::string>();
    log.captor_policy = h.at("policies").at("captor").get<std::string>();
    log.target_policy = h.at("policies").at("target").get<std::string>();
    const std::size_t n = static_cast<std::size_t>(log.config.n_captors);
    log.initial = detail::snapshot_from_json(h.at("initial"), n);
    for (std::size_t k = 1; k + 1 < records.size(); ++k) {
      const ojson& s = records[k];
      detail::check_version(s, "step");
      StepRecord rec;
      rec.t = s.at("t").get<int>();
      rec.captured = s.at("captured").get<bool>();
      rec.snapshot = detail::snapshot_from_json(s.at("robots"), n);
      for (const ojson& r : s.at("robots")) {
        const auto a = action_from_code(r.at("a").get<long long>());
        if (!a) throw ParseError("bad action code in log");
        rec.actions.push_back(*a);
        rec.repulsed.push_back(r.at("repulsed").get<bool>() ? 1 : 0);
        rec.collided.push_back(r.at("collided").get<bool>() ? 1 : 0);
        RewardBreakdown rb;
        rb.competition = r.at("reward").at("competition").get<double>();
        rb.private_reward = r.at("reward").at("private").get<double>();
        rb.total = r.at("reward").at("total").get<double>();
        if (auto p = r.find("progress"); p != r.end()) {
          rb.progress = p->get<double>();
        }
        if (auto d = r.find("dist"); d != r.end()) {
          rec.captor_distances.push_back(d->get<double>());
        }
        rec.rewards.push_back(rb);
      }
      log.steps.push_back(std::move(rec));
    }
    const ojson& o = records.back();
    detail::check_version(o, "outcome");
    log.outcome.success = o.at("success").get<bool>();
    log.outcome.steps_used = o.at("steps_used").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed log record: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("bad config in log: ") + e.what());
  }
  return log;
}

inline TrajectoryLog log_from_string(const std::string& text) {
  std::istringstream ss(text);
  return read_log(ss);
}

// ---------------------------------------------------------------------------
// Replay

/// Re-simulates a log from its initial snapshot with its recorded actions.
inline TrajectoryLog resimulate(const TrajectoryLog& log,
                                std::shared_ptr<const OccupancyGrid> grid) {
  Episode ep(grid, log.config, log.initial);
  TrajectoryLog out = make_log_header(ep, log.captor_policy, log.target_policy);
  for (const StepRecord& s : log.steps) {
    if (ep.done()) break;
    out.steps.push_back(ep.step(s.actions));
  }
  out.outcome.success = ep.captured();
  out.outcome.steps_used = ep.step_index();
  return out;
}

/// Line-level differences between two serialized logs.
inline std::vector<std::string> diff_logs(const TrajectoryLog& a,
                                          const TrajectoryLog& b) {
  std::istringstream sa(log_to_string(a));
  std::istringstream sb(log_to_string(b));
  std::vector<std::string> diffs;
  std::string la, lb;
  int line = 1;
  while (true) {
    const bool ha = static_cast<bool>(std::getline(sa, la));
    const bool hb = static_cast<bool>(std::getline(sb, lb));
    if (!ha && !hb) break;
    if (!ha || !hb || la != lb) {
      diffs.push_back("line " + std::to_string(line) + ":\n- " +
                      (ha ? la : "<missing>") + "\n+ " +
                      (hb ? lb : "<missing>"));
    }
    ++line;
  }
  return diffs;
}

/// Recomputes every step's rewards from the logged states, repulsion flags
/// and capture flags alone, and reports mismatches.
inline std::vector<std::string> rederive_rewards(const TrajectoryLog& log) {
  std::vector<std::string> diffs;
  const Snapshot* prev = &log.initial;
  for (const StepRecord& s : log.steps) {
    const std::vector<RewardBreakdown> r = step_rewards(
        *prev, s.snapshot, s.repulsed, s.captured, log.config.reward);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const RewardBreakdown& logged = s.rewards[i];
      if (r[i].competition != logged.competition ||
          r[i].private_reward != logged.private_reward ||
          r[i].total != logged.total ||
          (i < s.snapshot.n_captors && r[i].progress != logged.progress)) {
        diffs.push_back("step " + std::to_string(s.t) + " robot " +
                        std::to_string(i) + ": reward mismatch");
      }
    }
    prev = &s.snapshot;
  }
  return diffs;
}

}  // namespace t2e

#endif  // T2E_TRAJECTORY_IO_HPP_
