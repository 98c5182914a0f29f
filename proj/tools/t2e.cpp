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

// t2e command-line front end.
//
// Exit codes: 0 ok, 1 internal error, 2 config error, 3 map error,
// 4 position inside an obstacle, 5 bridge protocol error, 6 replay mismatch.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "t2e/t2e.hpp"

#ifndef T2E_DEFAULT_MAP_DIR
#define T2E_DEFAULT_MAP_DIR "maps"
#endif

namespace fs = std::filesystem;

namespace {

enum ExitCode {
  kOk = 0,
  kInternal = 1,
  kConfigError = 2,
  kMapError = 3,
  kPositionError = 4,
  kProtocolError = 5,
  kReplayMismatch = 6,
};

/// Map-level failures: missing files, parse and validation errors,
/// unsuitable maps.
class MapError : public t2e::Error {
 public:
  using t2e::Error::Error;
};

fs::path map_dir() {
  if (const char* env = std::getenv("T2E_MAP_DIR"); env && *env) return env;
  return T2E_DEFAULT_MAP_DIR;
}

fs::path resolve_map(const std::string& spec) {
  std::vector<fs::path> candidates = {spec, map_dir() / spec};
  const std::string ext(t2e::kMapExtension);
  if (!spec.ends_with(ext)) {
    candidates.emplace_back(spec + ext);
    candidates.emplace_back(map_dir() / (spec + ext));
  }
  for (const fs::path& p : candidates) {
    if (fs::is_regular_file(p)) return p;
  }
  // Bare names are looked up anywhere below the map directory.
  if (fs::path(spec).filename() == spec && fs::is_directory(map_dir())) {
    const std::string want = spec.ends_with(ext) ? spec : spec + ext;
    for (const auto& entry : fs::recursive_directory_iterator(map_dir())) {
      if (entry.is_regular_file() && entry.path().filename() == want) {
        return entry.path();
      }
    }
  }
  throw MapError("map not found: " + spec);
}

std::shared_ptr<const t2e::OccupancyGrid> load_grid(const std::string& spec) {
  const fs::path path = resolve_map(spec);
  try {
    return std::make_shared<const t2e::OccupancyGrid>(t2e::load_map(path));
  } catch (const t2e::ParseError& e) {
    throw MapError(path.string() + ": " + e.what());
  } catch (const t2e::ValidationError& e) {
    throw MapError(path.string() + ": " + e.what());
  }
}

/// Every shipped map of the given level under the map directory, sorted.
/// Test fixtures are skipped.
std::vector<std::string> maps_of_level(const std::string& level) {
  std::vector<std::string> out;
  if (!fs::is_directory(map_dir())) throw MapError("map directory missing");
  auto it = fs::recursive_directory_iterator(map_dir());
  for (auto entry = begin(it); entry != end(it); ++entry) {
    if (entry->is_directory() && entry->path().filename() == "fixtures") {
      entry.disable_recursion_pending();
      continue;
    }
    const std::string file = entry->path().filename().string();
    if (!entry->is_regular_file() || !file.ends_with(t2e::kMapExtension)) {
      continue;
    }
    const t2e::OccupancyGrid grid = t2e::load_map(entry->path());
    if (level == "all" || level == t2e::to_string(t2e::classify_level(grid))) {
      out.push_back(entry->path().string());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw MapError("no maps of level " + level);
  return out;
}

t2e::Vec2 parse_point(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) {
    throw t2e::ConfigError("expected x,y but got '" + s + "'");
  }
  try {
    std::size_t used = 0;
    const double x = std::stod(s.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument(s);
    const std::string ys = s.substr(comma + 1);
    const double y = std::stod(ys, &used);
    if (used != ys.size()) throw std::invalid_argument(s);
    return {x, y};
  } catch (const std::logic_error&) {
    throw t2e::ConfigError("expected x,y but got '" + s + "'");
  }
}

void write_atomic(const fs::path& path, const std::string& data) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw t2e::Error("cannot write " + tmp.string());
    out << data;
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Shared episode flags

struct EpisodeFlags {
  std::string config_file;
  std::vector<std::string> maps;
  std::string level;
  std::optional<int> captors;
  std::optional<std::uint64_t> seed;
  std::optional<double> speed_ratio;
  std::optional<int> max_steps;
  std::optional<std::string> mode;
  std::optional<std::string> capture_method;
  std::optional<double> f_thre;
  std::optional<double> dt;
  bool hard_body = false;
  bool no_turn_thrust = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "EpisodeConfig JSON file");
    app->add_option("--map", maps, "Map path or name (repeatable)");
    app->add_option("--level", level,
                    "Use every shipped map of a level (small|medium|large|all)");
    app->add_option("--captors", captors, "Number of captor robots");
    app->add_option("--seed", seed, "Base seed");
    app->add_option("--speed-ratio", speed_ratio,
                    "Target/captor max speed ratio");
    app->add_option("--max-steps", max_steps, "Episode length limit");
    app->add_option("--mode", mode, "cooperative|competitive");
    app->add_option("--capture-method", capture_method, "proxy|asz");
    app->add_option("--f-thre", f_thre, "ASZ capture area threshold (m2)");
    app->add_option("--dt", dt, "Time step (s)");
    app->add_flag("--hard-body", hard_body, "Robots block each other");
    app->add_flag("--no-turn-thrust", no_turn_thrust,
                  "Turn actions rotate in place");
  }

  t2e::EpisodeConfig build() const {
    t2e::EpisodeConfig c;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw t2e::ConfigError("cannot open config " + config_file);
      t2e::ojson j;
      try {
        j = t2e::ojson::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw t2e::ConfigError(std::string("config is not JSON: ") + e.what());
      }
      c = t2e::episode_config_from_json(j);
    }
    if (captors) c.n_captors = *captors;
    if (seed) c.seed = *seed;
    if (speed_ratio) c.speed_ratio = *speed_ratio;
    if (max_steps) c.max_steps = *max_steps;
    if (mode) c.reward.mode = t2e::parse_reward_mode(*mode);
    if (capture_method) {
      c.capture_method = t2e::parse_capture_method(*capture_method);
    }
    if (f_thre) c.reward.f_thre = *f_thre;
    if (dt) c.dt = *dt;
    if (hard_body) c.hard_body = true;
    if (no_turn_thrust) c.turn_thrust = false;
    c.validate();
    return c;
  }

  std::vector<std::string> map_list(const t2e::EpisodeConfig& c) const {
    std::vector<std::string> out = maps;
    if (!level.empty()) {
      const auto extra = maps_of_level(level);
      out.insert(out.end(), extra.begin(), extra.end());
    }
    if (out.empty() && !c.map.empty()) out.push_back(c.map);
    if (out.empty()) throw t2e::ConfigError("no map given (--map or --level)");
    return out;
  }
};

std::unique_ptr<t2e::Policy> policy_or_bridge(const std::string& id) {
  if (id == "bridge" || id.starts_with("bridge:")) return nullptr;
  return t2e::make_policy(id);
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
  EpisodeFlags episode;
  int episodes = 1;
  std::string out_dir = "t2e_out";
  std::string captor_policy = "heuristic-pursuer";
  std::string target_policy = "heuristic-evader";
  int jobs = 1;
  std::vector<std::string> emit = {"logs", "metrics"};
  int soa_every = 1;
  std::string format = "table";
};

t2e::ojson metrics_json(const t2e::MetricsReport& m) {
  t2e::ojson j;
  j["episodes"] = m.episodes;
  j["successes"] = m.successes;
  j["time_steps"] = m.time_steps ? t2e::ojson(*m.time_steps) : t2e::ojson();
  j["sr"] = m.sr;
  j["path_len"] = m.path_len;
  return j;
}

int cmd_run(const RunArgs& args) {
  const t2e::EpisodeConfig base = args.episode.build();
  const std::vector<std::string> maps = args.episode.map_list(base);
  if (args.episodes < 1) throw t2e::ConfigError("--episodes must be >= 1");
  // Validate every policy id and map up front.
  policy_or_bridge(args.captor_policy);
  policy_or_bridge(args.target_policy);
  if (args.captor_policy.starts_with("bridge") ||
      args.target_policy.starts_with("bridge")) {
    throw t2e::ConfigError("use the bridge subcommand for bridged policies");
  }
  std::vector<std::shared_ptr<const t2e::OccupancyGrid>> grids;
  for (const std::string& m : maps) grids.push_back(load_grid(m));

  const auto has = [&](const char* what) {
    return std::find(args.emit.begin(), args.emit.end(), what) !=
           args.emit.end();
  };
  fs::create_directories(args.out_dir);

  std::vector<t2e::TrajectoryLog> logs(args.episodes);
  std::vector<std::size_t> map_of(args.episodes);
  std::vector<std::string> errors(args.episodes);
  std::atomic<int> next{0};
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= args.episodes) return;
      try {
        t2e::EpisodeConfig c = base;
        c.seed = base.seed + static_cast<std::uint64_t>(i);
        t2e::Rng pick(c.seed ^ 0x9E3779B97F4A7C15ULL);
        map_of[i] = grids.size() == 1 ? 0 : pick.uniform_index(grids.size());
        c.map = maps[map_of[i]];
        auto captor = t2e::make_policy(args.captor_policy);
        auto target = t2e::make_policy(args.target_policy);
        logs[i] = t2e::run_episode(grids[map_of[i]], c, *captor, *target);
        if (has("logs")) {
          char name[64];
          std::snprintf(name, sizeof(name), "episode_%05d.jsonl", i);
          write_atomic(fs::path(args.out_dir) / name,
                       t2e::log_to_string(logs[i]));
        }
      } catch (const t2e::SpawnExhausted& e) {
        errors[i] = std::string("map: ") + e.what();
      } catch (const std::exception& e) {
        errors[i] = std::string("error: ") + e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min(args.jobs, args.episodes));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (int i = 0; i < args.episodes; ++i) {
    if (errors[i].empty()) continue;
    if (errors[i].starts_with("map: ")) throw MapError(errors[i].substr(5));
    throw t2e::Error(errors[i]);
  }

  const t2e::MetricsReport report = t2e::compute_metrics(logs);
  t2e::ojson out = metrics_json(report);
  out["config"] = t2e::to_json(base);
  out["maps"] = maps;
  out["policies"] = {{"captor", args.captor_policy},
                     {"target", args.target_policy}};
  if (has("soa")) {
    t2e::ojson traces = t2e::ojson::array();
    for (int i = 0; i < args.episodes; ++i) {
      const auto specs = t2e::make_specs(logs[i].config);
      t2e::ojson trace = t2e::ojson::array();
      for (const auto& [t, area] :
           t2e::soa_series(logs[i], *grids[map_of[i]], specs, args.soa_every)) {
        trace.push_back({t, area});
      }
      traces.push_back({{"episode", i}, {"trace", std::move(trace)}});
    }
    out["soa"] = std::move(traces);
  }
  if (has("metrics")) {
    write_atomic(fs::path(args.out_dir) / "metrics.json", out.dump(2) + "\n");
  }
  if (args.format == "json") {
    std::cout << metrics_json(report).dump() << "\n";
  } else {
    std::ostringstream label;
    label << "v_e/v_p=" << base.speed_ratio << " n_p=" << base.n_captors;
    const t2e::MetricsRow rows[] = {{label.str(), report}};
    std::cout << t2e::format_metrics_table(rows);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// asz

struct AszArgs {
  std::string map;
  std::vector<std::string> captors;
  std::string target;
  double captor_speed = t2e::kCaptorMaxSpeed;
  double target_speed = t2e::kCaptorMaxSpeed;
  double f_thre = t2e::kDefaultCaptureArea;
  double inflate = 0.0;
  std::string mask_out;
};

int cmd_asz(const AszArgs& args) {
  const auto grid = load_grid(args.map);
  std::vector<t2e::Vec2> captors;
  for (const std::string& s : args.captors) captors.push_back(parse_point(s));
  if (captors.empty()) throw t2e::ConfigError("at least one --captor needed");
  const t2e::Vec2 target = parse_point(args.target);
  t2e::AszOptions options;
  options.solve.inflation_radius = args.inflate;
  t2e::AszReport report;
  try {
    report = t2e::compute_asz(*grid, captors, args.captor_speed, target,
                              args.target_speed, args.f_thre, options);
  } catch (const t2e::SourceInObstacle& e) {
    std::cerr << "t2e asz: " << e.what() << "\n";
    return kPositionError;
  } catch (const t2e::SourceOutOfBounds& e) {
    std::cerr << "t2e asz: " << e.what() << "\n";
    return kPositionError;
  }
  std::string mask = std::string(t2e::kMapMagic) + "\nresolution " +
                     t2e::format_resolution(grid->resolution()) + "\nsize " +
                     std::to_string(grid->width()) + " " +
                     std::to_string(grid->height()) + "\n" +
                     t2e::render_asz(*grid, report);
  if (args.mask_out.empty()) {
    std::cout << mask;
  } else {
    write_atomic(args.mask_out, mask);
  }
  t2e::ojson summary{{"area_m2", report.area}, {"captured", report.captured}};
  std::cout << summary.dump() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// bridge

struct BridgeArgs {
  EpisodeFlags episode;
  std::string endpoint = "stdio";
  std::string captor_policy = "bridge";
  std::string target_policy;  // default depends on mode
  int timeout_ms = 30000;
  std::string log_path;
};

int cmd_bridge(const BridgeArgs& args) {
  t2e::EpisodeConfig config = args.episode.build();
  const std::vector<std::string> maps = args.episode.map_list(config);
  t2e::Rng pick(config.seed ^ 0x9E3779B97F4A7C15ULL);
  config.map = maps.size() == 1 ? maps[0] : maps[pick.uniform_index(maps.size())];
  const auto grid = load_grid(config.map);

  std::string target_id = args.target_policy;
  if (target_id.empty()) {
    target_id = config.reward.mode == t2e::RewardMode::Competitive
                    ? "bridge"
                    : "heuristic-evader";
  }
  auto captor = policy_or_bridge(args.captor_policy);
  auto target = policy_or_bridge(target_id);

  std::unique_ptr<t2e::FdChannel> channel;
  if (args.endpoint == "stdio") {
    channel = std::make_unique<t2e::FdChannel>(0, 1);
  } else if (args.endpoint.starts_with("unix:")) {
    channel = t2e::accept_unix_client(args.endpoint.substr(5), args.timeout_ms);
  } else {
    throw t2e::ConfigError("endpoint must be stdio or unix:<path>");
  }

  t2e::Episode ep(grid, config);
  t2e::BridgeOptions options;
  options.timeout_ms = args.timeout_ms;
  const t2e::TrajectoryLog log = t2e::run_bridge_session(
      ep, *channel, captor.get(), target.get(), options);
  if (!args.log_path.empty()) {
    write_atomic(args.log_path, t2e::log_to_string(log));
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// map-info

int cmd_map_info(const std::string& map, const std::string& pgm) {
  const auto grid = load_grid(map);
  const double area = t2e::traversable_area(*grid);
  t2e::ojson j;
  j["name"] = grid->name();
  j["width"] = grid->width();
  j["height"] = grid->height();
  j["resolution"] = grid->resolution();
  j["free_cells"] = grid->free_cell_count();
  j["area_m2"] = area;
  j["level"] = t2e::to_string(t2e::classify_level(area));
  j["hash"] = t2e::map_hash(*grid);
  std::cout << j.dump() << "\n";
  if (!pgm.empty()) write_atomic(pgm, t2e::export_pgm(*grid));
  return kOk;
}

// ---------------------------------------------------------------------------
// replay

int cmd_replay(const std::string& log_path, const std::string& map_override) {
  std::ifstream in(log_path);
  if (!in) throw t2e::ConfigError("cannot open log " + log_path);
  t2e::TrajectoryLog log;
  try {
    log = t2e::read_log(in);
  } catch (const t2e::ParseError& e) {
    throw t2e::ConfigError(std::string("bad log: ") + e.what());
  }
  const auto grid =
      load_grid(map_override.empty() ? log.config.map : map_override);
  if (t2e::map_hash(*grid) != log.map_hash) {
    throw MapError("map hash does not match the log");
  }
  const std::vector<std::string> reward_diffs = t2e::rederive_rewards(log);
  const t2e::TrajectoryLog again = t2e::resimulate(log, grid);
  const std::vector<std::string> diffs = t2e::diff_logs(log, again);
  for (const std::string& d : reward_diffs) std::cerr << d << "\n";
  for (const std::string& d : diffs) std::cerr << d << "\n";
  const t2e::TrajectoryLog one[] = {log};
  const t2e::MetricsReport m = t2e::compute_metrics(one);
  t2e::ojson summary;
  summary["steps"] = log.steps.size();
  summary["success"] = log.outcome.success;
  summary["path_len"] = m.path_len;
  summary["reward_diffs"] = reward_diffs.size();
  summary["state_diffs"] = diffs.size();
  std::cout << summary.dump() << "\n";
  return (reward_diffs.empty() && diffs.empty()) ? kOk : kReplayMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);
  CLI::App app{"t2e: multi-robot target trapping simulator"};
  app.require_subcommand(1);

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run episodes and report metrics");
  run.episode.attach(run_cmd);
  run_cmd->add_option("--episodes", run.episodes, "Episode count");
  run_cmd->add_option("--out", run.out_dir, "Output directory");
  run_cmd->add_option("--captor-policy", run.captor_policy,
                      "heuristic-pursuer|stop|random|scripted:<file>");
  run_cmd->add_option("--target-policy", run.target_policy,
                      "heuristic-evader|stop|random|scripted:<file>");
  run_cmd->add_option("--jobs", run.jobs, "Worker threads");
  run_cmd->add_option("--emit", run.emit, "Artifacts: logs, metrics, soa")
      ->delimiter(',');
  run_cmd->add_option("--soa-every", run.soa_every, "SoA sampling stride");
  run_cmd->add_option("--format", run.format, "table|json")
      ->check(CLI::IsMember({"table", "json"}));

  AszArgs asz;
  CLI::App* asz_cmd = app.add_subcommand("asz", "Compute an ASZ snapshot");
  asz_cmd->add_option("--map", asz.map, "Map path or name")->required();
  asz_cmd->add_option("--captor", asz.captors, "Captor position x,y (m)")
      ->required();
  asz_cmd->add_option("--target", asz.target, "Target position x,y (m)")
      ->required();
  asz_cmd->add_option("--captor-speed", asz.captor_speed, "Captor speed (m/s)");
  asz_cmd->add_option("--target-speed", asz.target_speed, "Target speed (m/s)");
  asz_cmd->add_option("--f-thre", asz.f_thre, "Capture area threshold (m2)");
  asz_cmd->add_option("--inflate", asz.inflate,
                      "Inflate obstacles by this radius (m)");
  asz_cmd->add_option("--mask-out", asz.mask_out, "Write the mask to a file");

  BridgeArgs bridge;
  CLI::App* bridge_cmd =
      app.add_subcommand("bridge", "Serve the policy bridge for one episode");
  bridge.episode.attach(bridge_cmd);
  bridge_cmd->add_option("--endpoint", bridge.endpoint, "stdio|unix:<path>");
  bridge_cmd->add_option("--captor-policy", bridge.captor_policy,
                         "bridge or a built-in policy");
  bridge_cmd->add_option("--target-policy", bridge.target_policy,
                         "bridge or a built-in policy");
  bridge_cmd->add_option("--timeout-ms", bridge.timeout_ms,
                         "Per-reply timeout (<= 0 waits forever)");
  bridge_cmd->add_option("--log", bridge.log_path, "Write the replay log");

  std::string info_map, info_pgm;
  CLI::App* info_cmd = app.add_subcommand("map-info", "Validate and describe a map");
  info_cmd->add_option("map", info_map, "Map path or name")->required();
  info_cmd->add_option("--pgm", info_pgm, "Export a PGM image");

  std::string replay_log, replay_map;
  CLI::App* replay_cmd =
      app.add_subcommand("replay", "Re-derive a log and diff it");
  replay_cmd->add_option("log", replay_log, "Replay log (.jsonl)")->required();
  replay_cmd->add_option("--map", replay_map, "Override the logged map path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*asz_cmd) return cmd_asz(asz);
    if (*bridge_cmd) return cmd_bridge(bridge);
    if (*info_cmd) return cmd_map_info(info_map, info_pgm);
    if (*replay_cmd) return cmd_replay(replay_log, replay_map);
  } catch (const MapError& e) {
    std::cerr << "t2e: map error: " << e.what() << "\n";
    return kMapError;
  } catch (const t2e::SpawnExhausted& e) {
    std::cerr << "t2e: map error: " << e.what() << "\n";
    return kMapError;
  } catch (const t2e::ConfigError& e) {
    std::cerr << "t2e: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const t2e::ProtocolError& e) {
    std::cerr << "t2e: bridge " << e.kind() << " error: " << e.what() << "\n";
    return kProtocolError;
  } catch (const std::exception& e) {
    std::cerr << "t2e: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
