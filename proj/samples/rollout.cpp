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

// Runs one episode on a fixture map with the built-in heuristics and prints
// the trajectory summary plus the final ASZ area.

#include <iostream>
#include <memory>

#include "t2e/t2e.hpp"

int main(int argc, char** argv) {
  const std::string path =
      argc > 1 ? argv[1] : T2E_SAMPLE_MAP_DIR "/fixtures/open_arena.t2e.map";
  auto grid = std::make_shared<const t2e::OccupancyGrid>(t2e::load_map(path));

  t2e::EpisodeConfig config;
  config.map = path;
  config.seed = 7;
  config.n_captors = 3;
  config.speed_ratio = 1.0;

  t2e::HeuristicPursuer pursuer;
  t2e::HeuristicEvader evader;
  const t2e::TrajectoryLog log = t2e::run_episode(grid, config, pursuer, evader);

  const t2e::Snapshot& last =
      log.steps.empty() ? log.initial : log.steps.back().snapshot;
  const auto specs = t2e::make_specs(config);
  const t2e::AszReport asz = t2e::snapshot_asz(*grid, last, specs, config.reward.f_thre);

  std::cout << "map " << grid->name() << " (" << t2e::traversable_area(*grid)
            << " m2)\n"
            << "steps " << log.steps.size() << ", captured "
            << (log.outcome.success ? "yes" : "no") << "\n"
            << "final ASZ area " << asz.area << " m2\n";
  return 0;
}
