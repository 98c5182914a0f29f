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

// Regenerates the shipped procedural map set.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "t2e/gridmap.hpp"
#include "t2e/mapgen.hpp"

namespace {

struct Entry {
  const char* name;
  t2e::MapLevel level;
  std::uint64_t seed;
};

// Fixed seeds so the shipped files are reproducible.
constexpr Entry kMaps[] = {
    {"indoor_s01", t2e::MapLevel::Small, 101},
    {"indoor_s02", t2e::MapLevel::Small, 102},
    {"indoor_s03", t2e::MapLevel::Small, 103},
    {"indoor_s04", t2e::MapLevel::Small, 104},
    {"indoor_s05", t2e::MapLevel::Small, 105},
    {"indoor_m01", t2e::MapLevel::Medium, 201},
    {"indoor_m02", t2e::MapLevel::Medium, 202},
    {"indoor_m03", t2e::MapLevel::Medium, 203},
    {"indoor_m04", t2e::MapLevel::Medium, 204},
    {"indoor_m05", t2e::MapLevel::Medium, 205},
    {"indoor_l01", t2e::MapLevel::Large, 301},
    {"indoor_l02", t2e::MapLevel::Large, 302},
    {"indoor_l03", t2e::MapLevel::Large, 303},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the procedural indoor map set"};
  std::string out_dir = "maps/generated";
  app.add_option("-o,--out", out_dir, "Output directory");
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out_dir);
  double total = 0.0;
  for (const Entry& e : kMaps) {
    const t2e::OccupancyGrid grid =
        t2e::generate_indoor_map(e.seed, t2e::level_params(e.level), e.name);
    const auto path = std::filesystem::path(out_dir) /
                      (std::string(e.name) + std::string(t2e::kMapExtension));
    t2e::save_map(grid, path);
    const double area = t2e::traversable_area(grid);
    total += area;
    std::printf("%-12s %-6s %4dx%-4d %7.2f m2\n", e.name,
                t2e::to_string(t2e::classify_level(grid)), grid.width(),
                grid.height(), area);
  }
  std::printf("mean area %.2f m2 over %zu maps\n",
              total / std::size(kMaps), std::size(kMaps));
  return 0;
}
