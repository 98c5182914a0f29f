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

// Procedural indoor maps: a grid of rectangular rooms separated by one-cell
// walls, joined by doorways along a random spanning tree plus a few extra
// doors, with some rooms dropped and small furniture blocks added. Output is
// a single 4-connected free region.

#ifndef T2E_MAPGEN_HPP_
#define T2E_MAPGEN_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "t2e/errors.hpp"
#include "t2e/gridmap.hpp"
#include "t2e/rng.hpp"

namespace t2e {

struct MapGenParams {
  double resolution = kDefaultResolution;
  double min_area = 20.0;  // m2, inclusive
  double max_area = 38.0;  // m2, inclusive
  int max_rooms_x = 3;
  int max_rooms_y = 3;
  double min_room = 1.6;  // m
  double max_room = 4.2;  // m
  double min_door = 0.8;  // m
  double max_door = 1.2;  // m
  int max_furniture_per_room = 2;
  int max_tries = 2000;
};

inline MapGenParams level_params(MapLevel level) {
  MapGenParams p;
  switch (level) {
    case MapLevel::Small:
      p.min_area = 22.0;
      p.max_area = 36.0;
      break;
    case MapLevel::Medium:
      p.min_area = 42.0;
      p.max_area = 56.0;
      break;
    case MapLevel::Large:
      p.min_area = 62.0;
      p.max_area = 80.0;
      break;
  }
  return p;
}

namespace detail {

struct Layout {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;

  void carve(int c0, int r0, int c1, int r1) {  // half-open
    for (int r = r0; r < r1; ++r) {
      for (int c = c0; c < c1; ++c) {
        cells[static_cast<std::size_t>(r) * width + c] = 0;
      }
    }
  }
  void fill(int c0, int r0, int c1, int r1) {
    for (int r = r0; r < r1; ++r) {
      for (int c = c0; c < c1; ++c) {
        cells[static_cast<std::size_t>(r) * width + c] = 1;
      }
    }
  }
};

inline bool single_component(const std::vector<std::uint8_t>& cells, int w,
                             int h) {
  std::vector<std::uint8_t> seen(cells.size(), 0);
  std::size_t start = cells.size();
  std::size_t free_count = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i]) {
      ++free_count;
      if (start == cells.size()) start = i;
    }
  }
  if (start == cells.size()) return false;
  std::vector<std::size_t> stack{start};
  seen[start] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    ++reached;
    const int c = static_cast<int>(i % w);
    const int r = static_cast<int>(i / w);
    const int nb[4][2] = {{c + 1, r}, {c - 1, r}, {c, r + 1}, {c, r - 1}};
    for (const auto& n : nb) {
      if (n[0] < 0 || n[1] < 0 || n[0] >= w || n[1] >= h) continue;
      const std::size_t j = static_cast<std::size_t>(n[1]) * w + n[0];
      if (cells[j] || seen[j]) continue;
      seen[j] = 1;
      stack.push_back(j);
    }
  }
  return reached == free_count;
}

inline int cells_for(double meters, double res) {
  return std::max(1, static_cast<int>(std::lround(meters / res)));
}

// One layout draw; empty result when the draw is unusable.
inline std::vector<std::uint8_t> draw_layout(Rng& rng, const MapGenParams& p,
                                             int& width, int& height) {
  const double res = p.resolution;
  const int nx = 1 + static_cast<int>(rng.uniform_index(p.max_rooms_x));
  const int ny = 1 + static_cast<int>(rng.uniform_index(p.max_rooms_y));
  std::vector<int> col_w(nx), row_h(ny);
  for (int& w : col_w) w = cells_for(rng.uniform(p.min_room, p.max_room), res);
  for (int& h : row_h) h = cells_for(rng.uniform(p.min_room, p.max_room), res);

  // Room origins, with one-cell walls between rooms and around the border.
  std::vector<int> x0(nx), y0(ny);
  int x = 1;
  for (int i = 0; i < nx; ++i) {
    x0[i] = x;
    x += col_w[i] + 1;
  }
  int y = 1;
  for (int j = 0; j < ny; ++j) {
    y0[j] = y;
    y += row_h[j] + 1;
  }
  width = x;
  height = y;
  if (width < 8 || height < 8) return {};

  Layout lay{width, height,
             std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height,
                                       1)};
  const int rooms = nx * ny;
  std::vector<std::uint8_t> keep(rooms, 1);
  // Drop up to a third of the rooms, keeping the survivors adjacent-connected
  // (checked after carving).
  const int drops = rooms > 2 ? static_cast<int>(rng.uniform_index(rooms / 3 + 1))
                              : 0;
  for (int d = 0; d < drops; ++d) keep[rng.uniform_index(rooms)] = 0;
  if (std::count(keep.begin(), keep.end(), std::uint8_t{1}) == 0) return {};

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (keep[j * nx + i]) {
        lay.carve(x0[i], y0[j], x0[i] + col_w[i], y0[j] + row_h[j]);
      }
    }
  }

  // Candidate doors between kept neighbours; a random spanning tree via
  // shuffled Kruskal, then each leftover edge with probability 0.3.
  struct Edge {
    int a, b;
    bool horizontal;  // a is left of b
  };
  std::vector<Edge> edges;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = j * nx + i;
      if (!keep[a]) continue;
      if (i + 1 < nx && keep[a + 1]) edges.push_back({a, a + 1, true});
      if (j + 1 < ny && keep[a + nx]) edges.push_back({a, a + nx, false});
    }
  }
  for (std::size_t k = edges.size(); k > 1; --k) {
    std::swap(edges[k - 1], edges[rng.uniform_index(k)]);
  }
  std::vector<int> parent(rooms);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const Edge& e : edges) {
    const bool tree = find(e.a) != find(e.b);
    const bool extra = rng.uniform01() < 0.3;
    if (!tree && !extra) continue;
    if (tree) parent[find(e.a)] = find(e.b);
    const int ia = e.a % nx, ja = e.a / nx;
    const int door = cells_for(rng.uniform(p.min_door, p.max_door), res);
    if (e.horizontal) {
      const int span = row_h[ja];
      const int len = std::min(door, span);
      const int off = static_cast<int>(rng.uniform_index(span - len + 1));
      const int wall_c = x0[ia] + col_w[ia];
      lay.carve(wall_c, y0[ja] + off, wall_c + 1, y0[ja] + off + len);
    } else {
      const int span = col_w[ia];
      const int len = std::min(door, span);
      const int off = static_cast<int>(rng.uniform_index(span - len + 1));
      const int wall_r = y0[ja] + row_h[ja];
      lay.carve(x0[ia] + off, wall_r, x0[ia] + off + len, wall_r + 1);
    }
  }

  // Furniture: boxes 0.3-0.8 m kept clear of room edges so doors stay open;
  // a box that would split the free space is skipped.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!keep[j * nx + i]) continue;
      const int count = static_cast<int>(
          rng.uniform_index(static_cast<std::uint64_t>(p.max_furniture_per_room) + 1));
      for (int f = 0; f < count; ++f) {
        const int bw = cells_for(rng.uniform(0.3, 0.8), res);
        const int bh = cells_for(rng.uniform(0.3, 0.8), res);
        const int margin = cells_for(0.6, res);
        const int free_w = col_w[i] - 2 * margin - bw;
        const int free_h = row_h[j] - 2 * margin - bh;
        if (free_w < 0 || free_h < 0) continue;
        const int c0 = x0[i] + margin +
                       static_cast<int>(rng.uniform_index(free_w + 1));
        const int r0 = y0[j] + margin +
                       static_cast<int>(rng.uniform_index(free_h + 1));
        std::vector<std::uint8_t> backup = lay.cells;
        lay.fill(c0, r0, c0 + bw, r0 + bh);
        if (!single_component(lay.cells, width, height)) lay.cells = backup;
      }
    }
  }
  if (!single_component(lay.cells, width, height)) return {};
  return lay.cells;
}

}  // namespace detail

/// Draws layouts from `seed` until one's traversable area lands in
/// [min_area, max_area].
inline OccupancyGrid generate_indoor_map(std::uint64_t seed,
                                         const MapGenParams& params,
                                         std::string name = {}) {
  Rng rng(seed);
  for (int attempt = 0; attempt < params.max_tries; ++attempt) {
    int w = 0, h = 0;
    std::vector<std::uint8_t> cells = detail::draw_layout(rng, params, w, h);
    if (cells.empty()) continue;
    const auto free_cells = std::count(cells.begin(), cells.end(), 0);
    const double area =
        static_cast<double>(free_cells) * params.resolution * params.resolution;
    if (area < params.min_area || area > params.max_area) continue;
    return OccupancyGrid(w, h, params.resolution, std::move(cells),
                         std::move(name));
  }
  throw Error("map generation did not reach the requested area band");
}

}  // namespace t2e

#endif  // T2E_MAPGEN_HPP_
