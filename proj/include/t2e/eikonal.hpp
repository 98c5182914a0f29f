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

// Arrival-time fields and the Absolutely Safe Zone.
//
// The arrival time from a robot to a point is the obstacle-aware shortest
// path length divided by the robot's speed. Path lengths come from a
// first-order fast marching solve on the 8-neighbour stencil: every cell is
// updated from the triangles formed by one axis neighbour and one diagonal
// neighbour, minimising over the segment between them. Axis and diagonal
// directions are exact; the scheme never exceeds the 8-connected graph
// distance.

#ifndef T2E_EIKONAL_HPP_
#define T2E_EIKONAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "t2e/errors.hpp"
#include "t2e/gridmap.hpp"
#include "t2e/vec2.hpp"

namespace t2e {

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// Cells where captor and target arrive within this many seconds of each
/// other are ties and stay outside the safe zone.
inline constexpr double kTieTolerance = 1e-9;

inline constexpr double kDefaultCaptureArea = 0.5;

/// Per-cell minimum arrival time from one source.
struct ArrivalField {
  std::string grid_name;
  int width = 0;
  int height = 0;
  double resolution = kDefaultResolution;
  Vec2 source;
  double speed = 1.0;
  std::vector<double> times;  // seconds, +inf for occupied or unreachable

  double at(Cell c) const {
    return times[static_cast<std::size_t>(c.row) * width + c.col];
  }
};

struct SolveOptions {
  /// Cells whose center clearance is below this radius are treated as
  /// obstacles (the source cell excepted). Zero disables inflation.
  double inflation_radius = 0.0;
};

namespace detail {

inline void check_source(const OccupancyGrid& grid, Vec2 source) {
  if (!grid.contains(source)) {
    throw SourceOutOfBounds("source outside map");
  }
  if (grid.occupied_at(source)) {
    throw SourceInObstacle("source inside an obstacle cell");
  }
}

// Minimum over the segment between an axis neighbour (value da) and the
// adjoining diagonal neighbour (value db) of value + travel distance.
inline double triangle_update(double da, double db, double h) {
  const double delta = db - da;
  if (delta >= 0.0) return da + h;
  const double u = -delta / h;
  if (u >= std::numbers::sqrt2 / 2.0) return db + std::numbers::sqrt2 * h;
  const double s = u / std::sqrt(1.0 - u * u);
  return da + s * delta + h * std::sqrt(1.0 + s * s);
}

}  // namespace detail

/// Shortest obstacle-aware path length (meters) from `source` to every cell
/// center. Occupied and unreachable cells are +inf.
inline std::vector<double> solve_distance(const OccupancyGrid& grid,
                                          Vec2 source,
                                          const SolveOptions& options = {}) {
  detail::check_source(grid, source);
  const int w = grid.width();
  const int hgt = grid.height();
  const double h = grid.resolution();
  const double hd = std::numbers::sqrt2 * h;
  const std::size_t n = grid.size();
  const Cell src = grid.cell_of(source);
  const std::size_t src_idx = grid.index(src);

  std::vector<std::uint8_t> blocked(grid.cells());
  if (options.inflation_radius > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!blocked[i] && grid.center_clearance(i) < options.inflation_radius) {
        blocked[i] = 1;
      }
    }
    blocked[src_idx] = 0;
  }
  auto is_blocked = [&](int c, int r) {
    return c < 0 || r < 0 || c >= w || r >= hgt ||
           blocked[static_cast<std::size_t>(r) * w + c] != 0;
  };

  std::vector<double> dist(n, kInfiniteTime);
  std::vector<std::uint8_t> frozen(n, 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

  auto seed = [&](int c, int r) {
    const std::size_t i = grid.index(c, r);
    const double d = distance(source, grid.center(Cell{c, r}));
    if (d < dist[i]) {
      dist[i] = d;
      heap.emplace(d, i);
    }
  };
  // Exact Euclidean values in the 3x3 block around the source; a diagonal
  // cell needs one open axis cell between it and the source.
  seed(src.col, src.row);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if ((dr == 0 && dc == 0) || is_blocked(src.col + dc, src.row + dr)) {
        continue;
      }
      if (dr != 0 && dc != 0 && is_blocked(src.col + dc, src.row) &&
          is_blocked(src.col, src.row + dr)) {
        continue;
      }
      seed(src.col + dc, src.row + dr);
    }
  }

  auto is_frozen = [&](int c, int r) {
    return !is_blocked(c, r) && frozen[static_cast<std::size_t>(r) * w + c];
  };
  auto value = [&](int c, int r) {
    return dist[static_cast<std::size_t>(r) * w + c];
  };

  auto update = [&](int c, int r) {
    double best = dist[grid.index(c, r)];
    constexpr int kAxis[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& ax : kAxis) {
      const int ac = c + ax[0];
      const int ar = r + ax[1];
      if (!is_frozen(ac, ar)) continue;
      const double da = value(ac, ar);
      best = std::min(best, da + h);
      for (int s = -1; s <= 1; s += 2) {
        // Diagonal partner: offset perpendicular to the axis direction.
        const int bc = ac + (ax[0] == 0 ? s : 0);
        const int br = ar + (ax[1] == 0 ? s : 0);
        if (!is_frozen(bc, br)) continue;
        best = std::min(best, detail::triangle_update(da, value(bc, br), h));
      }
    }
    constexpr int kDiag[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    for (const auto& dg : kDiag) {
      const int bc = c + dg[0];
      const int br = r + dg[1];
      if (!is_frozen(bc, br)) continue;
      if (is_blocked(c + dg[0], r) && is_blocked(c, r + dg[1])) continue;
      best = std::min(best, value(bc, br) + hd);
    }
    return best;
  };

  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (frozen[i] || d > dist[i]) continue;
    frozen[i] = 1;
    const Cell cur = grid.cell(i);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const int nc = cur.col + dc;
        const int nr = cur.row + dr;
        if ((dr == 0 && dc == 0) || is_blocked(nc, nr)) continue;
        const std::size_t ni = grid.index(nc, nr);
        if (frozen[ni]) continue;
        const double cand = update(nc, nr);
        if (cand < dist[ni]) {
          dist[ni] = cand;
          heap.emplace(cand, ni);
        }
      }
    }
  }
  return dist;
}

/// Arrival-time field of a robot at `source` moving at `speed`.
inline ArrivalField solve_arrival(const OccupancyGrid& grid, Vec2 source,
                                  double speed,
                                  const SolveOptions& options = {}) {
  if (!(speed > 0.0)) throw ConfigError("speed must be positive");
  ArrivalField field;
  field.grid_name = grid.name();
  field.width = grid.width();
  field.height = grid.height();
  field.resolution = grid.resolution();
  field.source = source;
  field.speed = speed;
  field.times = solve_distance(grid, source, options);
  for (double& t : field.times) t /= speed;
  return field;
}

// ---------------------------------------------------------------------------
// Absolutely Safe Zone

struct AszReport {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> mask;  // 1 = inside the safe zone
  double area = 0.0;               // m2
  bool captured = false;

  bool contains(Cell c) const {
    return mask[static_cast<std::size_t>(c.row) * width + c.col] != 0;
  }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(
        std::count(mask.begin(), mask.end(), std::uint8_t{1}));
  }
};

struct AszOptions {
  SolveOptions solve;
  /// Solve the arrival fields on worker threads.
  bool parallel = false;
};

/// Builds the safe zone from already solved fields: a free cell belongs to it
/// iff every captor arrives strictly later than the target.
inline AszReport asz_from_fields(const OccupancyGrid& grid,
                                 std::span<const ArrivalField> captor_fields,
                                 const ArrivalField& target_field,
                                 double f_thre) {
  if (captor_fields.empty()) throw ConfigError("at least one captor required");
  AszReport report;
  report.width = grid.width();
  report.height = grid.height();
  report.mask.assign(grid.size(), 0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.cells()[i]) continue;
    const double te = target_field.times[i];
    if (!std::isfinite(te)) continue;
    double tp = kInfiniteTime;
    for (const ArrivalField& f : captor_fields) tp = std::min(tp, f.times[i]);
    if (tp > te + kTieTolerance) {
      report.mask[i] = 1;
      ++count;
    }
  }
  report.area = static_cast<double>(count) * grid.resolution() *
                grid.resolution();
  report.captured = report.area < f_thre;
  return report;
}

/// Safe zone with a caller-supplied field solver
/// `Solver(grid, position, speed) -> ArrivalField`.
template <typename Solver>
AszReport compute_asz_with(Solver&& solve, const OccupancyGrid& grid,
                           std::span<const Vec2> captor_positions,
                           double captor_speed, Vec2 target_position,
                           double target_speed, double f_thre) {
  if (captor_positions.empty()) {
    throw ConfigError("at least one captor required");
  }
  std::vector<ArrivalField> captor_fields;
  captor_fields.reserve(captor_positions.size());
  for (const Vec2& p : captor_positions) {
    captor_fields.push_back(solve(grid, p, captor_speed));
  }
  const ArrivalField target_field = solve(grid, target_position, target_speed);
  return asz_from_fields(grid, captor_fields, target_field, f_thre);
}

inline AszReport compute_asz(const OccupancyGrid& grid,
                             std::span<const Vec2> captor_positions,
                             double captor_speed, Vec2 target_position,
                             double target_speed,
                             double f_thre = kDefaultCaptureArea,
                             const AszOptions& options = {}) {
  if (captor_positions.empty()) {
    throw ConfigError("at least one captor required");
  }
  if (!options.parallel) {
    return compute_asz_with(
        [&](const OccupancyGrid& g, Vec2 p, double v) {
          return solve_arrival(g, p, v, options.solve);
        },
        grid, captor_positions, captor_speed, target_position, target_speed,
        f_thre);
  }
  std::vector<std::future<ArrivalField>> jobs;
  for (const Vec2& p : captor_positions) {
    jobs.push_back(std::async(std::launch::async, [&grid, p, captor_speed,
                                                   &options] {
      return solve_arrival(grid, p, captor_speed, options.solve);
    }));
  }
  ArrivalField target_field =
      solve_arrival(grid, target_position, target_speed, options.solve);
  std::vector<ArrivalField> captor_fields;
  for (auto& job : jobs) captor_fields.push_back(job.get());
  return asz_from_fields(grid, captor_fields, target_field, f_thre);
}

/// Map-style text rendering: `S` safe, `.` other free space, `#` obstacle.
inline std::string render_asz(const OccupancyGrid& grid,
                              const AszReport& report) {
  std::string out;
  out.reserve(static_cast<std::size_t>(grid.width() + 1) * grid.height());
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      const std::size_t i = grid.index(c, r);
      out += grid.cells()[i] ? '#' : (report.mask[i] ? 'S' : '.');
    }
    out += '\n';
  }
  return out;
}

}  // namespace t2e

#endif  // T2E_EIKONAL_HPP_
