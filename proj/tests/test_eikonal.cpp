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
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "t2e/eikonal.hpp"

namespace t2e {
namespace {

double field_at(const OccupancyGrid& g, const std::vector<double>& f, Vec2 p) {
  return f[g.index(g.cell_of(p))];
}

std::vector<Vec2> free_centers(const OccupancyGrid& g) {
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.cells()[i]) out.push_back(g.center(i));
  }
  return out;
}

TEST(Arrival, EmptyArenaMatchesEuclidean) {
  const OccupancyGrid g = oracle::empty_grid(100, 100);
  const Vec2 src{5.05, 5.05};
  const ArrivalField f = solve_arrival(g, src, 1.0);
  const Vec2 probe{8.05, 5.05};
  EXPECT_NEAR(f.at(g.cell_of(probe)), 3.0, 0.06);
  const Vec2 diag{5.05 + 2.1, 5.05 + 2.1};
  EXPECT_NEAR(f.at(g.cell_of(diag)), distance(src, diag), 0.02 * 2.97);
}

TEST(Arrival, SourceCellAndSpeedScaling) {
  const OccupancyGrid g = oracle::random_grid(4, 30, 30, 0.2);
  const Vec2 src = g.center(Cell{15, 15});
  const ArrivalField slow = solve_arrival(g, src, 0.5);
  const ArrivalField fast = solve_arrival(g, src, 2.0);
  EXPECT_LE(slow.at(Cell{15, 15}), g.resolution() / 0.5);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::isfinite(slow.times[i])) {
      EXPECT_DOUBLE_EQ(slow.times[i], 4.0 * fast.times[i]);
    } else {
      EXPECT_FALSE(std::isfinite(fast.times[i]));
    }
  }
}

TEST(Arrival, Errors) {
  const OccupancyGrid g = oracle::empty_grid(20, 20);
  EXPECT_THROW(solve_arrival(g, {0.05, 0.05}, 1.0), SourceInObstacle);
  EXPECT_THROW(solve_arrival(g, {-0.5, 1.0}, 1.0), SourceOutOfBounds);
  EXPECT_THROW(solve_arrival(g, {5.0, 1.0}, 1.0), SourceOutOfBounds);
  EXPECT_THROW(solve_arrival(g, {1.0, 1.0}, 0.0), ConfigError);
  EXPECT_THROW(solve_arrival(g, {1.0, 1.0}, -1.0), ConfigError);
}

TEST(Arrival, FieldInvariants) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const OccupancyGrid g = oracle::random_grid(seed, 40, 40, 0.25);
    const Vec2 src = g.center(Cell{20, 20});
    const ArrivalField f = solve_arrival(g, src, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.cells()[i]) {
        EXPECT_TRUE(std::isinf(f.times[i]));
        continue;
      }
      EXPECT_GE(f.times[i], 0.0);
      if (!std::isfinite(f.times[i])) continue;
      // Every reached cell outside the seeded block has a neighbour that was
      // reached no later.
      const Cell c = g.cell(i);
      if (std::abs(c.col - 20) <= 1 && std::abs(c.row - 20) <= 1) continue;
      double lowest = oracle::kInf;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if ((dr || dc) && !g.occupied(c.col + dc, c.row + dr)) {
            lowest = std::min(lowest, f.at(Cell{c.col + dc, c.row + dr}));
          }
        }
      }
      EXPECT_LE(lowest, f.times[i]);
    }
  }
}

TEST(Arrival, UWallWithinDijkstraBand) {
  const OccupancyGrid g = load_map(T2E_TEST_MAP_DIR "/fixtures/u_wall.t2e.map");
  const Vec2 src{4.05, 4.05};  // inside the U
  const Vec2 probe{7.05, 4.05};
  const std::vector<double> fmm = solve_distance(g, src);
  const std::vector<double> d8 = oracle::dijkstra(g, g.cell_of(src), 8);
  const double t = field_at(g, fmm, probe);
  const double ref = field_at(g, d8, probe);
  EXPECT_GE(t, distance(src, probe));
  EXPECT_NEAR(t, ref, 0.05 * ref);
  // The wall forces a real detour.
  EXPECT_GT(t, distance(src, probe) + 1.0);
}

// Oracle band: Euclidean - one cell diagonal <= FMM <= Dijkstra-16 + one
// cell. The slack above Dijkstra-16 covers the first-order stencil, whose
// error can exceed the 16-connected lattice's on long oblique runs.
TEST(Arrival, OracleBandOnRandomGrids) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const OccupancyGrid g = oracle::random_grid(1000 + seed, 50, 50, 0.2);
    const Vec2 src = g.center(Cell{25, 25});
    const std::vector<double> fmm = solve_distance(g, src);
    const std::vector<double> d16 = oracle::dijkstra(g, g.cell_of(src), 16);
    const std::vector<double> d8 = oracle::dijkstra(g, g.cell_of(src), 8);
    const double cell = g.resolution();
    const double diag = std::numbers::sqrt2 * cell;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(d8[i])) {
        EXPECT_FALSE(std::isfinite(fmm[i])) << "seed " << seed << " cell " << i;
        continue;
      }
      ASSERT_TRUE(std::isfinite(fmm[i]));
      EXPECT_GE(fmm[i], distance(src, g.center(i)) - diag);
      EXPECT_LE(fmm[i], d16[i] + cell);
      EXPECT_LE(fmm[i], d8[i] * 1.01 + 1e-12);
      ++checked;
    }
  }
  EXPECT_GT(checked, 50 * 1000);
}

TEST(Arrival, InflationBlocksNarrowGaps) {
  // A 0.2 m slot is passable for a point but not for a 0.2 m radius robot.
  std::vector<std::string> rows(20, std::string(40, '.'));
  for (int c = 0; c < 40; ++c) rows[0][c] = rows[19][c] = '#';
  for (int r = 0; r < 20; ++r) rows[r][0] = rows[r][39] = rows[r][20] = '#';
  rows[9][20] = rows[10][20] = '.';
  const OccupancyGrid g = oracle::grid_from_rows(rows);
  const Vec2 src = g.center(Cell{5, 10});
  const Vec2 probe = g.center(Cell{35, 10});
  EXPECT_TRUE(std::isfinite(field_at(g, solve_distance(g, src), probe)));
  const auto inflated = solve_distance(g, src, {.inflation_radius = 0.2});
  EXPECT_TRUE(std::isinf(field_at(g, inflated, probe)));
}

// ---------------------------------------------------------------------------
// Safe zone

TEST(Asz, HalfArenaBisector) {
  const OccupancyGrid g = oracle::empty_grid(102, 102);
  const Vec2 captor{2.1, 5.1};
  const Vec2 target{8.1, 5.1};
  const Vec2 captors[] = {captor};
  const AszReport r = compute_asz(g, captors, 1.0, target, 1.0);
  EXPECT_NEAR(r.area, 50.0, 1.5);
  // Mask cells sit on the target's side of x = 5.1, apart from a thin band.
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (r.mask[i]) EXPECT_GT(g.center(i).x, 5.1 - 0.2);
  }
  EXPECT_FALSE(r.captured);
}

TEST(Asz, CoincidentRobotsGiveEmptyZone) {
  const OccupancyGrid g = oracle::random_grid(9, 30, 30, 0.1);
  const Vec2 p = g.center(Cell{15, 15});
  const Vec2 captors[] = {p};
  const AszReport r = compute_asz(g, captors, 1.0, p, 1.0);
  EXPECT_EQ(r.cell_count(), 0u);
  EXPECT_DOUBLE_EQ(r.area, 0.0);
  EXPECT_TRUE(r.captured);
}

TEST(Asz, DeadEndMouthMatchesOraclePerCell) {
  const OccupancyGrid g =
      load_map(T2E_TEST_MAP_DIR "/fixtures/dead_end.t2e.map");
  const std::vector<Vec2> captors = {{3.95, 2.05}, {3.85, 1.85}, {3.85, 2.25}};
  const Vec2 target{5.5, 2.05};
  const AszReport r = compute_asz(g, captors, 1.0, target, 1.0);

  std::vector<ArrivalField> cf;
  for (const Vec2& p : captors) cf.push_back(oracle::dijkstra_field(g, p, 1.0));
  const auto expected =
      oracle::asz_mask(g, cf, oracle::dijkstra_field(g, target, 1.0));
  // Away from the equal-time front both agree exactly; the front itself may
  // shift by a cell between the two distance models.
  std::size_t differ = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (r.mask[i] != expected[i]) ++differ;
    if (r.mask[i]) EXPECT_GE(g.center(i).x, 4.0);  // only inside the corridor
  }
  EXPECT_LE(differ, 12u);
  EXPECT_GT(r.cell_count(), 60u);
}

TEST(Asz, DecompositionWithOracleSolver) {
  const OccupancyGrid g = oracle::random_grid(21, 40, 40, 0.2);
  const auto free = free_centers(g);
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<Vec2> captors = {free[pick(gen)], free[pick(gen)]};
    const Vec2 target = free[pick(gen)];
    auto solver = [](const OccupancyGrid& gg, Vec2 p, double v) {
      return oracle::dijkstra_field(gg, p, v);
    };
    const AszReport r =
        compute_asz_with(solver, g, captors, 1.0, target, 1.2, 0.5);
    std::vector<ArrivalField> cf;
    for (const Vec2& p : captors) cf.push_back(oracle::dijkstra_field(g, p, 1.0));
    const auto expected =
        oracle::asz_mask(g, cf, oracle::dijkstra_field(g, target, 1.2));
    EXPECT_EQ(r.mask, expected);
  }
}

TEST(Asz, ReportInvariants) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const OccupancyGrid g = oracle::random_grid(seed, 30, 30, 0.25);
    const auto free = free_centers(g);
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
    const std::vector<Vec2> captors = {free[pick(gen)]};
    const double f_thre = 0.01 * static_cast<double>(seed * 5);
    const AszReport r =
        compute_asz(g, captors, 1.0, free[pick(gen)], 1.0, f_thre + 1e-6);
    EXPECT_DOUBLE_EQ(r.area, r.cell_count() * 0.01);
    EXPECT_EQ(r.captured, r.area < f_thre + 1e-6);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.cells()[i]) EXPECT_EQ(r.mask[i], 0);
    }
  }
}

TEST(Asz, UnreachablePocketExcluded) {
  std::vector<std::string> rows(20, std::string(20, '.'));
  for (int i = 0; i < 20; ++i) {
    rows[0][i] = rows[19][i] = rows[i][0] = rows[i][19] = rows[i][10] = '#';
  }
  const OccupancyGrid g = oracle::grid_from_rows(rows);
  const Vec2 captors[] = {g.center(Cell{3, 3})};
  const AszReport r = compute_asz(g, captors, 1.0, g.center(Cell{7, 10}), 1.0);
  for (int row = 1; row < 19; ++row) {
    for (int col = 11; col < 19; ++col) EXPECT_FALSE(r.contains({col, row}));
  }
}

TEST(Asz, AddingCaptorNeverGrowsZone) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const OccupancyGrid g = oracle::random_grid(seed + 50, 35, 35, 0.2);
    const auto free = free_centers(g);
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
    const Vec2 target = free[pick(gen)];
    std::vector<Vec2> captors = {free[pick(gen)]};
    AszReport prev = compute_asz(g, captors, 1.0, target, 1.0);
    for (int k = 0; k < 3; ++k) {
      captors.push_back(free[pick(gen)]);
      const AszReport next = compute_asz(g, captors, 1.0, target, 1.0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_LE(next.mask[i], prev.mask[i]);
      }
      prev = next;
    }
  }
}

TEST(Asz, SpeedMonotonicity) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const OccupancyGrid g = oracle::random_grid(seed + 80, 35, 35, 0.2);
    const auto free = free_centers(g);
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
    const std::vector<Vec2> captors = {free[pick(gen)], free[pick(gen)]};
    const Vec2 target = free[pick(gen)];
    const AszReport base = compute_asz(g, captors, 1.0, target, 1.0);
    const AszReport faster_target = compute_asz(g, captors, 1.0, target, 1.4);
    const AszReport faster_captors = compute_asz(g, captors, 1.3, target, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_GE(faster_target.mask[i], base.mask[i]);
      EXPECT_LE(faster_captors.mask[i], base.mask[i]);
    }
  }
}

TEST(Asz, MirrorSymmetry) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const OccupancyGrid g = oracle::random_grid(seed + 7, 32, 28, 0.2);
    std::vector<std::uint8_t> flipped(g.size());
    for (int r = 0; r < g.height(); ++r) {
      for (int c = 0; c < g.width(); ++c) {
        flipped[g.index(g.width() - 1 - c, r)] = g.cells()[g.index(c, r)];
      }
    }
    const OccupancyGrid m(g.width(), g.height(), g.resolution(), flipped);
    auto mirror = [&](Vec2 p) { return Vec2{g.extent_x() - p.x, p.y}; };
    const auto free = free_centers(g);
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
    const std::vector<Vec2> captors = {free[pick(gen)], free[pick(gen)]};
    const Vec2 target = free[pick(gen)];
    const std::vector<Vec2> mcaptors = {mirror(captors[0]), mirror(captors[1])};
    const AszReport a = compute_asz(g, captors, 1.0, target, 1.0);
    const AszReport b = compute_asz(m, mcaptors, 1.0, mirror(target), 1.0);
    for (int r = 0; r < g.height(); ++r) {
      for (int c = 0; c < g.width(); ++c) {
        EXPECT_EQ(a.mask[g.index(c, r)], b.mask[g.index(g.width() - 1 - c, r)]);
      }
    }
  }
}

TEST(Asz, ParallelSolveIsBitwiseIdentical) {
  const OccupancyGrid g = oracle::random_grid(33, 60, 60, 0.2);
  const auto free = free_centers(g);
  const std::vector<Vec2> captors = {free[3], free[400], free[900]};
  AszOptions par;
  par.parallel = true;
  const AszReport a = compute_asz(g, captors, 1.0, free[1500], 1.2);
  const AszReport b = compute_asz(g, captors, 1.0, free[1500], 1.2, 0.5, par);
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_EQ(a.area, b.area);
}

TEST(Asz, RenderUsesMapAlphabet) {
  const OccupancyGrid g = oracle::empty_grid(12, 10);
  const Vec2 captors[] = {g.center(Cell{2, 5})};
  const AszReport r = compute_asz(g, captors, 1.0, g.center(Cell{9, 5}), 1.0);
  const std::string text = render_asz(g, r);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), 'S')),
            r.cell_count());
  EXPECT_EQ(text.substr(0, 13), "############\n");
}

TEST(Asz, NoCaptorsIsConfigError) {
  const OccupancyGrid g = oracle::empty_grid(12, 10);
  EXPECT_THROW(compute_asz(g, {}, 1.0, {0.5, 0.5}, 1.0), ConfigError);
}

}  // namespace
}  // namespace t2e
