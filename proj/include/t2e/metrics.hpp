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

#ifndef T2E_METRICS_HPP_
#define T2E_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "t2e/eikonal.hpp"
#include "t2e/engine.hpp"
#include "t2e/rewards.hpp"

namespace t2e {

struct MetricsReport {
  int episodes = 0;
  int successes = 0;
  std::optional<double> time_steps;  // mean steps over successful episodes
  double sr = 0.0;                   // percent
  double path_len = 0.0;             // meters
  std::vector<std::pair<int, double>> soa_trace;
};

/// Mean over captors of the summed per-step displacement.
inline double path_length(const TrajectoryLog& log) {
  const std::size_t n = log.initial.n_captors;
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    Vec2 prev = log.initial.robots[i].position;
    for (const StepRecord& s : log.steps) {
      const Vec2 cur = s.snapshot.robots[i].position;
      sum += distance(prev, cur);
      prev = cur;
    }
    total += sum;
  }
  return total / static_cast<double>(n);
}

namespace detail {

// Sorting first makes the sum independent of input order.
inline double sorted_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace detail

/// Time averages successful episodes only; SR and path length count every
/// episode.
inline MetricsReport compute_metrics(std::span<const TrajectoryLog> logs) {
  if (logs.empty()) throw EmptyInput("no logs to aggregate");
  MetricsReport m;
  m.episodes = static_cast<int>(logs.size());
  std::vector<double> times;
  std::vector<double> paths;
  for (const TrajectoryLog& log : logs) {
    if (log.outcome.success) {
      ++m.successes;
      times.push_back(static_cast<double>(log.outcome.steps_used));
    }
    paths.push_back(path_length(log));
  }
  if (!times.empty()) m.time_steps = detail::sorted_mean(std::move(times));
  m.sr = 100.0 * m.successes / m.episodes;
  m.path_len = detail::sorted_mean(std::move(paths));
  return m;
}

/// ASZ area at every `every`-th recorded step (0-based step index 0, k, 2k,
/// ...) plus the last step.
inline std::vector<std::pair<int, double>> soa_series(
    const TrajectoryLog& log, const OccupancyGrid& grid,
    std::span<const RobotSpec> specs, int every = 1,
    const AszOptions& options = {}) {
  std::vector<std::pair<int, double>> out;
  if (every < 1) every = 1;
  for (std::size_t j = 0; j < log.steps.size(); ++j) {
    if (j % static_cast<std::size_t>(every) != 0 && j + 1 != log.steps.size()) {
      continue;
    }
    const StepRecord& s = log.steps[j];
    out.emplace_back(s.t, snapshot_asz(grid, s.snapshot, specs,
                                       log.config.reward.f_thre, options)
                              .area);
  }
  return out;
}

struct MetricsRow {
  std::string label;
  MetricsReport report;
};

/// Aligned text table with the Time / SR / Path Len column set.
inline std::string format_metrics_table(std::span<const MetricsRow> rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-24s %12s %8s %14s %9s\n", "Setting",
                "Time (step)", "SR (%)", "Path Len (m)", "Episodes");
  out += buf;
  for (const MetricsRow& r : rows) {
    char time_buf[32];
    if (r.report.time_steps) {
      std::snprintf(time_buf, sizeof(time_buf), "%.2f", *r.report.time_steps);
    } else {
      std::snprintf(time_buf, sizeof(time_buf), "-");
    }
    std::snprintf(buf, sizeof(buf), "%-24s %12s %8.1f %14.3f %9d\n",
                  r.label.c_str(), time_buf, r.report.sr, r.report.path_len,
                  r.report.episodes);
    out += buf;
  }
  return out;
}

}  // namespace t2e

#endif  // T2E_METRICS_HPP_
