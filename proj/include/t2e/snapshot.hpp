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

#ifndef T2E_SNAPSHOT_HPP_
#define T2E_SNAPSHOT_HPP_

#include <cstddef>
#include <vector>

#include "t2e/dynamics.hpp"

namespace t2e {

/// Poses of every robot at one instant. Robots [0, n_captors) are captors;
/// the single target follows them.
struct Snapshot {
  std::vector<RobotState> robots;
  std::size_t n_captors = 0;

  std::size_t target_index() const { return n_captors; }
  const RobotState& target() const { return robots[n_captors]; }
  Team team_of(std::size_t i) const {
    return i < n_captors ? Team::Captor : Team::Target;
  }
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

}  // namespace t2e

#endif  // T2E_SNAPSHOT_HPP_
