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

#ifndef T2E_T2E_HPP_
#define T2E_T2E_HPP_

#include "t2e/agents.hpp"
#include "t2e/bridge.hpp"
#include "t2e/dynamics.hpp"
#include "t2e/eikonal.hpp"
#include "t2e/engine.hpp"
#include "t2e/errors.hpp"
#include "t2e/gridmap.hpp"
#include "t2e/mapgen.hpp"
#include "t2e/metrics.hpp"
#include "t2e/perception.hpp"
#include "t2e/rewards.hpp"
#include "t2e/rng.hpp"
#include "t2e/snapshot.hpp"
#include "t2e/trajectory_io.hpp"
#include "t2e/vec2.hpp"

#endif  // T2E_T2E_HPP_
