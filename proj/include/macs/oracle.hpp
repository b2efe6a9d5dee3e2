// Copyright 2026 The macs Authors.
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

// Ground truth for scalar instances: the finite-horizon minimax game solved by
// backward induction on a discretized information state.
//
// The information state is (x, c) with c_i the accumulated stage payoff under
// hypothesis i; the terminal value is max_i c_i. Because the value satisfies
// V(x, c + s 1) = V(x, c) + s, only the differences d_k = c_k - c_0 need a
// grid. The adversary acts by naming a hypothesis i and a disturbance atom w,
// giving the next state A_i x + B_i u + w.

#ifndef MACS_ORACLE_HPP_
#define MACS_ORACLE_HPP_

#include <vector>

#include "macs/model.hpp"
#include "macs/valuefn.hpp"

namespace macs {

// Whether the adversary picks the next state after seeing the realized
// decision of the current stage (as in the one-step operator, where the
// current decision is given) or only its mixed strategy.
enum class DrawVisibility { kVisible, kHidden };

struct OracleGrids {
  int u_atoms = 21;  // decision atoms on [-u_clip, u_clip]
  double u_clip = 2.0;
  int w_atoms = 21;  // disturbance atoms on [-w_clip, w_clip]
  double w_clip = 2.0;
  // State grid for interpolation; states outside saturate.
  double x_clip = 4.0;
  int x_points = 161;
  double d_range = 30.0;  // payoff differences on [-d_range, d_range]
  int d_points = 241;
  // Largest accepted gap between this grid and one with half the state and
  // difference resolution.
  double tol = 0.05;
  DrawVisibility visibility = DrawVisibility::kVisible;

  // Throws ConfigError on atom counts outside [1, 41] or bad ranges.
  void validate() const;
  std::vector<double> u_grid() const;
  std::vector<double> w_grid() const;
};

struct OracleResult {
  double value = 0.0;
  double error_estimate = 0.0;  // |value - coarse value|
  // Minimizer's mixed strategy over u_grid() at the root.
  std::vector<double> root_strategy;
};

// Value of the T-stage game from x_0 = 0, c = 0. With hidden draws every
// stage is a matrix game solved exactly by linear programming; with visible
// draws the adversary best-responds to each decision atom, so the stage
// reduces to min over atoms of max over next states. A value <= 0 means the
// gain bound holds on the grid.
// Throws ConfigError unless n == m == 1 and 0 <= T <= 4, and AccuracyError
// when error_estimate exceeds grids.tol.
OracleResult exact_game_value(const ScenarioSet& scenarios, int T,
                              const OracleGrids& grids = {});

// Worst case over the same adversary actions of the expected terminal
// max_i c_i when the cone controller plays, with the expectation over its
// randomization taken exactly on the finite decision law. Draw visibility
// follows grids.visibility.
double controller_worst_case(const ScenarioSet& scenarios,
                             const ValueCone& cone, int T,
                             const OracleGrids& grids = {});

}  // namespace macs

#endif  // MACS_ORACLE_HPP_
