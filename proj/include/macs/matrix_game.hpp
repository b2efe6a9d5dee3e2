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

// Exact solution of finite two-player zero-sum games by the simplex method.

#ifndef MACS_MATRIX_GAME_HPP_
#define MACS_MATRIX_GAME_HPP_

#include "macs/linalg.hpp"

namespace macs {

struct MatrixGameSolution {
  double value = 0.0;
  VectorXd row_strategy;  // minimizer, over rows
  VectorXd col_strategy;  // maximizer, over columns
};

// min over mixed rows p of max over columns j of (p^T P)_j. Both strategies
// are optimal; ties resolve by Bland's rule so results are deterministic.
MatrixGameSolution solve_matrix_game(const MatrixXd& payoff);

}  // namespace macs

#endif  // MACS_MATRIX_GAME_HPP_
