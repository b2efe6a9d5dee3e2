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

#include "macs/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "macs/errors.hpp"

namespace macs {

// The payoff is shifted so every entry is >= 1. Then the minimizer's program
//   max 1^T y  s.t.  P^T y <= 1, y >= 0
// has the slack basis as a feasible start; its optimum is 1/value, y scaled
// by the value is the row strategy and the maximizer's strategy is read off
// the final reduced costs of the slacks.
MatrixGameSolution solve_matrix_game(const MatrixXd& payoff) {
  if (payoff.rows() == 0 || payoff.cols() == 0) {
    throw ShapeError("matrix game needs a non-empty payoff");
  }
  if (!payoff.allFinite()) throw DomainError("matrix game payoff must be finite");

  // LP variables are the rows of the payoff, constraints its columns.
  const Index cols = payoff.rows();
  const Index rows = payoff.cols();
  const double shift = 1.0 - payoff.minCoeff();
  const Index vars = cols + rows;
  // Tableau: rows x (vars + 1); last column is the right-hand side.
  MatrixXd T = MatrixXd::Zero(rows, vars + 1);
  T.leftCols(cols) = payoff.transpose().array() + shift;
  T.block(0, cols, rows, rows).setIdentity();
  T.col(vars).setOnes();
  // Reduced costs of the objective 1^T y.
  VectorXd r = VectorXd::Zero(vars + 1);
  r.head(cols).setOnes();
  std::vector<Index> basis(rows);
  for (Index i = 0; i < rows; ++i) basis[i] = cols + i;

  const double eps = 1e-12 * std::max(1.0, T.leftCols(cols).cwiseAbs().maxCoeff());
  const int max_pivots = 50 * static_cast<int>(rows + cols) + 1000;
  for (int it = 0;; ++it) {
    if (it > max_pivots) throw DomainError("matrix game simplex did not terminate");
    Index enter = -1;
    for (Index j = 0; j < vars; ++j) {
      if (r(j) > eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < rows; ++i) {
      if (T(i, enter) > eps) {
        const double ratio = T(i, vars) / T(i, enter);
        if (leave < 0 || ratio < best - eps ||
            (ratio <= best + eps && basis[i] < basis[leave])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
    }
    // Cannot happen with positive entries; keeps the loop safe anyway.
    if (leave < 0) throw DomainError("matrix game simplex is unbounded");
    T.row(leave) /= T(leave, enter);
    for (Index i = 0; i < rows; ++i) {
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    r -= r(enter) * T.row(leave).transpose();
    basis[leave] = enter;
  }

  VectorXd y = VectorXd::Zero(cols);
  for (Index i = 0; i < rows; ++i) {
    if (basis[i] < cols) y(basis[i]) = T(i, vars);
  }
  const double total = y.sum();
  VectorXd p = (-r.segment(cols, rows)).cwiseMax(0.0);
  MatrixGameSolution out;
  out.value = 1.0 / total - shift;
  out.row_strategy = y / total;
  out.col_strategy = p / p.sum();
  return out;
}

}  // namespace macs
