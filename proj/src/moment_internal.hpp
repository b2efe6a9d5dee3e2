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

#ifndef MACS_SRC_MOMENT_INTERNAL_HPP_
#define MACS_SRC_MOMENT_INTERNAL_HPP_

#include <cstddef>
#include <functional>
#include <utility>

#include "macs/games.hpp"

namespace macs {

// Scalar (m == 1) path on raw arrays; avoids building a MomentProblem in the
// adversary's inner loop.
MomentSolution solve_scalar_pieces(const double* a, const double* b,
                                   const double* c, std::size_t J,
                                   double rel_tol);

// Golden-section maximization of f on [lo, hi]. Returns (argmax, max) over
// the evaluated points, endpoints included.
std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                     double lo, double hi, double tol);

}  // namespace macs

#endif  // MACS_SRC_MOMENT_INTERNAL_HPP_
