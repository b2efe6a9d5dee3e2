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

// One-step game machinery on a value cone.
//
// The minimizer picks a randomized decision nu. Because every vertex value is
// quadratic in nu, the expected value depends on the law of nu only through
// its mean mu and second moment W, so the inner problem is
//
//   min_{W >= mu mu^T} max_j  a_j + b_j^T mu + <C_j, W>,
//
// a convex program (pointwise max of affine functions over a convex set).
// The adversary then maximizes the optimal value over the next state zeta.

#ifndef MACS_GAMES_HPP_
#define MACS_GAMES_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "macs/linalg.hpp"
#include "macs/valuefn.hpp"

namespace macs {

using Rng = std::mt19937_64;

// A randomized decision described by its first two moments.
struct PolicyMoments {
  VectorXd mu;  // m
  MatrixXd W;   // m x m, W >= mu mu^T
};

// Affine pieces of g(mu, W) = max_j a_j + b_j^T mu + <C_j, W>.
struct MomentProblem {
  VectorXd a;               // J
  MatrixXd b;               // J x m
  std::vector<MatrixXd> C;  // J matrices, m x m, symmetric

  Index pieces() const { return a.size(); }
  Index m() const { return b.cols(); }
};

// g(mu, W) evaluated directly.
double moment_objective(const MomentProblem& p, const VectorXd& mu,
                        const MatrixXd& W);

enum class MomentMethod { kScalar, kInteriorPoint };

struct MomentSolverOptions {
  // Use the barrier method even when m == 1.
  bool force_interior_point = false;
  // Relative accuracy of the scalar path (golden section on mu).
  double scalar_tol = 1e-12;
  // Duality-gap target of the barrier path, relative to 1 + |value|.
  double barrier_gap = 1e-9;
};

struct MomentSolution {
  bool bounded = true;
  PolicyMoments moments;
  double value = 0.0;
  MomentMethod method = MomentMethod::kScalar;
  // Recession direction when unbounded.
  VectorXd mu_direction;
  MatrixXd w_direction;
};

// Never throws on unboundedness; inspect `bounded`.
MomentSolution solve_moment_problem(const MomentProblem& p,
                                    const MomentSolverOptions& options = {});

// Optimal dual weights lambda (on the simplex) of the pieces: the derivative
// of the optimal value in each a_j, by central differences of relative size
// rel_step. Throws UnboundedError when the program is unbounded.
VectorXd inner_multipliers(const MomentProblem& p,
                           const MomentSolverOptions& options = {},
                           double rel_step = 1e-6);

// Pieces for the decision at state x with data Z:
//   a_j = <S_j, Z> + x^T Q_xx x,  b_j = 2 Q_ux x,  C_j = Q_uu.
MomentProblem policy_problem(const ValueCone& cone, const DataMoment& Z,
                             const VectorXd& x);

struct PolicyResult {
  PolicyMoments moments;
  double value = 0.0;
  MomentMethod method = MomentMethod::kScalar;
};

// Optimal randomized decision. Throws UnboundedError naming the recession
// direction when the program is unbounded below.
PolicyResult policy_moments(const ValueCone& cone, const DataMoment& Z,
                            const VectorXd& x,
                            const MomentSolverOptions& options = {});

// Finite law realizing (mu, W) exactly: Sigma = W - mu mu^T is
// eigen-decomposed as sum_k d_k d_k^T over its r positive directions, and the
// atoms are mu +/- sqrt(r) d_k, each with probability 1/(2r). For r == 0 the
// law is the point mass at mu.
struct DecisionAtom {
  double probability;
  VectorXd u;
};
std::vector<DecisionAtom> decision_support(const PolicyMoments& p,
                                           double tol = 1e-9);

// Draws one decision from decision_support(p). Throws RealizabilityError if
// W - mu mu^T is indefinite beyond tol.
VectorXd realize_decision(const PolicyMoments& p, Rng& rng, double tol = 1e-9);

// Adversary grid search configuration. The default box is
// [-box_scale (1 + |x| + |u|), +box_scale (1 + |x| + |u|)] per coordinate,
// doubled while the maximizer sits on its edge.
struct SearchConfig {
  double box_scale = 4.0;
  double step = 1e-2;
  int restarts = 5;
  double refine_tol = 1e-10;
  int max_box_expansions = 3;
  std::size_t max_grid_points = 4'000'000;
  // Explicit box: center +/- half_width. Disables automatic expansion.
  std::optional<VectorXd> center;
  std::optional<double> half_width;

  // Throws ConfigError for non-positive step, negative width, etc.
  void validate() const;
};

// Precomputed one-step operator at a fixed (Z, x, u). For each next state
// zeta it builds the moment problem of the continuation
//   a_j(zeta) = <S_j, Z + v v^T> + zeta^T Q_xx zeta,  v = (x, u, zeta)
//   b_j(zeta) = 2 Q_ux zeta,  C_j = Q_uu.
class OneStepOperator {
 public:
  OneStepOperator(const ValueCone& cone, const DataMoment& Z,
                  const VectorXd& x, const VectorXd& u,
                  MomentSolverOptions options = {});

  MomentProblem problem(const VectorXd& zeta) const;

  // Optimal continuation value for the adversary choice zeta; -inf when the
  // minimizer's program is unbounded.
  double value(const VectorXd& zeta) const;
  double value_scalar(double zeta) const;

  Index n() const { return n_; }

 private:
  Index n_;
  Index m_;
  MomentSolverOptions options_;
  // Scalar fast path (n == m == 1).
  std::vector<double> a0_, a1_, a2_, b1_, c_;
  // General layout.
  std::vector<double> base_;
  std::vector<VectorXd> lin_;
  std::vector<MatrixXd> quad_;
  std::vector<MatrixXd> bq_;
  std::vector<MatrixXd> C_;
};

struct AdversaryResponse {
  VectorXd zeta;
  double value = 0.0;
  bool on_boundary = false;  // maximizer on the final box edge
  double half_width = 0.0;   // final box half width
};

// Approximate max over zeta of OneStepOperator::value: full grid, then
// golden-section / coordinate refinement from the best `restarts` grid
// maxima. The returned value is never below the grid maximum.
AdversaryResponse adversary_best_response(const ValueCone& cone,
                                          const DataMoment& Z,
                                          const VectorXd& x, const VectorXd& u,
                                          const SearchConfig& search = {});

struct ResidualDetail {
  double lhs = 0.0;       // evaluate(cone, Z, x, u)
  double rhs = 0.0;       // max_zeta min_nu max_q E(...)
  double residual = 0.0;  // rhs - lhs
  AdversaryResponse response;
};

ResidualDetail bellman_residual_detail(const ValueCone& cone,
                                       const DataMoment& Z, const VectorXd& x,
                                       const VectorXd& u,
                                       const SearchConfig& search = {});

// RHS minus LHS of the Bellman identity at (Z, x, u). <= 0 certifies the
// one-step descent inequality at this point.
double bellman_residual(const ValueCone& cone, const DataMoment& Z,
                        const VectorXd& x, const VectorXd& u,
                        const SearchConfig& search = {});

struct WorstPoint {
  DataMoment Z;
  VectorXd x;
  VectorXd u;
  VectorXd zeta;
};

struct BellmanReport {
  double max_residual = 0.0;
  double min_residual = 0.0;
  WorstPoint worst_point;
  std::size_t samples_checked = 0;
  std::vector<double> residuals;
  // Fraction of samples with |residual| <= tol (equality gap).
  double equality_fraction = 0.0;
  bool containment_ok = false;
  bool boundary_hit = false;
  bool vacuous = false;  // zero samples
  bool certified = false;
  double tol = 0.0;
  SearchConfig search;
};

}  // namespace macs

#endif  // MACS_GAMES_HPP_
