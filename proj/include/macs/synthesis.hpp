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

// Building value cones: the closed-form cone for the spectral model class,
// sampled certification of the Bellman inequality, and cone expansion by
// repeatedly adding the one-step operator's value at a violating point.

#ifndef MACS_SYNTHESIS_HPP_
#define MACS_SYNTHESIS_HPP_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "macs/games.hpp"
#include "macs/model.hpp"
#include "macs/valuefn.hpp"

namespace macs {

// Random certification points: Z is a sum of k rank-one outer products of
// N(0, z_scale^2) vectors with k uniform in {0..max_outer_products}; x and u
// are N(0, x_scale^2) and N(0, u_scale^2).
struct SampleConfig {
  std::size_t samples = 1000;
  std::uint64_t seed = 7;
  int max_outer_products = 3;
  double x_scale = 1.0;
  double u_scale = 1.0;
  double z_scale = 1.0;

  void validate() const;
};

std::vector<ConePoint> draw_samples(Index n, Index m, const SampleConfig& cfg);

// For each model i emits (S_+i, Q_+i), (S_-i, Q_-i), (S_0i, Q_0i) and the
// zero-Q witnesses (S_+i, 0), (S_-i, 0), (S_0i, 0), where S_-i and Q_-i use
// -B_i. Throws DomainError naming the model and failing condition when a
// model is outside the class.
ValueCone build_example_cone(const std::vector<Hypothesis>& models,
                             const ModelClassSpec& spec);

// Bellman residual at every sample. Certified iff max residual <= tol and
// every scenario S-matrix has a witness vertex. Zero samples certify
// vacuously (report.vacuous is set).
BellmanReport certify(const ValueCone& cone, const SampleConfig& sampler,
                      double tol, const SearchConfig& search = {});

// Same, on explicit points.
BellmanReport certify_points(const ValueCone& cone,
                             const std::vector<ConePoint>& points, double tol,
                             const SearchConfig& search = {});

struct ExpansionStep {
  ConePoint point;
  VectorXd zeta;
  ValueVertex added;
  double residual_before = 0.0;
  double residual_after = 0.0;
};

struct ExpansionTrace {
  std::vector<ExpansionStep> iterations;
  bool converged = false;
  std::size_t certification_passes = 0;
  BellmanReport final_report;
};

class ExpansionDiverged : public std::runtime_error {
 public:
  ExpansionDiverged(const std::string& what, ExpansionTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const ExpansionTrace& trace() const { return trace_; }

 private:
  ExpansionTrace trace_;
};

struct ExpansionOptions {
  // Adversary search used while looking for violations. The final
  // certification pass always uses `certify_search`.
  SearchConfig search;
  SearchConfig certify_search;
  // Relative central-difference step for the inner multipliers.
  double multiplier_step = 1e-6;
  // Vertices added per certification pass (largest residuals first).
  std::size_t batch = 1;
  // Called after every added vertex with the current vertex count.
  std::function<void(const ExpansionStep&, std::size_t)> on_step;
};

struct ExpansionResult {
  ValueCone cone;
  ExpansionTrace trace;
};

// Starts from {(S_i, 0)} and adds vertices until a certification pass over
// the sampler succeeds at tol. Throws ExpansionDiverged when max_vertices is
// reached first or the decision program becomes unbounded.
ExpansionResult expand_cone(const ScenarioSet& scenarios,
                            const SampleConfig& sampler, double tol,
                            std::size_t max_vertices,
                            const ExpansionOptions& options = {});

// Freezing the minimizer's dual weights lambda over the vertices turns the
// one-step operator into a single quadratic form:
//   S = sum_j lambda_j S_j,  Q = sum_j lambda_j Q_j,
//   C = Q_xx - Q_xu Q_uu^+ Q_ux        (decision minimized out)
//   Q_new = S_pp - S_pz (S_zz + C)^+ S_zp   (next state maximized out)
// with p = (x, u) and z the next state. For any lambda on the simplex this
// lower-bounds the operator everywhere; with the optimal lambda at a point it
// is tight there. Throws UnboundedError when either step is unbounded.
ValueVertex frozen_vertex(const ValueCone& cone, const VectorXd& lambda);

// frozen_vertex at the adversary's best response for (Z, x, u), with the
// multipliers from inner_multipliers.
ValueVertex extract_vertex(const ValueCone& cone, const ConePoint& point,
                           const SearchConfig& search,
                           double multiplier_step = 1e-6);

// The starting cone {(S_i, 0)}.
ValueCone scenario_cone(const ScenarioSet& scenarios);

}  // namespace macs

#endif  // MACS_SYNTHESIS_HPP_
