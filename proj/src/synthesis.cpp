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

#include "macs/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "macs/errors.hpp"
#include "macs/parallel.hpp"

namespace macs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MatrixXd q_block(const Hypothesis& h, const MatrixXd& B, double g) {
  const Index n = h.n();
  const Index m = h.m();
  MatrixXd AB(n, n + m);
  AB << h.A, B;
  return symmetrize(h.M + AB.transpose() * AB / (1.0 - 1.0 / (g * g)));
}

// Pseudo-inverse of a symmetric matrix; eigenvalues within tol of zero are
// dropped.
MatrixXd pinv_sym(const MatrixXd& A, double tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
  const VectorXd& ev = es.eigenvalues();
  VectorXd inv = VectorXd::Zero(ev.size());
  for (Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) > tol) inv(i) = 1.0 / ev(i);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

void SampleConfig::validate() const {
  if (max_outer_products < 0) throw ConfigError("max_outer_products must be >= 0");
  if (!(x_scale >= 0.0) || !(u_scale >= 0.0) || !(z_scale >= 0.0)) {
    throw ConfigError("sample scales must be >= 0");
  }
}

std::vector<ConePoint> draw_samples(Index n, Index m, const SampleConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> count(0, cfg.max_outer_products);
  std::vector<ConePoint> out;
  out.reserve(cfg.samples);
  const Index d = 2 * n + m;
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    const int k = count(rng);
    MatrixXd Z = MatrixXd::Zero(d, d);
    for (int i = 0; i < k; ++i) {
      VectorXd v(d);
      for (Index j = 0; j < d; ++j) v(j) = cfg.z_scale * normal(rng);
      Z.noalias() += v * v.transpose();
    }
    VectorXd x(n);
    VectorXd u(m);
    for (Index j = 0; j < n; ++j) x(j) = cfg.x_scale * normal(rng);
    for (Index j = 0; j < m; ++j) u(j) = cfg.u_scale * normal(rng);
    out.push_back({DataMoment::unchecked(n, m, symmetrize(Z)), x, u});
  }
  return out;
}

ValueCone build_example_cone(const std::vector<Hypothesis>& models,
                             const ModelClassSpec& spec) {
  if (models.empty()) throw ConfigError("build_example_cone needs at least one model");
  const double g = spec.gamma_alpha;
  const Index n = models.front().n();
  const Index m = models.front().m();
  std::vector<ValueVertex> main;
  std::vector<ValueVertex> witnesses;
  std::vector<MatrixXd> scenario_S;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const Hypothesis& h = models[i];
    if (h.n() != n || h.m() != m) {
      throw ShapeError("model " + std::to_string(i) + " has inconsistent dimensions");
    }
    const MembershipReport r = membership_check(h, spec);
    if (!r.member) {
      throw DomainError("model " + std::to_string(i) +
                        " is outside the model class: " + r.failing);
    }
    Hypothesis neg = h;
    neg.B = -h.B;
    const MatrixXd s_plus = build_S(h, g).S;
    const MatrixXd s_minus = build_S(neg, g).S;
    const MatrixXd s_zero = 0.5 * (s_plus + s_minus);

    MatrixXd q_zero = h.M;
    q_zero.topLeftCorner(n, n) +=
        ((g * g + 1.0) / (1.0 - 1.0 / (g * g))) * (h.A.transpose() * h.A);
    q_zero.bottomRightCorner(m, m) -= g * g * (h.B.transpose() * h.B);

    main.push_back({s_plus, q_block(h, h.B, g)});
    main.push_back({s_minus, q_block(h, -h.B, g)});
    main.push_back({s_zero, symmetrize(q_zero)});
    const MatrixXd zero = MatrixXd::Zero(n + m, n + m);
    witnesses.push_back({s_plus, zero});
    witnesses.push_back({s_minus, zero});
    witnesses.push_back({s_zero, zero});
    scenario_S.push_back(s_plus);
    scenario_S.push_back(s_minus);
  }
  main.insert(main.end(), witnesses.begin(), witnesses.end());
  return ValueCone(n, m, std::move(main), std::move(scenario_S));
}

ValueCone scenario_cone(const ScenarioSet& scenarios) {
  std::vector<ValueVertex> vs;
  std::vector<MatrixXd> ss;
  const Index n = scenarios.n();
  const Index m = scenarios.m();
  for (const SMatrix& s : scenarios.s_matrices()) {
    vs.push_back({s.S, MatrixXd::Zero(n + m, n + m)});
    ss.push_back(s.S);
  }
  return ValueCone(n, m, std::move(vs), std::move(ss));
}

BellmanReport certify_points(const ValueCone& cone,
                             const std::vector<ConePoint>& points, double tol,
                             const SearchConfig& search) {
  if (!(tol > 0.0)) throw ConfigError("certification tolerance must be positive");
  search.validate();
  BellmanReport report;
  report.tol = tol;
  report.search = search;
  report.containment_ok = cone.contains_scenarios();
  report.samples_checked = points.size();
  if (points.empty()) {
    report.vacuous = true;
    report.certified = report.containment_ok;
    return report;
  }
  std::vector<ResidualDetail> details(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    details[i] = bellman_residual_detail(cone, points[i].Z, points[i].x,
                                         points[i].u, search);
  });
  report.residuals.reserve(points.size());
  report.max_residual = -kInf;
  report.min_residual = kInf;
  std::size_t worst = 0;
  std::size_t equal = 0;
  for (std::size_t i = 0; i < details.size(); ++i) {
    const double r = details[i].residual;
    report.residuals.push_back(r);
    if (r > report.max_residual) {
      report.max_residual = r;
      worst = i;
    }
    report.min_residual = std::min(report.min_residual, r);
    if (std::abs(r) <= tol) ++equal;
    report.boundary_hit = report.boundary_hit || details[i].response.on_boundary;
  }
  report.equality_fraction =
      static_cast<double>(equal) / static_cast<double>(points.size());
  report.worst_point = {points[worst].Z, points[worst].x, points[worst].u,
                        details[worst].response.zeta};
  report.certified = report.containment_ok && report.max_residual <= tol;
  return report;
}

BellmanReport certify(const ValueCone& cone, const SampleConfig& sampler,
                      double tol, const SearchConfig& search) {
  return certify_points(cone, draw_samples(cone.n(), cone.m(), sampler), tol,
                        search);
}

ValueVertex frozen_vertex(const ValueCone& cone, const VectorXd& lambda) {
  const std::vector<ValueVertex>& vs = cone.vertices();
  if (lambda.size() != static_cast<Index>(vs.size())) {
    throw ShapeError("frozen_vertex: one weight per vertex is required");
  }
  const Index n = cone.n();
  const Index m = cone.m();
  const Index np = n + m;
  MatrixXd S = MatrixXd::Zero(2 * n + m, 2 * n + m);
  MatrixXd Q = MatrixXd::Zero(np, np);
  for (std::size_t j = 0; j < vs.size(); ++j) {
    if (lambda(j) < 0.0) throw DomainError("frozen_vertex: negative weight");
    S += lambda(j) * vs[j].S;
    Q += lambda(j) * vs[j].Q;
  }
  const double scale = 1.0 + std::max(S.cwiseAbs().maxCoeff(), Q.cwiseAbs().maxCoeff());
  // Multipliers come from finite differences, so near-singular blocks are
  // resolved at a tolerance well above round-off.
  const double tol = 1e-5 * scale;

  // Continuation weight on the next state after the decision is minimized.
  const MatrixXd Quu = Q.bottomRightCorner(m, m);
  if (min_eigenvalue(Quu) < -tol) {
    throw UnboundedError("frozen decision weight is indefinite",
                         min_eigenvector(Quu), MatrixXd::Identity(m, m));
  }
  const MatrixXd Qxu = Q.topRightCorner(n, m);
  const MatrixXd cont = Q.topLeftCorner(n, n) - Qxu * pinv_sym(Quu, tol) * Qxu.transpose();

  // Maximize over the next state.
  const MatrixXd Szz = S.bottomRightCorner(n, n) + cont;
  if (max_eigenvalue(Szz) > tol) {
    throw UnboundedError("frozen adversary problem is unbounded",
                         VectorXd::Zero(m), MatrixXd::Zero(m, m));
  }
  const MatrixXd Spz = S.topRightCorner(np, n);
  const MatrixXd Qnew = S.topLeftCorner(np, np) - Spz * pinv_sym(Szz, tol) * Spz.transpose();
  return ValueVertex{symmetrize(S), symmetrize(Qnew)};
}

ValueVertex extract_vertex(const ValueCone& cone, const ConePoint& point,
                           const SearchConfig& search, double multiplier_step) {
  const AdversaryResponse best =
      adversary_best_response(cone, point.Z, point.x, point.u, search);
  if (!std::isfinite(best.value)) {
    throw UnboundedError("one-step operator is unbounded at the violation point",
                         VectorXd::Zero(cone.m()), MatrixXd::Identity(cone.m(), cone.m()));
  }
  const OneStepOperator op(cone, point.Z, point.x, point.u);
  const VectorXd lambda = inner_multipliers(op.problem(best.zeta), {}, multiplier_step);
  return frozen_vertex(cone, lambda);
}

ExpansionResult expand_cone(const ScenarioSet& scenarios,
                            const SampleConfig& sampler, double tol,
                            std::size_t max_vertices,
                            const ExpansionOptions& options) {
  if (!(tol > 0.0)) throw ConfigError("expansion tolerance must be positive");
  const Index n = scenarios.n();
  const Index m = scenarios.m();
  const std::vector<ConePoint> points = draw_samples(n, m, sampler);
  ValueCone cone = scenario_cone(scenarios);
  ExpansionTrace trace;

  auto residuals = [&](const ValueCone& c, const SearchConfig& search) {
    std::vector<ResidualDetail> out(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
      out[i] = bellman_residual_detail(c, points[i].Z, points[i].x, points[i].u,
                                       search);
    });
    return out;
  };
  auto diverged = [&](const std::string& why) {
    trace.converged = false;
    return ExpansionDiverged(why, trace);
  };

  for (;;) {
    std::vector<ResidualDetail> res = residuals(cone, options.search);
    ++trace.certification_passes;
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return res[a].residual > res[b].residual;
    });
    if (points.empty() || !(res[order.front()].residual > tol)) {
      BellmanReport final_report =
          certify_points(cone, points, tol, options.certify_search);
      ++trace.certification_passes;
      trace.final_report = final_report;
      if (final_report.certified) {
        trace.converged = true;
        return ExpansionResult{cone, trace};
      }
      res = residuals(cone, options.certify_search);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return res[a].residual > res[b].residual;
      });
    }
    for (std::size_t b = 0; b < options.batch && b < order.size(); ++b) {
      const std::size_t i = order[b];
      if (!(res[i].residual > tol)) break;
      if (!std::isfinite(res[i].residual)) {
        throw diverged("Bellman residual is not finite: the decision program is unbounded");
      }
      if (cone.size() >= max_vertices) {
        throw diverged("vertex budget of " + std::to_string(max_vertices) +
                       " exhausted with Bellman residual " +
                       std::to_string(res[order.front()].residual) + " > tol");
      }
      ValueVertex v;
      try {
        v = extract_vertex(cone, points[i], options.search, options.multiplier_step);
      } catch (const UnboundedError& e) {
        throw diverged(std::string("vertex extraction failed: ") + e.what());
      }
      ExpansionStep step;
      step.point = points[i];
      step.zeta = res[i].response.zeta;
      step.added = v;
      step.residual_before = res[i].residual;
      cone = cone.with_vertex(std::move(v));
      step.residual_after =
          bellman_residual(cone, points[i].Z, points[i].x, points[i].u, options.search);
      if (options.on_step) options.on_step(step, cone.size());
      trace.iterations.push_back(std::move(step));
    }
  }
}

}  // namespace macs
