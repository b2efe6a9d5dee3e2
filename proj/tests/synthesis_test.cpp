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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "macs/errors.hpp"
#include "macs/synthesis.hpp"
#include "oracles.hpp"

namespace macs {
namespace {

const Hypothesis kPlus = Hypothesis::scalar(0.75, 1, 0.5, 0.5);
const Hypothesis kMinus = Hypothesis::scalar(0.75, -1, 0.5, 0.5);

ValueCone i0_cone() { return build_example_cone({kPlus}, ModelClassSpec::from_alpha(0.75)); }

VectorXd s(double v) { return scalar_vector(v); }

TEST_CASE("example cone fixtures") {
  const ValueCone cone = i0_cone();
  REQUIRE(cone.size() == 6);
  MatrixXd q_plus(2, 2);
  q_plus << 1.25, 1, 1, 11.0 / 6.0;
  CHECK(cone.vertices()[0].Q.isApprox(q_plus, 1e-14));
  MatrixXd q_zero = MatrixXd::Zero(2, 2);
  q_zero.diagonal() << 4.25, -3.5;
  CHECK(cone.vertices()[2].Q.isApprox(q_zero, 1e-14));
  MatrixXd s_zero(3, 3);
  s_zero << -1.75, 0, 3, 0, -3.5, 0, 3, 0, -4;
  CHECK(cone.vertices()[2].S.isApprox(s_zero, 1e-14));
  CHECK(cone.vertices()[0].S.isApprox(build_S(kPlus, 2.0).S, 1e-15));
  CHECK(cone.vertices()[1].S.isApprox(build_S(kMinus, 2.0).S, 1e-15));
  for (const ValueVertex& v : cone.vertices()) {
    CHECK(v.S == v.S.transpose());
    CHECK(v.Q == v.Q.transpose());
  }
  CHECK((cone.vertices()[2].S - 0.5 * (cone.vertices()[0].S + cone.vertices()[1].S)).cwiseAbs().maxCoeff() <= 1e-12);
  for (std::size_t i = 3; i < 6; ++i) CHECK(cone.vertices()[i].Q.isZero(0.0));
  CHECK(cone.contains_scenarios());
}

TEST_CASE("example cone rejects models outside the class") {
  try {
    build_example_cone({kPlus, Hypothesis::scalar(0.75, 1, 1, 1)}, ModelClassSpec::from_alpha(0.75));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    const std::string what = e.what();
    CHECK(what.find("model 1") != std::string::npos);
    CHECK(what.find("Schur") != std::string::npos);
  }
  CHECK_THROWS_AS(build_example_cone({Hypothesis::scalar(1.0, 1, 0.5, 0.5)}, ModelClassSpec::from_alpha(0.75)),
                  DomainError);
}

TEST_CASE("certification outcomes") {
  SampleConfig cfg;
  cfg.samples = 150;
  cfg.seed = 7;
  const BellmanReport good = certify(i0_cone(), cfg, 1e-3);
  CHECK(good.certified);
  CHECK(good.samples_checked == 150);
  CHECK(good.max_residual <= 1e-3);
  CHECK(good.min_residual <= good.max_residual);
  for (double r : good.residuals) REQUIRE(r <= 1e-3);

  const ScenarioSet sc({kPlus, kMinus}, 2.0);
  const BellmanReport bad = certify(scenario_cone(sc), cfg, 1e-3);
  CHECK_FALSE(bad.certified);
  CHECK(bad.max_residual > 0.5);
  // The worst point attains the reported maximum.
  CHECK(bellman_residual(scenario_cone(sc), bad.worst_point.Z, bad.worst_point.x, bad.worst_point.u) ==
        doctest::Approx(bad.max_residual).epsilon(1e-6));

  cfg.samples = 0;
  const BellmanReport empty = certify(i0_cone(), cfg, 1e-3);
  CHECK(empty.certified);
  CHECK(empty.vacuous);
  CHECK(empty.samples_checked == 0);
  CHECK_THROWS_AS(certify(i0_cone(), cfg, 0.0), ConfigError);

  // Dropping the witnesses breaks containment even where residuals are fine.
  const ValueCone bare(1, 1, {i0_cone().vertices()[0], i0_cone().vertices()[1], i0_cone().vertices()[2]});
  CHECK_FALSE(certify(bare, cfg, 1e-3).containment_ok);
}

TEST_CASE("frozen vertex equals the frozen right side everywhere") {
  const ValueCone cone = i0_cone();
  SampleConfig cfg;
  cfg.samples = 12;
  cfg.seed = 31;
  const std::vector<ConePoint> pts = draw_samples(1, 1, cfg);
  cfg.seed = 32;
  const std::vector<ConePoint> probes = draw_samples(1, 1, cfg);
  SearchConfig search;
  search.step = 2e-2;
  int checked = 0;
  for (const ConePoint& p : pts) {
    const ResidualDetail d = bellman_residual_detail(cone, p.Z, p.x, p.u, search);
    const OneStepOperator op(cone, p.Z, p.x, p.u);
    const VectorXd lambda = inner_multipliers(op.problem(d.response.zeta));
    ValueVertex v;
    try {
      v = frozen_vertex(cone, lambda);
    } catch (const UnboundedError&) {
      continue;
    }
    ++checked;
    const std::vector<double> lam(lambda.data(), lambda.data() + lambda.size());
    auto vertex_value = [&](const MatrixXd& Z, double x, double u) {
      return oracle_ref::trace_inner(v.S, Z) + oracle_ref::quad(v.Q, {x, u});
    };
    // Tight at the extraction point.
    CHECK(vertex_value(p.Z.Z(), p.x(0), p.u(0)) == doctest::Approx(d.rhs).epsilon(1e-4));
    // Identity with the frozen right side at unrelated points.
    for (const ConePoint& q : probes) {
      const double box = 50.0 * (1.0 + std::abs(q.x(0)) + std::abs(q.u(0)));
      const double want = oracle_ref::frozen_rhs(cone, lam, q.Z.Z(), q.x(0), q.u(0), box);
      REQUIRE(vertex_value(q.Z.Z(), q.x(0), q.u(0)) == doctest::Approx(want).epsilon(1e-6));
      // And a lower bound on the true one-step operator.
      const double rhs = bellman_residual_detail(cone, q.Z, q.x, q.u, search).rhs;
      REQUIRE(vertex_value(q.Z.Z(), q.x(0), q.u(0)) <= rhs + 1e-6 * (1.0 + std::abs(rhs)));
    }
    // Q recovered as half the Hessian of the frozen right side by central
    // differences at Z = 0.
    const MatrixXd Z0 = MatrixXd::Zero(3, 3);
    const double h = 1e-2;
    auto f = [&](double x, double u) { return oracle_ref::frozen_rhs(cone, lam, Z0, x, u, 50.0); };
    const double fxx = (f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / (h * h);
    const double fuu = (f(0, h) - 2 * f(0, 0) + f(0, -h)) / (h * h);
    const double fxu = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
    CHECK(0.5 * fxx == doctest::Approx(v.Q(0, 0)).epsilon(1e-5));
    CHECK(0.5 * fuu == doctest::Approx(v.Q(1, 1)).epsilon(1e-5));
    CHECK(0.5 * fxu == doctest::Approx(v.Q(0, 1)).epsilon(1e-5));
  }
  CHECK(checked >= 6);
}

TEST_CASE("expansion on a single model converges below the explicit value") {
  const ScenarioSet sc({kPlus}, 2.0);
  SampleConfig cfg;
  cfg.samples = 300;
  cfg.seed = 7;
  ExpansionOptions opt;
  opt.search.step = 5e-2;
  const double tol = 1e-3;
  const ExpansionResult r = expand_cone(sc, cfg, tol, 50, opt);
  CHECK(r.trace.converged);
  CHECK(r.cone.size() <= 50);
  CHECK(r.trace.final_report.certified);
  CHECK(r.cone.contains_scenarios());

  // Residual at each violation point drops by at least tol / 2.
  for (const ExpansionStep& st : r.trace.iterations) CHECK(st.residual_after <= st.residual_before - tol / 2);

  // Explicit fixed point <S, Z> + |(x,u)|^2_{Q+} dominates the expanded value.
  const ValueCone explicit_cone = build_example_cone({kPlus}, ModelClassSpec::from_alpha(0.75));
  const ValueVertex& top = explicit_cone.vertices()[0];
  cfg.seed = 99;
  cfg.samples = 600;
  const std::vector<ConePoint> probes = draw_samples(1, 1, cfg);
  for (const ConePoint& p : probes) {
    const double bound = oracle_ref::trace_inner(top.S, p.Z.Z()) + oracle_ref::quad(top.Q, {p.x(0), p.u(0)});
    REQUIRE(evaluate(r.cone, p.Z, p.x, p.u) <= bound + tol * (1.0 + std::abs(bound)));
  }

  // The cone sequence is monotone on the probes.
  ValueCone c = scenario_cone(sc);
  std::vector<double> prev;
  for (const ConePoint& p : probes) prev.push_back(evaluate(c, p.Z, p.x, p.u));
  for (const ExpansionStep& st : r.trace.iterations) {
    c = c.with_vertex(st.added);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const double v = evaluate(c, probes[i].Z, probes[i].x, probes[i].u);
      REQUIRE(v >= prev[i]);
      prev[i] = v;
    }
  }

  // Stable under a fresh seed with twice the samples.
  cfg.seed = 1234;
  cfg.samples = 600;
  CHECK(certify(r.cone, cfg, tol).max_residual <= 2 * tol);
}

TEST_CASE("expansion failures") {
  SampleConfig cfg;
  cfg.samples = 200;
  ExpansionOptions opt;
  opt.search.step = 5e-2;
  CHECK_THROWS_AS(expand_cone(ScenarioSet({kPlus}, 2.0), cfg, 1e-3, 3, opt), ExpansionDiverged);
  try {
    expand_cone(ScenarioSet({kPlus, kMinus}, 1.05), cfg, 1e-3, 50, opt);
    FAIL("expected ExpansionDiverged");
  } catch (const ExpansionDiverged& e) {
    CHECK_FALSE(e.trace().converged);
    CHECK(e.trace().iterations.size() < 50);
  }
  CHECK_THROWS_AS(expand_cone(ScenarioSet({kPlus}, 2.0), cfg, 0.0, 50, opt), ConfigError);
}

}  // namespace
}  // namespace macs
