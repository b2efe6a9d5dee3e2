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

#include "macs/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "macs/errors.hpp"
#include "macs/parallel.hpp"

namespace macs {
namespace {

void check_truth(const ScenarioSet& sc, std::size_t truth) {
  if (truth >= sc.size()) {
    throw ConfigError("truth index " + std::to_string(truth) + " out of range (" +
                      std::to_string(sc.size()) + " hypotheses)");
  }
}

void check_strategy(const ScenarioSet& sc, const DisturbanceStrategy& s) {
  if (!(s.cap >= 0.0)) throw ConfigError("disturbance cap must be >= 0");
  if (!(s.kick >= 0.0)) throw ConfigError("confusion kick must be >= 0");
  if (s.kind == StrategyKind::kModelConfusion && s.decoy >= sc.size()) {
    throw ConfigError("decoy index out of range");
  }
  if (s.kind == StrategyKind::kAdversarialAscent &&
      (s.ascent.passes < 0 || s.ascent.draws < 1 || !(s.ascent.initial_step > 0.0) ||
       !(s.ascent.shrink > 0.0) || s.ascent.shrink >= 1.0)) {
    throw ConfigError("invalid ascent configuration");
  }
}

VectorXd clip_norm(VectorXd w, double cap) {
  const double nrm = w.norm();
  if (nrm > cap) w *= cap / nrm;
  return w;
}

VectorXd uniform_box(Rng& rng, Index n, double cap) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  VectorXd w(n);
  for (Index k = 0; k < n; ++k) w(k) = unit(rng);
  return w * (cap / std::sqrt(static_cast<double>(n)));
}

double weighted(const MatrixXd& M, const VectorXd& x, const VectorXd& u) {
  const VectorXd p = stack(x, u);
  return p.dot(M * p);
}

VectorXd initial_state(const ScenarioSet& sc, const VectorXd& x0) {
  if (x0.size() == 0) return VectorXd::Zero(sc.n());
  if (x0.size() != sc.n()) throw ShapeError("initial state has the wrong dimension");
  return x0;
}

// Appends one step to the trace and returns the next state.
VectorXd record(const ScenarioSet& sc, std::size_t truth, Trace& tr, const VectorXd& x,
                const VectorXd& u, const VectorXd& w) {
  TraceStep st;
  st.x = x;
  st.u = u;
  st.w = w;
  const std::size_t K = sc.size();
  st.stage_cost.resize(K);
  st.cum_cost.resize(K);
  for (std::size_t i = 0; i < K; ++i) {
    st.stage_cost[i] = weighted(sc[i].M, x, u);
    st.cum_cost[i] = st.stage_cost[i] + (tr.steps.empty() ? 0.0 : tr.steps.back().cum_cost[i]);
  }
  st.wnorm = w.squaredNorm();
  st.cum_wnorm = st.wnorm + (tr.steps.empty() ? 0.0 : tr.steps.back().cum_wnorm);
  tr.steps.push_back(std::move(st));
  return sc[truth].A * x + sc[truth].B * u + w;
}

std::uint64_t draw_seed(std::uint64_t base, std::size_t k) {
  return base * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k);
}

}  // namespace

std::string strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kZero:
      return "zero";
    case StrategyKind::kIidSeeded:
      return "iid_seeded";
    case StrategyKind::kModelConfusion:
      return "model_confusion";
    case StrategyKind::kAdversarialAscent:
      return "adversarial_ascent";
  }
  return "unknown";
}

StrategyKind parse_strategy(const std::string& name) {
  for (StrategyKind k : {StrategyKind::kZero, StrategyKind::kIidSeeded,
                         StrategyKind::kModelConfusion, StrategyKind::kAdversarialAscent}) {
    if (strategy_name(k) == name) return k;
  }
  throw ConfigError("unknown disturbance strategy '" + name + "'");
}

Trace rollout_sequence(const ScenarioSet& scenarios, std::size_t truth,
                       const std::vector<VectorXd>& w, DecisionRule& rule,
                       std::uint64_t seed, const VectorXd& x0) {
  check_truth(scenarios, truth);
  rule.reset(seed);
  Trace tr;
  tr.seed = seed;
  tr.truth = truth;
  tr.strategy = "sequence";
  VectorXd x = initial_state(scenarios, x0);
  for (const VectorXd& wt : w) {
    if (wt.size() != scenarios.n()) throw ShapeError("disturbance has the wrong dimension");
    const VectorXd u = rule.decide(x);
    x = record(scenarios, truth, tr, x, u, wt);
    rule.observe(x);
  }
  tr.x_final = x;
  return tr;
}

Trace rollout(const ScenarioSet& scenarios, std::size_t truth,
              const DisturbanceStrategy& strategy, DecisionRule& rule, int T,
              std::uint64_t seed, const VectorXd& x0) {
  check_truth(scenarios, truth);
  check_strategy(scenarios, strategy);
  if (T < 0) throw ConfigError("horizon must be >= 0");
  if (strategy.kind == StrategyKind::kAdversarialAscent) {
    const std::vector<VectorXd> w = ascent_sequence(scenarios, truth, strategy, rule, T);
    Trace tr = rollout_sequence(scenarios, truth, w, rule, seed, x0);
    tr.strategy = strategy_name(strategy.kind);
    return tr;
  }
  const Index n = scenarios.n();
  const Hypothesis& star = scenarios[truth];
  const Hypothesis& decoy = scenarios[std::min(strategy.decoy, scenarios.size() - 1)];
  Rng drng(strategy.seed);
  rule.reset(seed);
  Trace tr;
  tr.seed = seed;
  tr.truth = truth;
  tr.strategy = strategy_name(strategy.kind);
  VectorXd x = initial_state(scenarios, x0);
  for (int t = 0; t < T; ++t) {
    const VectorXd u = rule.decide(x);
    VectorXd w = VectorXd::Zero(n);
    switch (strategy.kind) {
      case StrategyKind::kZero:
        break;
      case StrategyKind::kIidSeeded:
        w = uniform_box(drng, n, strategy.cap);
        break;
      case StrategyKind::kModelConfusion:
        w = (decoy.A - star.A) * x + (decoy.B - star.B) * u +
            uniform_box(drng, n, strategy.kick);
        w = clip_norm(std::move(w), strategy.cap);
        break;
      case StrategyKind::kAdversarialAscent:
        break;
    }
    x = record(scenarios, truth, tr, x, u, w);
    rule.observe(x);
  }
  tr.x_final = x;
  return tr;
}

std::vector<VectorXd> ascent_sequence(const ScenarioSet& scenarios, std::size_t truth,
                                      const DisturbanceStrategy& strategy,
                                      const DecisionRule& rule, int T) {
  check_truth(scenarios, truth);
  check_strategy(scenarios, strategy);
  if (T < 0) throw ConfigError("horizon must be >= 0");
  const Index n = scenarios.n();
  const Hypothesis& star = scenarios[truth];
  const double g2 = scenarios.gamma() * scenarios.gamma();
  const std::size_t draws = static_cast<std::size_t>(strategy.ascent.draws);
  Rng drng(strategy.seed);
  std::vector<VectorXd> w(T);
  for (int t = 0; t < T; ++t) w[t] = uniform_box(drng, n, strategy.cap);

  // Per draw, the controller and state just before step t.
  struct Snapshot {
    std::unique_ptr<DecisionRule> rule;
    VectorXd x;
    double cost = 0.0;  // truth cost accumulated before t
  };
  using Path = std::vector<Snapshot>;

  // Simulates from step `from` of `start` with sequence `seq`, filling the
  // snapshots after `from` into `out`; returns the total truth cost.
  auto simulate = [&](const Snapshot& start, int from, const std::vector<VectorXd>& seq,
                      Path* out) {
    std::unique_ptr<DecisionRule> r = start.rule->clone();
    VectorXd x = start.x;
    double cost = start.cost;
    for (int t = from; t < T; ++t) {
      if (out != nullptr) (*out)[t] = Snapshot{r->clone(), x, cost};
      const VectorXd u = r->decide(x);
      cost += weighted(star.M, x, u);
      x = star.A * x + star.B * u + seq[t];
      r->observe(x);
    }
    return cost;
  };

  std::vector<Path> paths(draws);
  std::vector<double> totals(draws);
  for (std::size_t d = 0; d < draws; ++d) {
    std::unique_ptr<DecisionRule> r = rule.clone();
    r->reset(draw_seed(strategy.seed + 1, d));
    paths[d].resize(T);
    Snapshot root{std::move(r), VectorXd::Zero(n), 0.0};
    totals[d] = simulate(root, 0, w, &paths[d]);
  }
  auto energy = [&](const std::vector<VectorXd>& seq) {
    double e = 0.0;
    for (const VectorXd& v : seq) e += v.squaredNorm();
    return e;
  };
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  double objective = mean(totals) - g2 * energy(w);

  double step = strategy.ascent.initial_step * strategy.cap;
  for (int pass = 0; pass < strategy.ascent.passes; ++pass) {
    for (int t = 0; t < T; ++t) {
      for (Index k = 0; k < n; ++k) {
        for (double sign : {1.0, -1.0}) {
          std::vector<VectorXd> trial = w;
          trial[t](k) += sign * step;
          trial[t] = clip_norm(std::move(trial[t]), strategy.cap);
          if ((trial[t] - w[t]).norm() == 0.0) continue;
          std::vector<double> trial_totals(draws);
          parallel_for(draws, [&](std::size_t d) {
            trial_totals[d] = simulate(paths[d][t], t, trial, nullptr);
          });
          const double value = mean(trial_totals) - g2 * energy(trial);
          if (value > objective) {
            objective = value;
            w = std::move(trial);
            parallel_for(draws, [&](std::size_t d) {
              Snapshot start{paths[d][t].rule->clone(), paths[d][t].x, paths[d][t].cost};
              totals[d] = simulate(start, t, w, &paths[d]);
            });
            break;
          }
        }
      }
    }
    step *= strategy.ascent.shrink;
  }
  return w;
}

Trace expected_rollout(const ScenarioSet& scenarios, std::size_t truth,
                       const DisturbanceStrategy& strategy, const DecisionRule& rule,
                       int T, std::size_t draws, std::uint64_t seed) {
  check_truth(scenarios, truth);
  check_strategy(scenarios, strategy);
  if (draws == 0) throw ConfigError("expected rollout needs at least one draw");
  std::vector<VectorXd> seq;
  const bool open_loop = strategy.kind == StrategyKind::kAdversarialAscent;
  if (open_loop) seq = ascent_sequence(scenarios, truth, strategy, rule, T);
  std::vector<Trace> traces(draws);
  parallel_for(draws, [&](std::size_t d) {
    std::unique_ptr<DecisionRule> r = rule.clone();
    traces[d] = open_loop ? rollout_sequence(scenarios, truth, seq, *r, seed + d)
                          : rollout(scenarios, truth, strategy, *r, T, seed + d);
  });

  const std::size_t K = scenarios.size();
  const double inv = 1.0 / static_cast<double>(draws);
  Trace out;
  out.seed = seed;
  out.truth = truth;
  out.strategy = strategy_name(strategy.kind);
  out.averaged = draws;
  out.x_final = VectorXd::Zero(scenarios.n());
  for (const Trace& tr : traces) out.x_final += inv * tr.x_final;
  for (int t = 0; t < T; ++t) {
    TraceStep st;
    st.x = VectorXd::Zero(scenarios.n());
    st.u = VectorXd::Zero(scenarios.m());
    st.w = VectorXd::Zero(scenarios.n());
    st.stage_cost.assign(K, 0.0);
    st.cum_cost.assign(K, 0.0);
    double sq = 0.0;
    for (const Trace& tr : traces) {
      const TraceStep& s = tr.steps[t];
      st.x += inv * s.x;
      st.u += inv * s.u;
      st.w += inv * s.w;
      for (std::size_t i = 0; i < K; ++i) st.stage_cost[i] += inv * s.stage_cost[i];
      st.wnorm += inv * s.wnorm;
      sq += s.stage_cost[truth] * s.stage_cost[truth];
    }
    for (std::size_t i = 0; i < K; ++i) {
      st.cum_cost[i] = st.stage_cost[i] + (t == 0 ? 0.0 : out.steps.back().cum_cost[i]);
    }
    st.cum_wnorm = st.wnorm + (t == 0 ? 0.0 : out.steps.back().cum_wnorm);
    const double mean = st.stage_cost[truth];
    const double var = draws > 1 ? std::max(0.0, (sq - draws * mean * mean) / (draws - 1)) : 0.0;
    out.cost_stderr.push_back(std::sqrt(var * inv));
    out.steps.push_back(std::move(st));
  }
  return out;
}

GainEstimate empirical_gain(const std::vector<Trace>& traces, std::size_t hypothesis) {
  if (traces.empty()) throw ConfigError("empirical_gain needs at least one trace");
  GainEstimate best;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const Trace& tr = traces[k];
    for (std::size_t t = 0; t < tr.steps.size(); ++t) {
      const TraceStep& s = tr.steps[t];
      if (hypothesis >= s.cum_cost.size()) throw ConfigError("hypothesis index out of range");
      double ratio = 0.0;
      if (s.cum_wnorm > 0.0) {
        ratio = s.cum_cost[hypothesis] / s.cum_wnorm;
      } else if (s.cum_cost[hypothesis] > 0.0) {
        ratio = std::numeric_limits<double>::infinity();
        best.violation = true;
      }
      if (ratio > best.value) {
        best.value = ratio;
        best.trace = k;
        best.prefix = t + 1;
      }
    }
  }
  return best;
}

SuiteResult run_gain_suite(const ScenarioSet& scenarios, const DecisionRule& rule,
                           const SuiteConfig& config) {
  if (config.T < 0) throw ConfigError("suite horizon must be >= 0");
  std::vector<std::size_t> truths = config.truths;
  if (truths.empty()) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) truths.push_back(i);
  }
  SuiteResult out;
  for (std::size_t truth : truths) {
    check_truth(scenarios, truth);
    const std::pair<StrategyKind, int> plan[] = {
        {StrategyKind::kIidSeeded, config.iid_seeds},
        {StrategyKind::kModelConfusion, config.confusion_seeds},
        {StrategyKind::kAdversarialAscent, config.ascent_seeds}};
    for (const auto& [kind, count] : plan) {
      for (int k = 0; k < count; ++k) {
        DisturbanceStrategy s;
        s.kind = kind;
        s.cap = config.cap;
        s.kick = config.kick;
        s.ascent = config.ascent;
        s.decoy = (truth + 1) % scenarios.size();
        s.seed = draw_seed(config.seed, 1000 * static_cast<std::size_t>(kind) + k) + truth;
        const Trace tr = expected_rollout(scenarios, truth, s, rule, config.T, config.draws,
                                          draw_seed(s.seed, 7));
        SuiteEntry e{truth, kind, s.seed, empirical_gain({tr}, truth)};
        out.max_gain = std::max(out.max_gain, e.gain.value);
        out.violation = out.violation || e.gain.violation;
        out.entries.push_back(e);
      }
    }
  }
  return out;
}

SweepResult static_gain_sweep(const ScenarioSet& scenarios, double k_lo, double k_hi,
                              int points, const SuiteConfig& config) {
  if (scenarios.n() != 1 || scenarios.m() != 1) {
    throw ConfigError("static gain sweep supports scalar instances only");
  }
  if (points < 1 || !(k_hi >= k_lo)) throw ConfigError("invalid gain sweep grid");
  SuiteConfig cfg = config;
  cfg.draws = 1;
  cfg.ascent.draws = 1;
  SweepResult out;
  out.best_gain = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double k = points == 1 ? k_lo
                                 : k_lo + (k_hi - k_lo) * static_cast<double>(i) / (points - 1);
    const StaticGain rule(MatrixXd::Constant(1, 1, k));
    const double g = run_gain_suite(scenarios, rule, cfg).max_gain;
    out.ks.push_back(k);
    out.gains.push_back(g);
    if (g < out.best_gain) {
      out.best_gain = g;
      out.best_k = k;
    }
  }
  return out;
}

}  // namespace macs
