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

// Closed-loop rollouts against disturbance strategies and empirical gain
// estimates.

#ifndef MACS_SIM_HPP_
#define MACS_SIM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "macs/control.hpp"
#include "macs/model.hpp"

namespace macs {

enum class StrategyKind { kZero, kIidSeeded, kModelConfusion, kAdversarialAscent };

std::string strategy_name(StrategyKind kind);
// Accepts "zero", "iid_seeded", "model_confusion", "adversarial_ascent".
StrategyKind parse_strategy(const std::string& name);

struct AscentConfig {
  int passes = 3;
  // Controller draws averaged (common random numbers) per objective value.
  int draws = 4;
  double initial_step = 0.5;  // relative to the cap
  double shrink = 0.5;
};

struct DisturbanceStrategy {
  StrategyKind kind = StrategyKind::kZero;
  double cap = 1.0;  // |w_t| <= cap
  std::uint64_t seed = 0;
  // Model confusion: hypothesis the data is steered toward, and the size of
  // the uniform excitation added on top.
  std::size_t decoy = 0;
  double kick = 0.1;
  AscentConfig ascent;
};

struct TraceStep {
  VectorXd x;
  VectorXd u;
  VectorXd w;
  std::vector<double> stage_cost;  // |(x,u)|^2_{M_i} per hypothesis
  std::vector<double> cum_cost;
  double wnorm = 0.0;  // |w|^2
  double cum_wnorm = 0.0;
};

struct Trace {
  std::vector<TraceStep> steps;
  VectorXd x_final;
  std::uint64_t seed = 0;
  std::size_t truth = 0;
  std::string strategy;
  // Number of rollouts averaged into this trace (1 for a single rollout).
  std::size_t averaged = 1;
  // Per-step standard error of the averaged truth cost (empty if averaged==1).
  std::vector<double> cost_stderr;
};

// Simulates T steps of decide/observe with x_{t+1} = A* x_t + B* u_t + w_t for
// the truth hypothesis. The rule is reset with `seed` first. Open-loop
// disturbance sequences for adversarial ascent are computed against `rule`.
// Throws ConfigError for a bad truth index or strategy parameters.
Trace rollout(const ScenarioSet& scenarios, std::size_t truth,
              const DisturbanceStrategy& strategy, DecisionRule& rule, int T,
              std::uint64_t seed, const VectorXd& x0 = VectorXd());

// Same with a fixed disturbance sequence.
Trace rollout_sequence(const ScenarioSet& scenarios, std::size_t truth,
                       const std::vector<VectorXd>& w, DecisionRule& rule,
                       std::uint64_t seed, const VectorXd& x0 = VectorXd());

// The open-loop disturbance sequence found by coordinate ascent on
//   mean over draws of sum_t cost_truth - gamma^2 sum_t |w_t|^2
// within the cap, starting from a seeded uniform sequence.
std::vector<VectorXd> ascent_sequence(const ScenarioSet& scenarios, std::size_t truth,
                                      const DisturbanceStrategy& strategy,
                                      const DecisionRule& rule, int T);

// Averages `draws` rollouts that differ only in the controller seed
// (seed, seed + 1, ...). The disturbance strategy, including any ascent
// sequence, is shared across draws.
Trace expected_rollout(const ScenarioSet& scenarios, std::size_t truth,
                       const DisturbanceStrategy& strategy, const DecisionRule& rule,
                       int T, std::size_t draws, std::uint64_t seed);

struct GainEstimate {
  double value = 0.0;       // max over traces and prefixes
  bool violation = false;   // positive cost with zero disturbance energy
  std::size_t trace = 0;    // argmax
  std::size_t prefix = 0;   // argmax prefix length
};

// max over traces and prefixes T' of sum_{t<T'} cost_i / sum_{t<T'} |w_t|^2,
// with 0/0 = 0. Throws ConfigError on an empty list.
GainEstimate empirical_gain(const std::vector<Trace>& traces, std::size_t hypothesis);

struct SuiteConfig {
  int T = 100;
  std::size_t draws = 200;
  std::vector<std::size_t> truths;  // empty: every hypothesis
  int iid_seeds = 20;
  int confusion_seeds = 20;
  int ascent_seeds = 10;
  double cap = 1.0;
  double kick = 0.1;
  AscentConfig ascent;
  std::uint64_t seed = 1;
};

struct SuiteEntry {
  std::size_t truth = 0;
  StrategyKind kind = StrategyKind::kZero;
  std::uint64_t seed = 0;
  GainEstimate gain;
};

struct SuiteResult {
  double max_gain = 0.0;
  bool violation = false;
  std::vector<SuiteEntry> entries;
};

// Expected-trace gain for every (truth, strategy, seed) in the suite. The
// decoy for model confusion is the next hypothesis in the list.
SuiteResult run_gain_suite(const ScenarioSet& scenarios, const DecisionRule& rule,
                           const SuiteConfig& config);

struct SweepResult {
  double best_k = 0.0;
  double best_gain = 0.0;  // min over k of max over truths
  std::vector<double> ks;
  std::vector<double> gains;
};

// Static feedback u = -k x for scalar instances over an even grid of k, each
// scored by run_gain_suite (a single draw suffices: the law is deterministic).
SweepResult static_gain_sweep(const ScenarioSet& scenarios, double k_lo, double k_hi,
                              int points, const SuiteConfig& config);

}  // namespace macs

#endif  // MACS_SIM_HPP_
