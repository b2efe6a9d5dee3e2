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

// The online controller: keeps the data moment Z_t and plays the optimal
// randomized decision for the current cone at every step.

#ifndef MACS_CONTROL_HPP_
#define MACS_CONTROL_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "macs/games.hpp"
#include "macs/valuefn.hpp"

namespace macs {

// Anything that maps the observed state to a decision, one step at a time.
// decide and observe strictly alternate.
class DecisionRule {
 public:
  virtual ~DecisionRule() = default;

  virtual Index n() const = 0;
  virtual Index m() const = 0;
  virtual VectorXd decide(const VectorXd& x) = 0;
  virtual void observe(const VectorXd& x_next) = 0;
  // Clears all state and reseeds the randomization.
  virtual void reset(std::uint64_t seed) = 0;
  virtual std::unique_ptr<DecisionRule> clone() const = 0;
};

enum class DecisionMode { kDeterministic, kRandomized };

struct ControllerOptions {
  DecisionMode mode = DecisionMode::kRandomized;
  std::uint64_t seed = 0;
  // The guarantee assumes x_0 = 0. With this flag a nonzero first state is
  // accepted but guarantee_void() reports it.
  bool allow_nonzero_initial_state = false;
  MomentSolverOptions solver;
};

class Controller : public DecisionRule {
 public:
  Controller(ValueCone cone, ControllerOptions options = {});

  Index n() const override { return cone_.n(); }
  Index m() const override { return cone_.m(); }

  // Throws ProtocolError when a decision is already pending or when the
  // first state is nonzero without the override flag.
  VectorXd decide(const VectorXd& x) override;
  // Throws ProtocolError without a pending decision.
  void observe(const VectorXd& x_next) override;
  void reset(std::uint64_t seed) override;
  std::unique_ptr<DecisionRule> clone() const override;

  // The law the next decide() at x would draw from, without touching state.
  PolicyResult policy(const VectorXd& x) const;

  const ValueCone& cone() const { return cone_; }
  const DataMoment& Z() const { return Z_; }
  DecisionMode mode() const { return options_.mode; }
  bool has_pending() const { return pending_.has_value(); }
  std::size_t steps() const { return steps_; }
  const std::optional<PolicyResult>& last_policy() const { return last_policy_; }
  // Deterministic mode or a nonzero initial state void the guarantee.
  bool guarantee_void() const {
    return voided_ || options_.mode == DecisionMode::kDeterministic;
  }

 private:
  struct Pending {
    VectorXd x;
    VectorXd u;
  };

  ValueCone cone_;
  ControllerOptions options_;
  DataMoment Z_;
  Rng rng_;
  std::optional<Pending> pending_;
  std::optional<PolicyResult> last_policy_;
  std::size_t steps_ = 0;
  bool voided_ = false;
};

// u = -K x.
class StaticGain : public DecisionRule {
 public:
  explicit StaticGain(MatrixXd K);

  Index n() const override { return K_.cols(); }
  Index m() const override { return K_.rows(); }
  VectorXd decide(const VectorXd& x) override;
  void observe(const VectorXd& x_next) override;
  void reset(std::uint64_t seed) override;
  std::unique_ptr<DecisionRule> clone() const override;

 private:
  MatrixXd K_;
  bool pending_ = false;
};

}  // namespace macs

#endif  // MACS_CONTROL_HPP_
