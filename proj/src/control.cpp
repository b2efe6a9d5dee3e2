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

#include "macs/control.hpp"

#include <string>

#include "macs/errors.hpp"

namespace macs {
namespace {

void check_dim(const VectorXd& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw ShapeError(std::string(what) + " has dimension " + std::to_string(v.size()) +
                     ", expected " + std::to_string(expected));
  }
}

}  // namespace

Controller::Controller(ValueCone cone, ControllerOptions options)
    : cone_(std::move(cone)),
      options_(options),
      Z_(cone_.n(), cone_.m()),
      rng_(options.seed) {}

PolicyResult Controller::policy(const VectorXd& x) const {
  check_dim(x, n(), "state");
  return policy_moments(cone_, Z_, x, options_.solver);
}

VectorXd Controller::decide(const VectorXd& x) {
  if (pending_) throw ProtocolError("decide called twice without observe");
  check_dim(x, n(), "state");
  if (steps_ == 0 && x.squaredNorm() > 0.0) {
    if (!options_.allow_nonzero_initial_state) {
      throw ProtocolError("initial state must be zero unless the override flag is set");
    }
    voided_ = true;
  }
  PolicyResult p = policy_moments(cone_, Z_, x, options_.solver);
  VectorXd u = options_.mode == DecisionMode::kRandomized
                   ? realize_decision(p.moments, rng_)
                   : p.moments.mu;
  last_policy_ = std::move(p);
  pending_ = Pending{x, u};
  return u;
}

void Controller::observe(const VectorXd& x_next) {
  if (!pending_) throw ProtocolError("observe called without a pending decision");
  check_dim(x_next, n(), "next state");
  Z_ = update_Z(Z_, pending_->x, pending_->u, x_next);
  pending_.reset();
  ++steps_;
}

void Controller::reset(std::uint64_t seed) {
  Z_ = DataMoment(n(), m());
  rng_.seed(seed);
  pending_.reset();
  last_policy_.reset();
  steps_ = 0;
  voided_ = false;
}

std::unique_ptr<DecisionRule> Controller::clone() const {
  return std::make_unique<Controller>(*this);
}

StaticGain::StaticGain(MatrixXd K) : K_(std::move(K)) {
  if (K_.size() == 0) throw ShapeError("static gain must be non-empty");
}

VectorXd StaticGain::decide(const VectorXd& x) {
  if (pending_) throw ProtocolError("decide called twice without observe");
  check_dim(x, n(), "state");
  pending_ = true;
  return -K_ * x;
}

void StaticGain::observe(const VectorXd& x_next) {
  if (!pending_) throw ProtocolError("observe called without a pending decision");
  check_dim(x_next, n(), "next state");
  pending_ = false;
}

void StaticGain::reset(std::uint64_t) { pending_ = false; }

std::unique_ptr<DecisionRule> StaticGain::clone() const {
  return std::make_unique<StaticGain>(*this);
}

}  // namespace macs
