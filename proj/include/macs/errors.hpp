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

#ifndef MACS_ERRORS_HPP_
#define MACS_ERRORS_HPP_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace macs {

// Matrix or vector dimensions do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An argument lies outside the domain of an operation (negative alpha,
// gamma <= 1, asymmetric weights, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// gamma_alpha == 1: the adversary's completion of squares divides by zero.
class DegenerateGainError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A matrix that must be definite is not. Carries a witness direction.
class IndefiniteError : public DomainError {
 public:
  IndefiniteError(const std::string& what, Eigen::VectorXd witness)
      : DomainError(what), witness_(std::move(witness)) {}
  const Eigen::VectorXd& witness() const { return witness_; }

 private:
  Eigen::VectorXd witness_;
};

// The randomized-decision program is unbounded below. The direction is the
// recession direction in (mu, vec W) space along which the value decreases.
class UnboundedError : public std::runtime_error {
 public:
  UnboundedError(const std::string& what, Eigen::VectorXd mu_direction,
                 Eigen::MatrixXd w_direction)
      : std::runtime_error(what),
        mu_direction_(std::move(mu_direction)),
        w_direction_(std::move(w_direction)) {}
  const Eigen::VectorXd& mu_direction() const { return mu_direction_; }
  const Eigen::MatrixXd& w_direction() const { return w_direction_; }

 private:
  Eigen::VectorXd mu_direction_;
  Eigen::MatrixXd w_direction_;
};

// W - mu mu^T is indefinite beyond tolerance: no probability law has these
// moments.
class RealizabilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Invalid search/sampler/run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// decide/observe called out of order.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Value cone is empty or otherwise unusable.
class InvalidConeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Oracle discretization too coarse for the requested accuracy.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. The message names the path and field.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace macs

#endif  // MACS_ERRORS_HPP_
