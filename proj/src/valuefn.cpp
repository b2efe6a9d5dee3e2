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

#include "macs/valuefn.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "macs/errors.hpp"

namespace macs {

DataMoment::DataMoment(Index n, Index m, MatrixXd Z, double psd_tol)
    : n_(n), m_(m), Z_(std::move(Z)) {
  const Index d = 2 * n + m;
  if (Z_.rows() != d || Z_.cols() != d) {
    throw ShapeError("data moment must be " + std::to_string(d) + "x" +
                     std::to_string(d));
  }
  if (!is_symmetric(Z_, kSymmetryTol * std::max(1.0, Z_.cwiseAbs().maxCoeff()))) {
    throw DomainError("data moment is not symmetric");
  }
  if (min_eigenvalue(Z_) < -psd_tol * std::max(1.0, Z_.norm())) {
    throw DomainError("data moment is not positive semidefinite");
  }
}

DataMoment DataMoment::outer(const VectorXd& x, const VectorXd& u,
                             const VectorXd& xplus) {
  return update_Z(DataMoment(x.size(), u.size()), x, u, xplus);
}

DataMoment update_Z(const DataMoment& Z, const VectorXd& x, const VectorXd& u,
                    const VectorXd& xplus) {
  if (x.size() != Z.n() || u.size() != Z.m() || xplus.size() != Z.n()) {
    throw ShapeError("update_Z: vector sizes do not match the data moment");
  }
  const VectorXd v = stack(x, u, xplus);
  MatrixXd next = Z.Z();
  next.noalias() += v * v.transpose();
  return DataMoment::unchecked(Z.n(), Z.m(), symmetrize(next));
}

ValueCone::ValueCone(Index n, Index m, std::vector<ValueVertex> vertices)
    : n_(n), m_(m), vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw InvalidConeError("value cone has no vertices");
  const Index ds = 2 * n + m;
  const Index dq = n + m;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const ValueVertex& v = vertices_[i];
    if (v.S.rows() != ds || v.S.cols() != ds || v.Q.rows() != dq ||
        v.Q.cols() != dq) {
      throw ShapeError("vertex " + std::to_string(i) +
                       " has blocks inconsistent with (n,m)=(" +
                       std::to_string(n) + "," + std::to_string(m) + ")");
    }
    const double scale = std::max({1.0, v.S.cwiseAbs().maxCoeff(),
                                   v.Q.size() ? v.Q.cwiseAbs().maxCoeff() : 0.0});
    if (!is_symmetric(v.S, kSymmetryTol * scale) ||
        !is_symmetric(v.Q, kSymmetryTol * scale)) {
      throw DomainError("vertex " + std::to_string(i) + " is not symmetric");
    }
  }
}

ValueCone::ValueCone(Index n, Index m, std::vector<ValueVertex> vertices,
                     std::vector<MatrixXd> scenario_S)
    : ValueCone(n, m, std::move(vertices)) {
  scenario_S_ = std::move(scenario_S);
  for (const MatrixXd& s : scenario_S_) {
    if (s.rows() != 2 * n + m || s.cols() != 2 * n + m) {
      throw ShapeError("scenario S-matrix has the wrong size");
    }
  }
  if (!contains_scenarios()) {
    throw InvalidConeError("value cone does not contain every scenario S-matrix");
  }
}

bool ValueCone::contains_scenarios(double tol) const {
  if (scenario_S_.empty()) {
    return std::any_of(vertices_.begin(), vertices_.end(),
                       [](const ValueVertex& v) { return v.Q.isZero(0.0); });
  }
  for (const MatrixXd& s : scenario_S_) {
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    const bool found = std::any_of(
        vertices_.begin(), vertices_.end(), [&](const ValueVertex& v) {
          return (v.S - s).cwiseAbs().maxCoeff() <= tol * scale;
        });
    if (!found) return false;
  }
  return true;
}

ValueCone ValueCone::with_vertex(ValueVertex v) const {
  std::vector<ValueVertex> vs = vertices_;
  vs.push_back(std::move(v));
  ValueCone out(n_, m_, std::move(vs));
  out.scenario_S_ = scenario_S_;
  return out;
}

std::vector<double> vertex_values(const ValueCone& cone, const DataMoment& Z,
                                  const VectorXd& x, const VectorXd& u) {
  if (cone.vertices().empty()) throw InvalidConeError("value cone is empty");
  if (Z.n() != cone.n() || Z.m() != cone.m() || x.size() != cone.n() ||
      u.size() != cone.m()) {
    throw ShapeError("evaluate: dimensions do not match the cone");
  }
  const VectorXd p = stack(x, u);
  std::vector<double> out;
  out.reserve(cone.size());
  for (const ValueVertex& v : cone.vertices()) {
    out.push_back(frobenius_inner(v.S, Z.Z()) + p.dot(v.Q * p));
  }
  return out;
}

double evaluate(const ValueCone& cone, const DataMoment& Z, const VectorXd& x,
                const VectorXd& u) {
  const std::vector<double> vals = vertex_values(cone, Z, x, u);
  return *std::max_element(vals.begin(), vals.end());
}

ValueCone prune(const ValueCone& cone, std::span<const ConePoint> samples,
                double tol) {
  const auto& vs = cone.vertices();
  std::vector<bool> keep(vs.size(), true);

  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = 0; j < i && keep[i]; ++j) {
      if (keep[j] && vs[i] == vs[j]) keep[i] = false;
    }
  }

  std::vector<bool> is_protected(vs.size(), false);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (keep[i] && vs[i].Q.isZero(0.0)) is_protected[i] = true;
  }
  for (const MatrixXd& s : cone.scenario_S()) {
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (keep[i] && (vs[i].S - s).cwiseAbs().maxCoeff() <= 1e-9 * scale) {
        is_protected[i] = true;
        break;
      }
    }
  }

  if (!samples.empty()) {
    std::vector<bool> active(vs.size(), false);
    for (const ConePoint& pt : samples) {
      const std::vector<double> vals = vertex_values(cone, pt.Z, pt.x, pt.u);
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < vs.size(); ++i) {
        if (keep[i]) best = std::max(best, vals[i]);
      }
      for (std::size_t i = 0; i < vs.size(); ++i) {
        if (keep[i] && vals[i] >= best - tol) active[i] = true;
      }
    }
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (keep[i] && !active[i] && !is_protected[i]) keep[i] = false;
    }
  }

  std::vector<ValueVertex> kept;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (keep[i]) kept.push_back(vs[i]);
  }
  if (cone.scenario_S().empty()) {
    return ValueCone(cone.n(), cone.m(), std::move(kept));
  }
  return ValueCone(cone.n(), cone.m(), std::move(kept), cone.scenario_S());
}

}  // namespace macs
