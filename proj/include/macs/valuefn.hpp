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

// The value cone, stored by its generators (S, Q), and the data moment Z.
//
// The value at a point is max over generators of <S, Z> + |(x,u)|^2_Q. Since
// the objective is linear in (S, Q), the maximum over the convex hull is
// attained at a generator, so the generator list is all that is needed.

#ifndef MACS_VALUEFN_HPP_
#define MACS_VALUEFN_HPP_

#include <span>
#include <vector>

#include "macs/linalg.hpp"
#include "macs/model.hpp"

namespace macs {

struct ValueVertex {
  MatrixXd S;  // (2n+m) x (2n+m), block order (x, u, x+)
  MatrixXd Q;  // (n+m) x (n+m)

  bool operator==(const ValueVertex& other) const {
    return S == other.S && Q == other.Q;
  }
};

// Running sum of outer products of (x_t, u_t, x_{t+1}).
class DataMoment {
 public:
  DataMoment() = default;
  DataMoment(Index n, Index m) : n_(n), m_(m), Z_(MatrixXd::Zero(2 * n + m, 2 * n + m)) {}
  // Throws ShapeError/DomainError if Z is not (2n+m)-square, symmetric and PSD
  // within psd_tol.
  DataMoment(Index n, Index m, MatrixXd Z, double psd_tol = kDefaultPsdTol);

  // Skips validation; the caller guarantees a symmetric PSD (2n+m)-square Z.
  static DataMoment unchecked(Index n, Index m, MatrixXd Z) {
    DataMoment out;
    out.n_ = n;
    out.m_ = m;
    out.Z_ = std::move(Z);
    return out;
  }

  static DataMoment outer(const VectorXd& x, const VectorXd& u,
                          const VectorXd& xplus);

  Index n() const { return n_; }
  Index m() const { return m_; }
  const MatrixXd& Z() const { return Z_; }

 private:
  Index n_ = 0;
  Index m_ = 0;
  MatrixXd Z_;
};

// Z + outer((x, u, x+)).
DataMoment update_Z(const DataMoment& Z, const VectorXd& x, const VectorXd& u,
                    const VectorXd& xplus);

class ValueCone {
 public:
  ValueCone() = default;
  // Throws InvalidConeError when empty, ShapeError on inconsistent
  // dimensions and DomainError on asymmetric blocks.
  ValueCone(Index n, Index m, std::vector<ValueVertex> vertices);

  // As above, and additionally records the generating scenario S-matrices
  // and checks that every one of them appears as the S block of a vertex.
  ValueCone(Index n, Index m, std::vector<ValueVertex> vertices,
            std::vector<MatrixXd> scenario_S);

  Index n() const { return n_; }
  Index m() const { return m_; }
  const std::vector<ValueVertex>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  // Scenario S-matrices the cone was built from (may be empty for cones
  // loaded without provenance).
  const std::vector<MatrixXd>& scenario_S() const { return scenario_S_; }

  // True when every scenario S-matrix (or, lacking those, at least one
  // vertex) has a witness vertex (S_i, 0).
  bool contains_scenarios(double tol = 1e-9) const;

  ValueCone with_vertex(ValueVertex v) const;

 private:
  Index n_ = 0;
  Index m_ = 0;
  std::vector<ValueVertex> vertices_;
  std::vector<MatrixXd> scenario_S_;
};

// max over vertices of <S, Z> + |(x,u)|^2_Q.
double evaluate(const ValueCone& cone, const DataMoment& Z, const VectorXd& x,
                const VectorXd& u);

// Per-vertex values, same order as cone.vertices().
std::vector<double> vertex_values(const ValueCone& cone, const DataMoment& Z,
                                  const VectorXd& x, const VectorXd& u);

struct ConePoint {
  DataMoment Z;
  VectorXd x;
  VectorXd u;
};

// Drops exact duplicates, then every vertex that is never within tol of the
// maximum on any sample. Zero-Q witnesses and the first vertex carrying each
// scenario S-matrix are always kept.
ValueCone prune(const ValueCone& cone, std::span<const ConePoint> samples,
                double tol);

}  // namespace macs

#endif  // MACS_VALUEFN_HPP_
