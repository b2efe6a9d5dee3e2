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

// Small dense helpers shared across modules.

#ifndef MACS_LINALG_HPP_
#define MACS_LINALG_HPP_

#include <Eigen/Dense>

namespace macs {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd symmetrize(const MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

inline bool is_symmetric(const MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

// Smallest eigenvalue of a symmetric matrix (+inf for 0x0).
double min_eigenvalue(const MatrixXd& m);
double max_eigenvalue(const MatrixXd& m);

// Eigenvector for the smallest eigenvalue.
VectorXd min_eigenvector(const MatrixXd& m);

// <A, B> = trace(A^T B).
inline double frobenius_inner(const MatrixXd& a, const MatrixXd& b) {
  return a.cwiseProduct(b).sum();
}

// Concatenate vectors.
VectorXd stack(const VectorXd& a, const VectorXd& b);
VectorXd stack(const VectorXd& a, const VectorXd& b, const VectorXd& c);

// Returns a 1x1 matrix / 1-vector.
inline MatrixXd scalar_matrix(double v) { return MatrixXd::Constant(1, 1, v); }
inline VectorXd scalar_vector(double v) { return VectorXd::Constant(1, v); }

}  // namespace macs

#endif  // MACS_LINALG_HPP_
