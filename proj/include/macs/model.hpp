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

// Model hypotheses (A, B, M), the scenario set that generates the S-matrices,
// and the membership test for the spectral model class parameterized by alpha.
//
// Every S-matrix is laid out in (x, u, x+) block order, so that
//
//   [x; u; x+]^T S [x; u; x+] = |(x,u)|^2_M - gamma^2 |A x + B u - x+|^2.

#ifndef MACS_MODEL_HPP_
#define MACS_MODEL_HPP_

#include <string>
#include <vector>

#include "macs/linalg.hpp"

namespace macs {

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kDefaultPsdTol = 1e-9;

// One candidate model: x+ = A x + B u + w with stage cost |(x,u)|^2_M.
struct Hypothesis {
  MatrixXd A;  // n x n
  MatrixXd B;  // n x m
  MatrixXd M;  // (n+m) x (n+m), symmetric PSD

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }

  // Throws ShapeError on inconsistent dimensions and DomainError when M is
  // asymmetric or not PSD within psd_tol.
  void validate(double psd_tol = kDefaultPsdTol) const;

  // Convenience constructor for scalar (n = m = 1) systems with M = diag.
  static Hypothesis scalar(double a, double b, double m_x, double m_u);
};

// The S-matrix of one hypothesis at a gain level.
struct SMatrix {
  MatrixXd S;  // (2n+m) x (2n+m)

  // Quadratic form on the stacked vector (x, u, x+).
  double quad(const VectorXd& xux) const { return xux.dot(S * xux); }
};

// A finite list of hypotheses sharing (n, m) together with the gain level.
class ScenarioSet {
 public:
  // Throws ConfigError if the list is empty, DomainError if gamma <= 1, and
  // ShapeError naming the offending index on a dimension mismatch.
  ScenarioSet(std::vector<Hypothesis> hypotheses, double gamma);

  const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }
  const Hypothesis& operator[](std::size_t i) const { return hypotheses_[i]; }
  std::size_t size() const { return hypotheses_.size(); }
  double gamma() const { return gamma_; }
  Index n() const { return hypotheses_.front().n(); }
  Index m() const { return hypotheses_.front().m(); }

  // S-matrices of every hypothesis, in order.
  std::vector<SMatrix> s_matrices() const;

  // Same hypotheses at another gain level.
  ScenarioSet with_gamma(double gamma) const;

 private:
  std::vector<Hypothesis> hypotheses_;
  double gamma_;
};

// Spectral model class: A^T A <= alpha^2 I, B^T B = I and a Riccati-type
// stage cost bound at gain gamma_alpha.
struct ModelClassSpec {
  double alpha = 0.0;
  double gamma_alpha = 1.0;

  static ModelClassSpec from_alpha(double alpha);
};

// alpha + sqrt(1 + alpha^2). Throws DomainError for negative alpha.
double gamma_alpha(double alpha);

// diag{M, 0} - gamma^2 [A B -I]^T [A B -I], exactly symmetric.
SMatrix build_S(const Hypothesis& h, double gamma);

// |(x,u)|^2_M - gamma^2 |A x + B u - x+|^2.
double stage_payoff(const Hypothesis& h, double gamma, const VectorXd& x,
                    const VectorXd& u, const VectorXd& xplus);

struct MembershipOptions {
  double tol = kDefaultPsdTol;
};

struct MembershipReport {
  bool member = false;
  bool spectral_ok = false;   // A^T A <= alpha^2 I + tol I
  bool isometry_ok = false;   // |B^T B - I| <= tol
  bool riccati_ok = false;    // Q_xx - Q_xu Q_uu^{-1} Q_ux <= I + tol I
  double spectral_margin = 0.0;  // alpha^2 - lambda_max(A^T A)
  double isometry_error = 0.0;   // max |B^T B - I|
  double schur_margin = 0.0;     // 1 - lambda_max(Schur complement)
  MatrixXd Q;                    // M + [A B]^T [A B] / (1 - gamma^-2)
  MatrixXd schur;                // Q_xx - Q_xu Q_uu^{-1} Q_ux
  std::string failing;           // first failing condition, empty if member
};

// Closed-form membership test. The min over u / max over zeta in the class
// definition reduces to the Schur complement of
//   Q = M + [A B]^T [A B] / (1 - gamma_alpha^-2)
// because max_zeta(-g^2 |c - zeta|^2 + |zeta|^2) = |c|^2 / (1 - g^-2).
//
// Throws DegenerateGainError when gamma_alpha <= 1 and IndefiniteError (with
// the null direction) when Q_uu is singular.
MembershipReport membership_check(const Hypothesis& h,
                                  const ModelClassSpec& spec,
                                  const MembershipOptions& options = {});

}  // namespace macs

#endif  // MACS_MODEL_HPP_
