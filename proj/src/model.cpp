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

#include "macs/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "macs/errors.hpp"

namespace macs {
namespace {

std::string dims(const MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

void Hypothesis::validate(double psd_tol) const {
  const Index nn = A.rows();
  const Index mm = B.cols();
  if (nn == 0 || A.cols() != nn) {
    throw ShapeError("A must be square and non-empty, got " + dims(A));
  }
  if (B.rows() != nn || mm == 0) {
    throw ShapeError("B must be " + std::to_string(nn) + "xm with m >= 1, got " +
                     dims(B));
  }
  if (M.rows() != nn + mm || M.cols() != nn + mm) {
    throw ShapeError("M must be " + std::to_string(nn + mm) + "x" +
                     std::to_string(nn + mm) + ", got " + dims(M));
  }
  if (!is_symmetric(M, kSymmetryTol)) {
    throw DomainError("M is not symmetric");
  }
  if (min_eigenvalue(M) < -psd_tol) {
    throw DomainError("M is not positive semidefinite");
  }
}

Hypothesis Hypothesis::scalar(double a, double b, double m_x, double m_u) {
  Hypothesis h;
  h.A = scalar_matrix(a);
  h.B = scalar_matrix(b);
  h.M = MatrixXd::Zero(2, 2);
  h.M(0, 0) = m_x;
  h.M(1, 1) = m_u;
  return h;
}

ScenarioSet::ScenarioSet(std::vector<Hypothesis> hypotheses, double gamma)
    : hypotheses_(std::move(hypotheses)), gamma_(gamma) {
  if (hypotheses_.empty()) {
    throw ConfigError("scenario set needs at least one hypothesis");
  }
  if (!(gamma_ > 1.0) || !std::isfinite(gamma_)) {
    throw DomainError("gamma must be finite and > 1, got " +
                      std::to_string(gamma_));
  }
  const Index n0 = hypotheses_.front().A.rows();
  const Index m0 = hypotheses_.front().B.cols();
  for (std::size_t i = 0; i < hypotheses_.size(); ++i) {
    const Hypothesis& h = hypotheses_[i];
    try {
      h.validate();
    } catch (const ShapeError& e) {
      throw ShapeError("hypothesis " + std::to_string(i) + ": " + e.what());
    } catch (const DomainError& e) {
      throw DomainError("hypothesis " + std::to_string(i) + ": " + e.what());
    }
    if (h.n() != n0 || h.m() != m0) {
      throw ShapeError("hypothesis " + std::to_string(i) + " has (n,m)=(" +
                       std::to_string(h.n()) + "," + std::to_string(h.m()) +
                       "), expected (" + std::to_string(n0) + "," +
                       std::to_string(m0) + ")");
    }
  }
}

std::vector<SMatrix> ScenarioSet::s_matrices() const {
  std::vector<SMatrix> out;
  out.reserve(hypotheses_.size());
  for (const Hypothesis& h : hypotheses_) out.push_back(build_S(h, gamma_));
  return out;
}

ScenarioSet ScenarioSet::with_gamma(double gamma) const {
  return ScenarioSet(hypotheses_, gamma);
}

double gamma_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw DomainError("alpha must be finite and >= 0");
  }
  return alpha + std::sqrt(1.0 + alpha * alpha);
}

ModelClassSpec ModelClassSpec::from_alpha(double alpha) {
  return ModelClassSpec{alpha, macs::gamma_alpha(alpha)};
}

SMatrix build_S(const Hypothesis& h, double gamma) {
  h.validate(std::numeric_limits<double>::infinity());
  const Index n = h.n();
  const Index m = h.m();
  MatrixXd L(n, 2 * n + m);
  L << h.A, h.B, -MatrixXd::Identity(n, n);
  MatrixXd S = -(gamma * gamma) * (L.transpose() * L);
  S.topLeftCorner(n + m, n + m) += h.M;
  return SMatrix{symmetrize(S)};
}

double stage_payoff(const Hypothesis& h, double gamma, const VectorXd& x,
                    const VectorXd& u, const VectorXd& xplus) {
  if (x.size() != h.n() || u.size() != h.m() || xplus.size() != h.n()) {
    throw ShapeError("stage_payoff: vector sizes do not match (n, m, n)");
  }
  const VectorXd xu = stack(x, u);
  const VectorXd residual = h.A * x + h.B * u - xplus;
  return xu.dot(h.M * xu) - gamma * gamma * residual.squaredNorm();
}

MembershipReport membership_check(const Hypothesis& h,
                                  const ModelClassSpec& spec,
                                  const MembershipOptions& options) {
  h.validate(options.tol);
  const double g = spec.gamma_alpha;
  if (!(g > 1.0)) {
    throw DegenerateGainError(
        "gamma_alpha <= 1: adversary completion of squares is unbounded");
  }
  const Index n = h.n();
  const Index m = h.m();
  const double tol = options.tol;

  MembershipReport r;
  const MatrixXd AtA = h.A.transpose() * h.A;
  r.spectral_margin = spec.alpha * spec.alpha - max_eigenvalue(AtA);
  r.spectral_ok = r.spectral_margin >= -tol;

  r.isometry_error =
      (h.B.transpose() * h.B - MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
  r.isometry_ok = r.isometry_error <= tol;

  MatrixXd AB(n, n + m);
  AB << h.A, h.B;
  r.Q = symmetrize(h.M + AB.transpose() * AB / (1.0 - 1.0 / (g * g)));
  const MatrixXd Quu = r.Q.bottomRightCorner(m, m);
  if (min_eigenvalue(Quu) <= tol) {
    throw IndefiniteError("Q_uu is singular: the minimizing input is not unique",
                          min_eigenvector(Quu));
  }
  const MatrixXd Qxu = r.Q.topRightCorner(n, m);
  r.schur = symmetrize(r.Q.topLeftCorner(n, n) -
                       Qxu * Quu.ldlt().solve(Qxu.transpose()));
  r.schur_margin = 1.0 - max_eigenvalue(r.schur);
  r.riccati_ok = r.schur_margin >= -tol;

  r.member = r.spectral_ok && r.isometry_ok && r.riccati_ok;
  if (!r.spectral_ok) {
    r.failing = "spectral bound A^T A <= alpha^2 I";
  } else if (!r.isometry_ok) {
    r.failing = "input isometry B^T B = I";
  } else if (!r.riccati_ok) {
    r.failing = "stage cost bound (Schur complement <= I)";
  }
  return r;
}

}  // namespace macs
