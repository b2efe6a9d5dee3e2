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

// Solvers for min_{W >= mu mu^T} max_j a_j + b_j^T mu + <C_j, W>.
//
// m == 1: phi(mu) = min_{W >= mu^2} max_j (a_j + b_j mu) + c_j W is convex in
// mu (partial minimization of a jointly convex function). For fixed mu the
// inner problem is a walk along the upper envelope of lines in W, and mu is
// found by golden section inside a bracket derived from the pieces with
// nonnegative curvature.
//
// m > 1: log-barrier interior point method on (t, mu, W) with the LMI
// [[1, mu^T], [mu, W]] >= 0.

#include <algorithm>
#include <cmath>
#include <limits>

#include "macs/errors.hpp"
#include "macs/games.hpp"

namespace macs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ScalarPieces {
  const double* a;
  const double* b;
  const double* c;
  std::size_t J;
};

// min over W >= mu^2 of max_j (a_j + b_j mu) + c_j W.
double inner_min_w(const ScalarPieces& p, double mu, double* w_out) {
  const double w0 = mu * mu;
  std::size_t j = 0;
  double top = -kInf;
  for (std::size_t k = 0; k < p.J; ++k) {
    const double v = p.a[k] + p.b[k] * mu + p.c[k] * w0;
    if (v > top) {
      top = v;
      j = k;
    }
  }
  const double tie = 1e-13 * (1.0 + std::abs(top));
  for (std::size_t k = 0; k < p.J; ++k) {
    const double v = p.a[k] + p.b[k] * mu + p.c[k] * w0;
    if (v >= top - tie && p.c[k] > p.c[j]) j = k;
  }

  double W = w0;
  for (std::size_t iter = 0; iter <= p.J && p.c[j] < 0.0; ++iter) {
    const double lead = p.a[j] + p.b[j] * mu + p.c[j] * W;
    double next_w = kInf;
    std::size_t next = p.J;
    for (std::size_t k = 0; k < p.J; ++k) {
      if (p.c[k] <= p.c[j]) continue;
      const double gap = lead - (p.a[k] + p.b[k] * mu + p.c[k] * W);
      const double wk = W + std::max(gap, 0.0) / (p.c[k] - p.c[j]);
      if (wk < next_w || (wk == next_w && next < p.J && p.c[k] > p.c[next])) {
        next_w = wk;
        next = k;
      }
    }
    if (next == p.J) {
      if (w_out) *w_out = kInf;
      return -kInf;
    }
    W = next_w;
    j = next;
  }

  double value = -kInf;
  for (std::size_t k = 0; k < p.J; ++k) {
    value = std::max(value, p.a[k] + p.b[k] * mu + p.c[k] * W);
  }
  if (w_out) *w_out = W;
  return value;
}

MomentSolution unbounded(Index m, double mu_dir) {
  MomentSolution s;
  s.bounded = false;
  s.value = -kInf;
  s.mu_direction = VectorXd::Constant(m, mu_dir);
  s.w_direction = MatrixXd::Identity(m, m);
  return s;
}

MomentSolution solve_scalar(const ScalarPieces& p, double rel_tol) {
  double c_max = -kInf;
  for (std::size_t k = 0; k < p.J; ++k) c_max = std::max(c_max, p.c[k]);
  if (c_max < 0.0) return unbounded(1, 0.0);

  const double phi0 = inner_min_w(p, 0.0, nullptr);
  if (!std::isfinite(phi0)) return unbounded(1, 0.0);

  // Outside [lo, hi] some piece with c_j >= 0 already exceeds phi(0), hence
  // so does phi.
  double hi = kInf;
  double lo = -kInf;
  bool right_open = false;  // phi nonincreasing to a finite limit on the right
  bool left_open = false;
  bool right_bounded = false;
  bool left_bounded = false;
  for (std::size_t k = 0; k < p.J; ++k) {
    const double a = p.a[k] - phi0;
    const double b = p.b[k];
    const double c = p.c[k];
    if (c > 0.0) {
      const double disc = std::max(b * b - 4.0 * c * a, 0.0);
      const double sq = std::sqrt(disc);
      hi = std::min(hi, (-b + sq) / (2.0 * c));
      lo = std::max(lo, (-b - sq) / (2.0 * c));
      right_bounded = left_bounded = true;
    } else if (c == 0.0) {
      if (b > 0.0) {
        hi = std::min(hi, -a / b);
        right_bounded = true;
      } else if (b < 0.0) {
        lo = std::max(lo, -a / b);
        left_bounded = true;
      } else {
        right_open = left_open = true;
      }
    }
  }
  if (!right_bounded && !right_open) return unbounded(1, 1.0);
  if (!left_bounded && !left_open) return unbounded(1, -1.0);
  double finite_scale = 1.0;
  if (std::isfinite(hi)) finite_scale = std::max(finite_scale, std::abs(hi));
  if (std::isfinite(lo)) finite_scale = std::max(finite_scale, std::abs(lo));
  if (!std::isfinite(hi)) hi = 10.0 * finite_scale;
  if (!std::isfinite(lo)) lo = -10.0 * finite_scale;
  hi = std::max(hi, 0.0);
  lo = std::min(lo, 0.0);

  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = inner_min_w(p, x1, nullptr);
  double f2 = inner_min_w(p, x2, nullptr);
  for (int it = 0;
       it < 200 && hi - lo > rel_tol * (1.0 + 0.5 * std::abs(lo + hi)); ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = inner_min_w(p, x1, nullptr);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = inner_min_w(p, x2, nullptr);
    }
  }
  double mu = 0.5 * (lo + hi);
  double W = 0.0;
  double value = inner_min_w(p, mu, &W);
  // Prefer the canonical decision mu = 0 among (numerically) tied minimizers.
  if (phi0 <= value + 1e-13 * (1.0 + std::abs(value))) {
    mu = 0.0;
    value = inner_min_w(p, 0.0, &W);
  }

  MomentSolution s;
  s.method = MomentMethod::kScalar;
  s.moments.mu = scalar_vector(mu);
  s.moments.W = scalar_matrix(W);
  s.value = value;
  return s;
}

// Log-barrier method for general m.
MomentSolution solve_barrier(const MomentProblem& p, double gap_tol) {
  const Index m = p.m();
  const Index J = p.pieces();
  const Index nw = m * (m + 1) / 2;
  const Index dim = 1 + m + nw;

  std::vector<std::pair<Index, Index>> widx;
  for (Index k = 0; k < m; ++k) {
    for (Index l = k; l < m; ++l) widx.emplace_back(k, l);
  }

  MatrixXd G(J, dim);
  double scale = 1.0;
  for (Index j = 0; j < J; ++j) {
    G(j, 0) = 1.0;
    for (Index k = 0; k < m; ++k) G(j, 1 + k) = -p.b(j, k);
    for (Index e = 0; e < nw; ++e) {
      const auto [k, l] = widx[e];
      G(j, 1 + m + e) = (k == l) ? -p.C[j](k, k) : -2.0 * p.C[j](k, l);
    }
    scale = std::max(scale, std::abs(p.a(j)));
    scale = std::max(scale, G.row(j).tail(dim - 1).cwiseAbs().maxCoeff());
  }

  std::vector<MatrixXd> basis(dim, MatrixXd::Zero(m + 1, m + 1));
  for (Index k = 0; k < m; ++k) {
    basis[1 + k](0, k + 1) = basis[1 + k](k + 1, 0) = 1.0;
  }
  for (Index e = 0; e < nw; ++e) {
    const auto [k, l] = widx[e];
    basis[1 + m + e](k + 1, l + 1) = 1.0;
    basis[1 + m + e](l + 1, k + 1) = 1.0;
  }

  auto unpack = [&](const VectorXd& th, VectorXd& mu, MatrixXd& W) {
    mu = th.segment(1, m);
    W.resize(m, m);
    for (Index e = 0; e < nw; ++e) {
      const auto [k, l] = widx[e];
      W(k, l) = W(l, k) = th(1 + m + e);
    }
  };
  auto lmi = [&](const VectorXd& th) {
    MatrixXd F(m + 1, m + 1);
    VectorXd mu;
    MatrixXd W;
    unpack(th, mu, W);
    F(0, 0) = 1.0;
    F.block(0, 1, 1, m) = mu.transpose();
    F.block(1, 0, m, 1) = mu;
    F.block(1, 1, m, m) = W;
    return F;
  };

  VectorXd theta = VectorXd::Zero(dim);
  double t0 = -kInf;
  for (Index j = 0; j < J; ++j) t0 = std::max(t0, p.a(j) + p.C[j].trace());
  theta(0) = t0 + 1.0;
  for (Index e = 0; e < nw; ++e) {
    if (widx[e].first == widx[e].second) theta(1 + m + e) = 1.0;
  }

  auto barrier = [&](const VectorXd& th, double tau, bool* ok) {
    const VectorXd s = G * th - p.a;
    if (s.minCoeff() <= 0.0) {
      *ok = false;
      return kInf;
    }
    Eigen::LLT<MatrixXd> llt(lmi(th));
    if (llt.info() != Eigen::Success) {
      *ok = false;
      return kInf;
    }
    const MatrixXd L = llt.matrixL();
    double logdet = 0.0;
    for (Index i = 0; i < L.rows(); ++i) {
      if (!(L(i, i) > 0.0)) {
        *ok = false;
        return kInf;
      }
      logdet += 2.0 * std::log(L(i, i));
    }
    *ok = true;
    return tau * th(0) - s.array().log().sum() - logdet;
  };

  const double nu = static_cast<double>(J + m + 1);
  double tau = 1.0 / scale;
  const double blowup = -1e10 * scale;
  for (int outer = 0; outer < 80; ++outer) {
    for (int newton = 0; newton < 200; ++newton) {
      const VectorXd s = G * theta - p.a;
      const MatrixXd Finv = lmi(theta).inverse();
      VectorXd grad = -G.transpose() * s.cwiseInverse();
      grad(0) += tau;
      MatrixXd H = G.transpose() * s.cwiseInverse().cwiseAbs2().asDiagonal() * G;
      std::vector<MatrixXd> FiB(dim);
      for (Index i = 0; i < dim; ++i) FiB[i] = Finv * basis[i];
      for (Index i = 1; i < dim; ++i) {
        grad(i) -= FiB[i].trace();
        for (Index k = i; k < dim; ++k) {
          const double h = (FiB[i] * FiB[k]).trace();
          H(i, k) += h;
          if (k != i) H(k, i) += h;
        }
      }
      const VectorXd step = -H.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (!(decrement > 2e-12)) break;
      bool ok = false;
      const double f0 = barrier(theta, tau, &ok);
      double alpha = 1.0;
      for (int ls = 0; ls < 80; ++ls) {
        const double f1 = barrier(theta + alpha * step, tau, &ok);
        if (ok && f1 <= f0 - 0.25 * alpha * decrement) break;
        alpha *= 0.5;
      }
      if (!ok) break;
      theta += alpha * step;
      if (theta(0) < blowup) {
        VectorXd mu;
        MatrixXd W;
        unpack(theta, mu, W);
        MomentSolution sol;
        sol.bounded = false;
        sol.value = -kInf;
        sol.method = MomentMethod::kInteriorPoint;
        const double norm = std::max(1.0, std::sqrt(mu.squaredNorm() + W.squaredNorm()));
        sol.mu_direction = mu / norm;
        sol.w_direction = W / norm;
        return sol;
      }
    }
    if (nu / tau < gap_tol * (1.0 + std::abs(theta(0)))) break;
    tau *= 8.0;
  }

  MomentSolution sol;
  sol.method = MomentMethod::kInteriorPoint;
  unpack(theta, sol.moments.mu, sol.moments.W);
  sol.value = moment_objective(p, sol.moments.mu, sol.moments.W);
  return sol;
}

}  // namespace

double moment_objective(const MomentProblem& p, const VectorXd& mu,
                        const MatrixXd& W) {
  double best = -kInf;
  for (Index j = 0; j < p.pieces(); ++j) {
    best = std::max(best, p.a(j) + p.b.row(j).dot(mu) + frobenius_inner(p.C[j], W));
  }
  return best;
}

MomentSolution solve_moment_problem(const MomentProblem& p,
                                    const MomentSolverOptions& options) {
  if (p.pieces() == 0) throw InvalidConeError("moment problem has no pieces");
  if (p.b.rows() != p.pieces() || static_cast<Index>(p.C.size()) != p.pieces()) {
    throw ShapeError("moment problem pieces are inconsistent");
  }
  if (p.m() == 1 && !options.force_interior_point) {
    std::vector<double> c(p.pieces());
    for (Index j = 0; j < p.pieces(); ++j) c[j] = p.C[j](0, 0);
    const VectorXd b = p.b.col(0);
    return solve_scalar({p.a.data(), b.data(), c.data(),
                         static_cast<std::size_t>(p.pieces())},
                        options.scalar_tol);
  }
  return solve_barrier(p, options.barrier_gap);
}

VectorXd inner_multipliers(const MomentProblem& p,
                           const MomentSolverOptions& options, double rel_step) {
  const MomentSolution base = solve_moment_problem(p, options);
  if (!base.bounded) {
    throw UnboundedError("moment problem is unbounded below", base.mu_direction,
                         base.w_direction);
  }
  // The optimal value is convex in a and its subgradients are the optimal
  // multipliers; a central difference averages two of them.
  const double h = rel_step * (1.0 + std::abs(base.value) + p.a.cwiseAbs().maxCoeff());
  const Index J = p.pieces();
  VectorXd lambda(J);
  MomentProblem q = p;
  for (Index j = 0; j < J; ++j) {
    q.a(j) = p.a(j) + h;
    const double up = solve_moment_problem(q, options).value;
    q.a(j) = p.a(j) - h;
    const double down = solve_moment_problem(q, options).value;
    q.a(j) = p.a(j);
    lambda(j) = std::clamp((up - down) / (2.0 * h), 0.0, 1.0);
  }
  const double total = lambda.sum();
  if (!(total > 0.0)) throw DomainError("inner multipliers vanish");
  return lambda / total;
}

// Exposed for the scalar fast path in games.cpp.
MomentSolution solve_scalar_pieces(const double* a, const double* b,
                                   const double* c, std::size_t J,
                                   double rel_tol) {
  return solve_scalar({a, b, c, J}, rel_tol);
}

std::vector<DecisionAtom> decision_support(const PolicyMoments& p, double tol) {
  const Index m = p.mu.size();
  if (p.W.rows() != m || p.W.cols() != m) {
    throw ShapeError("decision moments: W must be m x m");
  }
  const MatrixXd sigma = symmetrize(p.W - p.mu * p.mu.transpose());
  const double s_tol = tol * std::max(1.0, p.W.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sigma);
  const VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() < -s_tol) {
    throw RealizabilityError("W - mu mu^T is indefinite: no law has these moments");
  }
  std::vector<Index> dirs;
  for (Index k = ev.size() - 1; k >= 0; --k) {
    if (ev(k) > s_tol) dirs.push_back(k);
  }
  if (dirs.empty()) return {DecisionAtom{1.0, p.mu}};
  const double r = static_cast<double>(dirs.size());
  std::vector<DecisionAtom> atoms;
  for (Index k : dirs) {
    const VectorXd d = std::sqrt(r * ev(k)) * es.eigenvectors().col(k);
    atoms.push_back({0.5 / r, p.mu + d});
    atoms.push_back({0.5 / r, p.mu - d});
  }
  return atoms;
}

VectorXd realize_decision(const PolicyMoments& p, Rng& rng, double tol) {
  const std::vector<DecisionAtom> atoms = decision_support(p, tol);
  const std::uint64_t draw = rng();
  return atoms[draw % atoms.size()].u;
}

}  // namespace macs
