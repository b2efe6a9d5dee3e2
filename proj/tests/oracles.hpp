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

// Independent reference computations used by the tests. Nothing here calls
// the solver being checked; each oracle works from the raw matrices with
// plain loops, grids or exhaustive enumeration.

#ifndef MACS_TESTS_ORACLES_HPP_
#define MACS_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "macs/linalg.hpp"
#include "macs/model.hpp"
#include "macs/valuefn.hpp"

namespace macs::oracle_ref {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Quadratic form by explicit loops.
inline double quad(const MatrixXd& Q, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) s += v[i] * Q(i, j) * v[j];
  return s;
}

inline double trace_inner(const MatrixXd& S, const MatrixXd& Z) {
  double s = 0.0;
  for (Index i = 0; i < S.rows(); ++i)
    for (Index j = 0; j < S.cols(); ++j) s += S(i, j) * Z(i, j);
  return s;
}

// Every vertex value <S, Z> + |(x,u)|^2_Q, enumerated.
inline std::vector<double> enumerate_vertex_values(const ValueCone& cone, const MatrixXd& Z,
                                                   const std::vector<double>& xu) {
  std::vector<double> out;
  for (const ValueVertex& v : cone.vertices()) out.push_back(trace_inner(v.S, Z) + quad(v.Q, xu));
  return out;
}

inline double enumerate_value(const ValueCone& cone, const MatrixXd& Z,
                              const std::vector<double>& xu) {
  const std::vector<double> v = enumerate_vertex_values(cone, Z, xu);
  return *std::max_element(v.begin(), v.end());
}

// Scalar decision pieces a_j + b_j mu + c_j W of the policy program at (Z, x).
struct Pieces {
  std::vector<double> a, b, c;
};

inline Pieces scalar_pieces(const ValueCone& cone, const MatrixXd& Z, double x) {
  Pieces p;
  for (const ValueVertex& v : cone.vertices()) {
    p.a.push_back(trace_inner(v.S, Z) + v.Q(0, 0) * x * x);
    p.b.push_back(2.0 * v.Q(0, 1) * x);
    p.c.push_back(v.Q(1, 1));
  }
  return p;
}

struct GridMin {
  double value = kInf;
  double mu = 0.0;
  double W = 0.0;
};

// min over (mu, s) in [-mu_box, mu_box] x [0, s_box] of the max piece, with
// W = mu^2 + s, on a uniform grid.
inline GridMin grid_policy_value(const Pieces& p, double step, double mu_box = 3.0,
                                 double s_box = 3.0) {
  GridMin best;
  const long nm = std::lround(2.0 * mu_box / step);
  const long ns = std::lround(s_box / step);
  for (long i = 0; i <= nm; ++i) {
    const double mu = -mu_box + step * static_cast<double>(i);
    for (long k = 0; k <= ns; ++k) {
      const double W = mu * mu + step * static_cast<double>(k);
      double g = -kInf;
      for (std::size_t j = 0; j < p.a.size(); ++j) g = std::max(g, p.a[j] + p.b[j] * mu + p.c[j] * W);
      if (g < best.value) best = {g, mu, W};
    }
  }
  return best;
}

// Deterministic decisions only (W = u^2): min over u of the max piece.
inline GridMin grid_deterministic_value(const Pieces& p, double step, double box = 3.0) {
  GridMin best;
  const long nu = std::lround(2.0 * box / step);
  for (long i = 0; i <= nu; ++i) {
    const double u = -box + step * static_cast<double>(i);
    double g = -kInf;
    for (std::size_t j = 0; j < p.a.size(); ++j) g = std::max(g, p.a[j] + p.b[j] * u + p.c[j] * u * u);
    if (g < best.value) best = {g, u, u * u};
  }
  return best;
}

// min over u of max over zeta of |(x,u)|^2_M + |zeta|^2 - g^2 |a x + b u - zeta|^2
// on uniform grids (scalar hypothesis).
inline double grid_min_max_stage(double a, double b, const MatrixXd& M, double g, double x,
                                 double u_box, double z_box, double step) {
  double best = kInf;
  const long nu = std::lround(2.0 * u_box / step);
  const long nz = std::lround(2.0 * z_box / step);
  const double g2 = g * g;
  for (long i = 0; i <= nu; ++i) {
    const double u = -u_box + step * static_cast<double>(i);
    const double base = M(0, 0) * x * x + 2.0 * M(0, 1) * x * u + M(1, 1) * u * u;
    const double c = a * x + b * u;
    double worst = -kInf;
    for (long k = 0; k <= nz; ++k) {
      const double z = -z_box + step * static_cast<double>(k);
      worst = std::max(worst, z * z - g2 * (c - z) * (c - z));
    }
    best = std::min(best, base + worst);
  }
  return best;
}

// Maximum of a function on [lo, hi]: dense grid, then golden section around
// the best node.
inline double grid_then_golden_max(const std::function<double(double)>& f, double lo, double hi,
                                   int nodes, double* argmax = nullptr) {
  const double h = (hi - lo) / nodes;
  double bx = lo, bv = -kInf;
  for (int i = 0; i <= nodes; ++i) {
    const double z = lo + h * i;
    const double v = f(z);
    if (v > bv) { bv = v; bx = z; }
  }
  double l = bx - h, r = bx + h;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200 && r - l > 1e-13; ++it) {
    const double m1 = r - phi * (r - l), m2 = l + phi * (r - l);
    if (f(m1) < f(m2)) l = m1; else r = m2;
  }
  const double z = 0.5 * (l + r);
  const double v = f(z);
  if (v > bv) { bv = v; bx = z; }
  if (argmax != nullptr) *argmax = bx;
  return bv;
}

// Frozen-weight right side for scalar (n = m = 1) cones: with the weights
// lambda fixed, the continuation is sum_j lambda_j (<S_j, Z + v v^T> +
// |(zeta, nu)|^2_{Q_j}) with nu minimized out and zeta maximized over a box.
// Returns -inf when the minimization is unbounded.
inline double frozen_rhs(const ValueCone& cone, const std::vector<double>& lambda,
                         const MatrixXd& Z, double x, double u, double box) {
  auto at = [&](double zeta) {
    double a = 0.0, b = 0.0, c = 0.0;
    std::vector<double> v3 = {x, u, zeta};
    for (std::size_t j = 0; j < cone.size(); ++j) {
      const ValueVertex& vx = cone.vertices()[j];
      a += lambda[j] * (trace_inner(vx.S, Z) + quad(vx.S, v3) + vx.Q(0, 0) * zeta * zeta);
      b += lambda[j] * 2.0 * vx.Q(0, 1) * zeta;
      c += lambda[j] * vx.Q(1, 1);
    }
    // Weights recovered numerically leave O(1e-7) noise in a decision
    // direction that is flat at the exact weights.
    if (c > 1e-6) return a - b * b / (4.0 * c);
    if (c > -1e-6 && std::abs(b) <= 1e-4 * (1.0 + std::abs(a))) return a;
    return -kInf;
  };
  return grid_then_golden_max(at, -box, box, 4000);
}

// Exhaustive finite-horizon game on a state-free tree for scalar scenarios:
// the state and every accumulated payoff are carried exactly, so no
// interpolation is involved. Visible draws: the adversary names (i, w) after
// seeing the decision atom. Returns the value from x = 0, c = 0.
inline double tree_game_value_visible(const ScenarioSet& sc, int T, const std::vector<double>& us,
                                      const std::vector<double>& ws) {
  const double g = sc.gamma();
  std::function<double(double, std::vector<double>, int)> rec =
      [&](double x, std::vector<double> c, int t) -> double {
    if (t == T) return *std::max_element(c.begin(), c.end());
    double best = kInf;
    for (double u : us) {
      double worst = -kInf;
      for (std::size_t i = 0; i < sc.size(); ++i) {
        for (double w : ws) {
          const double xn = sc[i].A(0, 0) * x + sc[i].B(0, 0) * u + w;
          std::vector<double> cn = c;
          for (std::size_t k = 0; k < sc.size(); ++k) {
            const Hypothesis& h = sc[k];
            const double r = h.A(0, 0) * x + h.B(0, 0) * u - xn;
            cn[k] += h.M(0, 0) * x * x + 2.0 * h.M(0, 1) * x * u + h.M(1, 1) * u * u - g * g * r * r;
          }
          worst = std::max(worst, rec(xn, cn, t + 1));
        }
      }
      best = std::min(best, worst);
    }
    return best;
  };
  return rec(0.0, std::vector<double>(sc.size(), 0.0), 0);
}

inline std::vector<double> even_grid(int atoms, double clip) {
  std::vector<double> g;
  for (int i = 0; i < atoms; ++i)
    g.push_back(atoms == 1 ? 0.0 : -clip + 2.0 * clip * i / (atoms - 1));
  return g;
}

}  // namespace macs::oracle_ref

#endif  // MACS_TESTS_ORACLES_HPP_
