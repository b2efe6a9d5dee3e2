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

#include "macs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "macs/errors.hpp"
#include "macs/games.hpp"
#include "macs/matrix_game.hpp"
#include "macs/parallel.hpp"

namespace macs {
namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = 0.5 * (lo + hi);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

struct Scalar {
  double a, b, mxx, mxu, muu;
};

std::vector<Scalar> scalars(const ScenarioSet& sc) {
  std::vector<Scalar> out;
  for (const Hypothesis& h : sc.hypotheses()) {
    out.push_back({h.A(0, 0), h.B(0, 0), h.M(0, 0), h.M(0, 1), h.M(1, 1)});
  }
  return out;
}

double payoff(const Scalar& h, double g2, double x, double u, double xp) {
  const double r = h.a * x + h.b * u - xp;
  return h.mxx * x * x + 2.0 * h.mxu * x * u + h.muu * u * u - g2 * r * r;
}

void require_scalar(const ScenarioSet& sc, int T) {
  if (sc.n() != 1 || sc.m() != 1) {
    throw ConfigError("oracle supports scalar instances only (n = m = 1)");
  }
  if (T < 0 || T > 4) throw ConfigError("oracle horizon must be in [0, 4]");
}

// Next states reachable from (x, u): one per (hypothesis, atom).
std::vector<double> next_states(const std::vector<Scalar>& hs,
                                const std::vector<double>& ws, double x, double u) {
  std::vector<double> out;
  out.reserve(hs.size() * ws.size());
  for (const Scalar& h : hs) {
    for (double w : ws) out.push_back(h.a * x + h.b * u + w);
  }
  return out;
}

// Tensor grid over (x, d_1, ..., d_{K-1}) with multilinear interpolation that
// saturates outside the box.
class StateGrid {
 public:
  StateGrid(double x_clip, int x_points, int d_dims, double d_range, int d_points) {
    axes_.push_back(linspace(-x_clip, x_clip, x_points));
    for (int k = 0; k < d_dims; ++k) axes_.push_back(linspace(-d_range, d_range, d_points));
    total_ = 1;
    for (const auto& ax : axes_) {
      strides_.push_back(total_);
      total_ *= ax.size();
    }
  }

  std::size_t size() const { return total_; }
  int dims() const { return static_cast<int>(axes_.size()); }

  std::vector<double> node(std::size_t id) const {
    std::vector<double> p(axes_.size());
    for (std::size_t k = 0; k < axes_.size(); ++k) {
      p[k] = axes_[k][id % axes_[k].size()];
      id /= axes_[k].size();
    }
    return p;
  }

  double interpolate(const std::vector<double>& values, const std::vector<double>& p) const {
    const int D = dims();
    std::size_t lo[8];
    double frac[8];
    for (int k = 0; k < D; ++k) {
      const std::vector<double>& ax = axes_[k];
      const std::size_t n = ax.size();
      if (n == 1) {
        lo[k] = 0;
        frac[k] = 0.0;
        continue;
      }
      const double h = (ax.back() - ax.front()) / static_cast<double>(n - 1);
      const double pos = std::clamp((p[k] - ax.front()) / h, 0.0, static_cast<double>(n - 1));
      std::size_t i = static_cast<std::size_t>(pos);
      if (i >= n - 1) i = n - 2;
      lo[k] = i;
      frac[k] = pos - static_cast<double>(i);
    }
    double out = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << D); ++corner) {
      double w = 1.0;
      std::size_t id = 0;
      for (int k = 0; k < D; ++k) {
        const bool up = (corner >> k) & 1;
        w *= up ? frac[k] : 1.0 - frac[k];
        id += (lo[k] + (up ? 1 : 0)) * strides_[k];
      }
      if (w != 0.0) out += w * values[id];
    }
    return out;
  }

 private:
  std::vector<std::vector<double>> axes_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

double terminal(const double* d, int count) {
  double best = 0.0;
  for (int k = 0; k < count; ++k) best = std::max(best, d[k]);
  return best;
}

OracleResult solve_on_grid(const ScenarioSet& sc, int T, const OracleGrids& g,
                           int x_points, int d_points) {
  const std::vector<Scalar> hs = scalars(sc);
  const double g2 = sc.gamma() * sc.gamma();
  const int K = static_cast<int>(hs.size());
  if (K > 7) throw ConfigError("oracle supports at most 7 hypotheses");
  const std::vector<double> us = g.u_grid();
  const std::vector<double> ws = g.w_grid();
  const int nu = static_cast<int>(us.size());
  const int nb = K * static_cast<int>(ws.size());
  const StateGrid grid(g.x_clip, x_points, K - 1, g.d_range, d_points);

  // Stage value at (x, d) given the next slice (or the terminal payoff).
  auto stage = [&](double x, const double* d, const std::vector<double>* next,
                   MatrixGameSolution* sol) {
    MatrixXd P(nu, nb);
    std::vector<double> s(K);
    std::vector<double> p(K);
    for (int a = 0; a < nu; ++a) {
      const std::vector<double> xps = next_states(hs, ws, x, us[a]);
      for (int b = 0; b < nb; ++b) {
        for (int i = 0; i < K; ++i) s[i] = payoff(hs[i], g2, x, us[a], xps[b]);
        p[0] = xps[b];
        for (int k = 0; k < K - 1; ++k) p[k + 1] = d[k] + s[k + 1] - s[0];
        const double cont =
            next == nullptr ? terminal(p.data() + 1, K - 1) : grid.interpolate(*next, p);
        P(a, b) = s[0] + cont;
      }
    }
    if (g.visibility == DrawVisibility::kHidden) {
      MatrixGameSolution r = solve_matrix_game(P);
      if (sol != nullptr) *sol = r;
      return r.value;
    }
    const VectorXd worst = P.rowwise().maxCoeff();
    Index best = 0;
    worst.minCoeff(&best);
    if (sol != nullptr) {
      sol->value = worst(best);
      sol->row_strategy = VectorXd::Zero(nu);
      sol->row_strategy(best) = 1.0;
      Index col = 0;
      P.row(best).maxCoeff(&col);
      sol->col_strategy = VectorXd::Zero(nb);
      sol->col_strategy(col) = 1.0;
    }
    return worst(best);
  };

  OracleResult out;
  if (T == 0) {
    out.root_strategy.assign(nu, 0.0);
    return out;
  }
  // Slices t = T-1 down to 1 on the full grid; t = 0 only at the root.
  std::vector<double> next;
  bool have_next = false;
  for (int t = T - 1; t >= 1; --t) {
    std::vector<double> cur(grid.size());
    parallel_for(cur.size(), [&](std::size_t id) {
      const std::vector<double> node = grid.node(id);
      cur[id] = stage(node[0], node.data() + 1, have_next ? &next : nullptr, nullptr);
    });
    next = std::move(cur);
    have_next = true;
  }
  MatrixGameSolution root;
  const std::vector<double> zero(K, 0.0);
  out.value = stage(0.0, zero.data(), have_next ? &next : nullptr, &root);
  out.root_strategy.assign(root.row_strategy.data(),
                           root.row_strategy.data() + root.row_strategy.size());
  return out;
}

double worst_case_rec(const ValueCone& cone, const std::vector<Scalar>& hs, double g2,
                      const std::vector<double>& ws, bool visible, int steps_left,
                      const DataMoment& Z, double x, const std::vector<double>& c) {
  if (steps_left == 0) return *std::max_element(c.begin(), c.end());
  const PolicyResult pol = policy_moments(cone, Z, scalar_vector(x));
  const std::vector<DecisionAtom> law = decision_support(pol.moments);
  // table[k][b]: continuation after decision atom k and adversary action b.
  std::vector<std::vector<double>> table(law.size());
  std::vector<double> nc(c.size());
  for (std::size_t k = 0; k < law.size(); ++k) {
    const double u = law[k].u(0);
    for (double xp : next_states(hs, ws, x, u)) {
      for (std::size_t i = 0; i < hs.size(); ++i) nc[i] = c[i] + payoff(hs[i], g2, x, u, xp);
      const DataMoment Zn = update_Z(Z, scalar_vector(x), law[k].u, scalar_vector(xp));
      table[k].push_back(worst_case_rec(cone, hs, g2, ws, visible, steps_left - 1, Zn, xp, nc));
    }
  }
  if (visible) {
    double expected = 0.0;
    for (std::size_t k = 0; k < law.size(); ++k) {
      expected += law[k].probability * *std::max_element(table[k].begin(), table[k].end());
    }
    return expected;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < table[0].size(); ++b) {
    double expected = 0.0;
    for (std::size_t k = 0; k < law.size(); ++k) expected += law[k].probability * table[k][b];
    best = std::max(best, expected);
  }
  return best;
}

}  // namespace

void OracleGrids::validate() const {
  if (u_atoms < 1 || u_atoms > 41 || w_atoms < 1 || w_atoms > 41) {
    throw ConfigError("oracle atom counts must lie in [1, 41]");
  }
  if (!(u_clip >= 0.0) || !(w_clip >= 0.0)) throw ConfigError("oracle clips must be >= 0");
  if (!(x_clip > 0.0) || x_points < 3) {
    throw ConfigError("oracle state grid needs a positive range and >= 3 points");
  }
  if (!(d_range > 0.0) || d_points < 3) {
    throw ConfigError("oracle difference grid needs a positive range and >= 3 points");
  }
  if (!(tol > 0.0)) throw ConfigError("oracle tolerance must be positive");
}

std::vector<double> OracleGrids::u_grid() const { return linspace(-u_clip, u_clip, u_atoms); }
std::vector<double> OracleGrids::w_grid() const { return linspace(-w_clip, w_clip, w_atoms); }

OracleResult exact_game_value(const ScenarioSet& scenarios, int T,
                              const OracleGrids& grids) {
  require_scalar(scenarios, T);
  grids.validate();
  OracleResult fine = solve_on_grid(scenarios, T, grids, grids.x_points, grids.d_points);
  if (T > 1) {
    const double coarse = solve_on_grid(scenarios, T, grids, (grids.x_points + 1) / 2,
                                        (grids.d_points + 1) / 2)
                              .value;
    fine.error_estimate = std::abs(fine.value - coarse);
    if (fine.error_estimate > grids.tol) {
      throw AccuracyError("oracle interpolation error estimate " +
                          std::to_string(fine.error_estimate) + " exceeds tolerance " +
                          std::to_string(grids.tol));
    }
  }
  return fine;
}

double controller_worst_case(const ScenarioSet& scenarios, const ValueCone& cone,
                             int T, const OracleGrids& grids) {
  require_scalar(scenarios, T);
  grids.validate();
  if (cone.n() != 1 || cone.m() != 1) throw ShapeError("cone must be scalar");
  const std::vector<Scalar> hs = scalars(scenarios);
  const double g2 = scenarios.gamma() * scenarios.gamma();
  return worst_case_rec(cone, hs, g2, grids.w_grid(),
                        grids.visibility == DrawVisibility::kVisible, T, DataMoment(1, 1),
                        0.0, std::vector<double>(hs.size(), 0.0));
}

}  // namespace macs
