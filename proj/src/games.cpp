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

#include "macs/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "macs/errors.hpp"
#include "moment_internal.hpp"

namespace macs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string direction_text(const VectorXd& mu, const MatrixXd& W) {
  std::ostringstream os;
  os << "mu direction [" << mu.transpose() << "], W direction [";
  for (Index i = 0; i < W.rows(); ++i) {
    os << (i ? "; " : "") << W.row(i);
  }
  os << "]";
  return os.str();
}

}  // namespace

std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                     double lo, double hi, double tol) {
  double best_x = lo;
  double best_f = f(lo);
  auto consider = [&](double x, double v) {
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
  };
  if (!(hi > lo)) return {best_x, best_f};
  consider(hi, f(hi));
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  consider(x1, f1);
  consider(x2, f2);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
      consider(x1, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
      consider(x2, f2);
    }
  }
  return {best_x, best_f};
}

MomentProblem policy_problem(const ValueCone& cone, const DataMoment& Z,
                             const VectorXd& x) {
  if (cone.vertices().empty()) throw InvalidConeError("value cone is empty");
  const Index n = cone.n();
  const Index m = cone.m();
  if (Z.n() != n || Z.m() != m || x.size() != n) {
    throw ShapeError("policy_moments: dimensions do not match the cone");
  }
  const Index J = static_cast<Index>(cone.size());
  MomentProblem p;
  p.a.resize(J);
  p.b.resize(J, m);
  p.C.reserve(J);
  for (Index j = 0; j < J; ++j) {
    const ValueVertex& v = cone.vertices()[j];
    p.a(j) = frobenius_inner(v.S, Z.Z()) + x.dot(v.Q.topLeftCorner(n, n) * x);
    p.b.row(j) = (2.0 * v.Q.bottomLeftCorner(m, n) * x).transpose();
    p.C.push_back(v.Q.bottomRightCorner(m, m));
  }
  return p;
}

PolicyResult policy_moments(const ValueCone& cone, const DataMoment& Z,
                            const VectorXd& x,
                            const MomentSolverOptions& options) {
  const MomentSolution s = solve_moment_problem(policy_problem(cone, Z, x), options);
  if (!s.bounded) {
    throw UnboundedError("decision program is unbounded below along " +
                             direction_text(s.mu_direction, s.w_direction),
                         s.mu_direction, s.w_direction);
  }
  return PolicyResult{s.moments, s.value, s.method};
}

void SearchConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ConfigError("search step must be positive and finite");
  }
  if (!(box_scale > 0.0) || !std::isfinite(box_scale)) {
    throw ConfigError("search box scale must be positive and finite");
  }
  if (half_width && (!(*half_width >= 0.0) || !std::isfinite(*half_width))) {
    throw ConfigError("search half width must be finite and >= 0");
  }
  if (restarts < 0 || max_box_expansions < 0) {
    throw ConfigError("search restarts/expansions must be >= 0");
  }
  if (!(refine_tol > 0.0)) throw ConfigError("refine tolerance must be positive");
  if (max_grid_points == 0) throw ConfigError("grid point budget must be positive");
}

OneStepOperator::OneStepOperator(const ValueCone& cone, const DataMoment& Z,
                                 const VectorXd& x, const VectorXd& u,
                                 MomentSolverOptions options)
    : n_(cone.n()), m_(cone.m()), options_(options) {
  if (cone.vertices().empty()) throw InvalidConeError("value cone is empty");
  if (Z.n() != n_ || Z.m() != m_ || x.size() != n_ || u.size() != m_) {
    throw ShapeError("one-step operator: dimensions do not match the cone");
  }
  const Index np = n_ + m_;
  const VectorXd p = stack(x, u);
  for (const ValueVertex& v : cone.vertices()) {
    const MatrixXd Spp = v.S.topLeftCorner(np, np);
    const MatrixXd Szp = v.S.bottomLeftCorner(n_, np);
    const MatrixXd Szz = v.S.bottomRightCorner(n_, n_);
    base_.push_back(frobenius_inner(v.S, Z.Z()) + p.dot(Spp * p));
    lin_.push_back(2.0 * Szp * p);
    quad_.push_back(Szz + v.Q.topLeftCorner(n_, n_));
    bq_.push_back(2.0 * v.Q.bottomLeftCorner(m_, n_));
    C_.push_back(v.Q.bottomRightCorner(m_, m_));
  }
  if (n_ == 1 && m_ == 1 && !options_.force_interior_point) {
    const std::size_t J = base_.size();
    a0_.resize(J);
    a1_.resize(J);
    a2_.resize(J);
    b1_.resize(J);
    c_.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
      a0_[j] = base_[j];
      a1_[j] = lin_[j](0);
      a2_[j] = quad_[j](0, 0);
      b1_[j] = bq_[j](0, 0);
      c_[j] = C_[j](0, 0);
    }
  }
}

MomentProblem OneStepOperator::problem(const VectorXd& zeta) const {
  if (zeta.size() != n_) throw ShapeError("zeta has the wrong size");
  const Index J = static_cast<Index>(base_.size());
  MomentProblem p;
  p.a.resize(J);
  p.b.resize(J, m_);
  p.C = C_;
  for (Index j = 0; j < J; ++j) {
    p.a(j) = base_[j] + lin_[j].dot(zeta) + zeta.dot(quad_[j] * zeta);
    p.b.row(j) = (bq_[j] * zeta).transpose();
  }
  return p;
}

double OneStepOperator::value_scalar(double zeta) const {
  if (a0_.empty()) return value(scalar_vector(zeta));
  thread_local std::vector<double> a;
  thread_local std::vector<double> b;
  const std::size_t J = a0_.size();
  a.resize(J);
  b.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    a[j] = a0_[j] + zeta * (a1_[j] + zeta * a2_[j]);
    b[j] = b1_[j] * zeta;
  }
  const MomentSolution s =
      solve_scalar_pieces(a.data(), b.data(), c_.data(), J, options_.scalar_tol);
  return s.bounded ? s.value : -kInf;
}

double OneStepOperator::value(const VectorXd& zeta) const {
  if (!a0_.empty()) return value_scalar(zeta(0));
  const MomentSolution s = solve_moment_problem(problem(zeta), options_);
  return s.bounded ? s.value : -kInf;
}

namespace {

struct GridCandidate {
  double value;
  VectorXd zeta;
};

// One pass over a fixed box. Returns the best refined point.
AdversaryResponse search_box(const OneStepOperator& op, const VectorXd& center,
                             double hw, const SearchConfig& cfg) {
  const Index n = op.n();
  AdversaryResponse out;
  out.half_width = hw;
  if (hw == 0.0) {
    out.zeta = center;
    out.value = op.value(center);
    return out;
  }

  // Points per coordinate within the grid budget.
  Index per_dim = static_cast<Index>(std::floor(2.0 * hw / cfg.step + 1e-9)) + 1;
  const double budget_per_dim =
      std::pow(static_cast<double>(cfg.max_grid_points), 1.0 / static_cast<double>(n));
  bool capped = false;
  if (static_cast<double>(per_dim) > budget_per_dim) {
    per_dim = std::max<Index>(2, static_cast<Index>(std::floor(budget_per_dim)));
    capped = true;
  }
  const double eff_step =
      capped ? 2.0 * hw / static_cast<double>(per_dim - 1) : cfg.step;

  std::vector<GridCandidate> best;
  const std::size_t keep = static_cast<std::size_t>(std::max(cfg.restarts, 1));

  if (n == 1) {
    // Dense 1-D grid; include the right end point.
    std::vector<double> zs;
    const double lo = center(0) - hw;
    const double hi = center(0) + hw;
    for (Index i = 0; i < per_dim; ++i) zs.push_back(lo + static_cast<double>(i) * eff_step);
    if (zs.back() < hi - 1e-12 * (1.0 + std::abs(hi))) zs.push_back(hi);
    std::vector<double> hs(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) hs[i] = op.value_scalar(zs[i]);
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const bool left = i == 0 || hs[i] >= hs[i - 1];
      const bool right = i + 1 == zs.size() || hs[i] >= hs[i + 1];
      if (left && right) peaks.push_back(i);
    }
    const std::size_t global =
        std::max_element(hs.begin(), hs.end()) - hs.begin();
    if (std::find(peaks.begin(), peaks.end(), global) == peaks.end()) {
      peaks.push_back(global);
    }
    std::sort(peaks.begin(), peaks.end(),
              [&](std::size_t a, std::size_t b) { return hs[a] > hs[b]; });
    if (peaks.size() > keep) peaks.resize(keep);

    out.zeta = scalar_vector(zs[global]);
    out.value = hs[global];
    auto f = [&](double z) { return op.value_scalar(z); };
    for (std::size_t i : peaks) {
      const double a = std::max(lo, zs[i] - eff_step);
      const double b = std::min(hi, zs[i] + eff_step);
      const auto [z, v] = golden_max(f, a, b, cfg.refine_tol);
      if (v > out.value) {
        out.value = v;
        out.zeta = scalar_vector(z);
      }
    }
    return out;
  }

  // n > 1: odometer over the grid, keep the best `keep` points.
  std::vector<Index> idx(n, 0);
  VectorXd z(n);
  const std::size_t total = static_cast<std::size_t>(std::pow(per_dim, n));
  for (std::size_t count = 0; count < total; ++count) {
    for (Index d = 0; d < n; ++d) {
      z(d) = center(d) - hw + static_cast<double>(idx[d]) * eff_step;
    }
    const double v = op.value(z);
    if (best.size() < keep || v > best.back().value) {
      best.push_back({v, z});
      std::sort(best.begin(), best.end(),
                [](const GridCandidate& a, const GridCandidate& b) {
                  return a.value > b.value;
                });
      if (best.size() > keep) best.pop_back();
    }
    for (Index d = 0; d < n; ++d) {
      if (++idx[d] < per_dim) break;
      idx[d] = 0;
    }
  }
  out.zeta = best.front().zeta;
  out.value = best.front().value;
  for (const GridCandidate& c : best) {
    VectorXd cur = c.zeta;
    double cur_v = c.value;
    double radius = eff_step;
    for (int sweep = 0; sweep < 60 && radius > cfg.refine_tol; ++sweep) {
      for (Index d = 0; d < n; ++d) {
        auto f = [&](double t) {
          VectorXd trial = cur;
          trial(d) = t;
          return op.value(trial);
        };
        const double a = std::max(center(d) - hw, cur(d) - radius);
        const double b = std::min(center(d) + hw, cur(d) + radius);
        const auto [t, v] = golden_max(f, a, b, cfg.refine_tol);
        if (v > cur_v) {
          cur_v = v;
          cur(d) = t;
        }
      }
      radius *= 0.5;
    }
    if (cur_v > out.value) {
      out.value = cur_v;
      out.zeta = cur;
    }
  }
  return out;
}

}  // namespace

AdversaryResponse adversary_best_response(const ValueCone& cone,
                                          const DataMoment& Z,
                                          const VectorXd& x, const VectorXd& u,
                                          const SearchConfig& search) {
  search.validate();
  const OneStepOperator op(cone, Z, x, u);
  const Index n = cone.n();
  if (search.center && search.center->size() != n) {
    throw ConfigError("search center has the wrong size");
  }
  const VectorXd center = search.center ? *search.center : VectorXd::Zero(n);
  if (search.half_width) {
    AdversaryResponse r = search_box(op, center, *search.half_width, search);
    const double edge = (r.zeta - center).cwiseAbs().maxCoeff();
    r.on_boundary = *search.half_width > 0.0 &&
                    edge >= *search.half_width - search.step;
    return r;
  }
  double hw = search.box_scale * (1.0 + x.norm() + u.norm());
  AdversaryResponse r;
  for (int expansion = 0;; ++expansion) {
    r = search_box(op, center, hw, search);
    const double edge = (r.zeta - center).cwiseAbs().maxCoeff();
    r.on_boundary = edge >= hw - search.step;
    if (!r.on_boundary || expansion >= search.max_box_expansions) break;
    hw *= 2.0;
  }
  return r;
}

ResidualDetail bellman_residual_detail(const ValueCone& cone,
                                       const DataMoment& Z, const VectorXd& x,
                                       const VectorXd& u,
                                       const SearchConfig& search) {
  ResidualDetail d;
  d.lhs = evaluate(cone, Z, x, u);
  d.response = adversary_best_response(cone, Z, x, u, search);
  d.rhs = d.response.value;
  d.residual = d.rhs - d.lhs;
  return d;
}

double bellman_residual(const ValueCone& cone, const DataMoment& Z,
                        const VectorXd& x, const VectorXd& u,
                        const SearchConfig& search) {
  return bellman_residual_detail(cone, Z, x, u, search).residual;
}

}  // namespace macs
