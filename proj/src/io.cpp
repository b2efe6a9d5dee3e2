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

#include "macs/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

#include "macs/errors.hpp"

namespace macs {
namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Json matrix_to_json(const MatrixXd& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return MatrixXd::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty matrix");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) {
    throw ParseError(where + ": expected rows as nested arrays");
  }
  const std::size_t cols = j[0].size();
  MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ParseError(where + ": row " + std::to_string(i) + " has the wrong length");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      m(i, k) = number(j[i][k], where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
  }
  return m;
}

ScenarioFile scenario_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("scenario: expected a JSON object");
  const double gamma = number(field(j, "gamma", "scenario"), "scenario.gamma");
  std::optional<double> alpha;
  if (j.contains("alpha") && !j.at("alpha").is_null()) {
    alpha = number(j.at("alpha"), "scenario.alpha");
  }
  const Json& hs = field(j, "hypotheses", "scenario");
  if (!hs.is_array() || hs.empty()) {
    throw ParseError("scenario.hypotheses: expected a non-empty array");
  }
  std::vector<Hypothesis> list;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const std::string where = "hypotheses[" + std::to_string(i) + "]";
    Hypothesis h{matrix_from_json(field(hs[i], "A", where), where + ".A"),
                 matrix_from_json(field(hs[i], "B", where), where + ".B"),
                 matrix_from_json(field(hs[i], "M", where), where + ".M")};
    try {
      h.validate();
    } catch (const std::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!list.empty() && (h.n() != list.front().n() || h.m() != list.front().m())) {
      throw ParseError(where + ": dimensions differ from hypotheses[0]");
    }
    list.push_back(std::move(h));
  }
  try {
    return ScenarioFile{ScenarioSet(std::move(list), gamma), alpha};
  } catch (const std::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
}

Json scenario_to_json(const ScenarioSet& scenarios, std::optional<double> alpha) {
  Json j;
  j["gamma"] = scenarios.gamma();
  if (alpha) j["alpha"] = *alpha;
  Json hs = Json::array();
  for (const Hypothesis& h : scenarios.hypotheses()) {
    hs.push_back({{"A", matrix_to_json(h.A)}, {"B", matrix_to_json(h.B)}, {"M", matrix_to_json(h.M)}});
  }
  j["hypotheses"] = std::move(hs);
  return j;
}

Json cone_to_json(const ValueCone& cone) {
  Json j;
  j["n"] = cone.n();
  j["m"] = cone.m();
  Json vs = Json::array();
  for (const ValueVertex& v : cone.vertices()) {
    vs.push_back({{"S", matrix_to_json(v.S)}, {"Q", matrix_to_json(v.Q)}});
  }
  j["vertices"] = std::move(vs);
  if (!cone.scenario_S().empty()) {
    Json ss = Json::array();
    for (const MatrixXd& S : cone.scenario_S()) ss.push_back(matrix_to_json(S));
    j["scenarios"] = std::move(ss);
  }
  return j;
}

ValueCone cone_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("cone: expected a JSON object");
  const Json& jn = field(j, "n", "cone");
  const Json& jm = field(j, "m", "cone");
  if (!jn.is_number_integer() || !jm.is_number_integer() || jn.get<long>() < 1 ||
      jm.get<long>() < 1) {
    throw ParseError("cone: n and m must be positive integers");
  }
  const Index n = jn.get<Index>();
  const Index m = jm.get<Index>();
  const Json& vs = field(j, "vertices", "cone");
  if (!vs.is_array()) throw ParseError("cone.vertices: expected an array");
  std::vector<ValueVertex> vertices;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string where = "vertices[" + std::to_string(i) + "]";
    vertices.push_back({matrix_from_json(field(vs[i], "S", where), where + ".S"),
                        matrix_from_json(field(vs[i], "Q", where), where + ".Q")});
  }
  std::vector<MatrixXd> scenario_S;
  if (j.contains("scenarios")) {
    const Json& ss = j.at("scenarios");
    if (!ss.is_array()) throw ParseError("cone.scenarios: expected an array");
    for (std::size_t i = 0; i < ss.size(); ++i) {
      scenario_S.push_back(matrix_from_json(ss[i], "scenarios[" + std::to_string(i) + "]"));
    }
  }
  try {
    if (scenario_S.empty()) return ValueCone(n, m, std::move(vertices));
    return ValueCone(n, m, std::move(vertices), std::move(scenario_S));
  } catch (const std::exception& e) {
    throw ParseError(std::string("cone: ") + e.what());
  }
}

Json report_to_json(const BellmanReport& r) {
  Json j;
  j["certified"] = r.certified;
  j["max_residual"] = r.max_residual;
  j["min_residual"] = r.min_residual;
  j["samples_checked"] = r.samples_checked;
  j["equality_fraction"] = r.equality_fraction;
  j["containment_ok"] = r.containment_ok;
  j["boundary_hit"] = r.boundary_hit;
  j["vacuous"] = r.vacuous;
  j["tol"] = r.tol;
  if (r.samples_checked > 0) {
    j["worst_point"] = {{"Z", matrix_to_json(r.worst_point.Z.Z())},
                        {"x", matrix_to_json(r.worst_point.x)},
                        {"u", matrix_to_json(r.worst_point.u)},
                        {"zeta", matrix_to_json(r.worst_point.zeta)}};
  }
  j["search"] = {{"box_scale", r.search.box_scale},
                 {"step", r.search.step},
                 {"restarts", r.search.restarts},
                 {"max_box_expansions", r.search.max_box_expansions}};
  return j;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot write");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error(path + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error(path + ": rename failed: " + ec.message());
  }
}

void write_json(const std::string& path, const Json& j) { write_atomic(path, j.dump(2) + "\n"); }

std::string trace_csv(const Trace& tr) {
  std::ostringstream out;
  const Index n = tr.steps.empty() ? tr.x_final.size() : tr.steps.front().x.size();
  const Index m = tr.steps.empty() ? 0 : tr.steps.front().u.size();
  const std::size_t K = tr.steps.empty() ? 0 : tr.steps.front().stage_cost.size();
  out << "t";
  for (Index k = 0; k < n; ++k) out << ",x" << k;
  for (Index k = 0; k < m; ++k) out << ",u" << k;
  for (Index k = 0; k < n; ++k) out << ",w" << k;
  for (std::size_t i = 0; i < K; ++i) out << ",stage_cost_" << i << ",cum_cost_" << i;
  out << ",cum_wnorm,ratio\n";
  for (std::size_t t = 0; t < tr.steps.size(); ++t) {
    const TraceStep& s = tr.steps[t];
    out << t;
    for (Index k = 0; k < n; ++k) out << ',' << fmt(s.x(k));
    for (Index k = 0; k < m; ++k) out << ',' << fmt(s.u(k));
    for (Index k = 0; k < n; ++k) out << ',' << fmt(s.w(k));
    for (std::size_t i = 0; i < K; ++i) out << ',' << fmt(s.stage_cost[i]) << ',' << fmt(s.cum_cost[i]);
    double ratio = 0.0;
    if (s.cum_wnorm > 0.0) {
      ratio = s.cum_cost[tr.truth] / s.cum_wnorm;
    } else if (s.cum_cost[tr.truth] > 0.0) {
      ratio = std::numeric_limits<double>::infinity();
    }
    out << ',' << fmt(s.cum_wnorm) << ',' << fmt(ratio) << '\n';
  }
  return out.str();
}

}  // namespace macs
