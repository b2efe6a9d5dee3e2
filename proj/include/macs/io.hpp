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

// File formats: scenario and cone JSON, certification reports and trace CSV.
// Matrices are row-major nested arrays; doubles round-trip exactly.

#ifndef MACS_IO_HPP_
#define MACS_IO_HPP_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "macs/games.hpp"
#include "macs/model.hpp"
#include "macs/sim.hpp"
#include "macs/valuefn.hpp"

namespace macs {

using Json = nlohmann::json;

Json matrix_to_json(const MatrixXd& m);
// `where` names the field in error messages, e.g. "hypotheses[1].B".
MatrixXd matrix_from_json(const Json& j, const std::string& where);

struct ScenarioFile {
  ScenarioSet scenarios;
  std::optional<double> alpha;
};

// {"gamma": g, "alpha": optional, "hypotheses": [{"A", "B", "M"}, ...]}.
// Throws ParseError naming the offending field or hypothesis index.
ScenarioFile scenario_from_json(const Json& j);
Json scenario_to_json(const ScenarioSet& scenarios, std::optional<double> alpha = {});

// {"n", "m", "vertices": [{"S", "Q"}, ...], "scenarios": [S, ...]}; the last
// key is optional.
Json cone_to_json(const ValueCone& cone);
ValueCone cone_from_json(const Json& j);

Json report_to_json(const BellmanReport& report);

// Reads a whole file; throws ParseError when it cannot be opened or parsed.
Json read_json(const std::string& path);

// Writes through a temporary file in the same directory and renames it into
// place. Throws std::runtime_error on I/O failure.
void write_atomic(const std::string& path, const std::string& content);
void write_json(const std::string& path, const Json& j);

// Columns: t, x[0..n), u[0..m), w[0..n), then stage_cost_i and cum_cost_i
// for every hypothesis, cum_wnorm and ratio (truth cost over energy).
std::string trace_csv(const Trace& trace);

}  // namespace macs

#endif  // MACS_IO_HPP_
