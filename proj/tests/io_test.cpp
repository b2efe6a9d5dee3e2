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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "macs/control.hpp"
#include "macs/errors.hpp"
#include "macs/io.hpp"
#include "macs/sim.hpp"
#include "macs/synthesis.hpp"

namespace macs {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "macs_io_test";
  fs::create_directories(p);
  return p;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

TEST_CASE("cone round trip is bit-identical") {
  const ValueCone cone = build_example_cone({Hypothesis::scalar(0.75, 1, 0.5, 0.5)}, ModelClassSpec::from_alpha(0.75));
  const fs::path p = scratch_dir() / "cone.json";
  write_json(p.string(), cone_to_json(cone));
  const ValueCone back = cone_from_json(read_json(p.string()));
  REQUIRE(back.size() == cone.size());
  for (std::size_t i = 0; i < cone.size(); ++i) CHECK(back.vertices()[i] == cone.vertices()[i]);
  CHECK(back.scenario_S().size() == cone.scenario_S().size());
  // Values that need all 17 digits survive too.
  MatrixXd m(1, 2);
  m << 0.1 + 0.2, 1.0 / 3.0;
  CHECK(matrix_from_json(Json::parse(matrix_to_json(m).dump()), "m") == m);
  CHECK(matrix_from_json(Json(2.5), "s")(0, 0) == 2.5);
}

TEST_CASE("scenario parsing") {
  const Json ok = Json::parse(R"({"gamma": 2, "alpha": 0.75, "hypotheses": [
      {"A": [[0.75]], "B": [[1]], "M": [[0.5, 0], [0, 0.5]]},
      {"A": [[0.75]], "B": [[-1]], "M": [[0.5, 0], [0, 0.5]]}]})");
  const ScenarioFile f = scenario_from_json(ok);
  CHECK(f.scenarios.size() == 2);
  CHECK(f.scenarios.gamma() == 2.0);
  CHECK(*f.alpha == 0.75);
  const ScenarioFile g = scenario_from_json(scenario_to_json(f.scenarios, f.alpha));
  CHECK(g.scenarios[1].B == f.scenarios[1].B);

  const std::string bad_dims = message_of([] {
    scenario_from_json(Json::parse(R"({"gamma": 2, "hypotheses": [
      {"A": [[0.75]], "B": [[1]], "M": [[0.5, 0], [0, 0.5]]},
      {"A": [[1, 0], [0, 1]], "B": [[1], [1]], "M": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}]})"));
  });
  CHECK(bad_dims.find("hypotheses[1]") != std::string::npos);
  const std::string ragged = message_of([] {
    scenario_from_json(Json::parse(R"({"gamma": 2, "hypotheses": [
      {"A": [[0.75]], "B": [[1]], "M": [[0.5, 0], [0]]}]})"));
  });
  CHECK(ragged.find("hypotheses[0]") != std::string::npos);
  CHECK(ragged.find("M") != std::string::npos);
  CHECK(message_of([] { scenario_from_json(Json::parse(R"({"hypotheses": []})")); }).find("gamma") !=
        std::string::npos);
  CHECK(message_of([] { scenario_from_json(Json::parse(R"({"gamma": 2})")); }).find("hypotheses") !=
        std::string::npos);
  CHECK_THROWS_AS(scenario_from_json(Json::parse(R"({"gamma": 0.5, "hypotheses": [
      {"A": [[0.75]], "B": [[1]], "M": [[0.5, 0], [0, 0.5]]}]})")), ParseError);
}

TEST_CASE("malformed files name the path") {
  const fs::path p = scratch_dir() / "broken.json";
  std::ofstream(p) << "{\"gamma\": 2, ";
  CHECK(message_of([&] { read_json(p.string()); }).find("broken.json") != std::string::npos);
  CHECK(message_of([&] { read_json((scratch_dir() / "absent.json").string()); }).find("absent.json") !=
        std::string::npos);
  CHECK_THROWS_AS(cone_from_json(Json::parse(R"({"n": 1, "m": 1})")), ParseError);
}

TEST_CASE("atomic writes replace the target") {
  const fs::path p = scratch_dir() / "atomic.txt";
  write_atomic(p.string(), "first");
  write_atomic(p.string(), "second");
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "second");
  for (const auto& e : fs::directory_iterator(scratch_dir()))
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
}

TEST_CASE("trace CSV") {
  const ScenarioSet sc({Hypothesis::scalar(0.75, 1, 0.5, 0.5), Hypothesis::scalar(0.75, -1, 0.5, 0.5)}, 2.0);
  Controller c(build_example_cone({sc[0]}, ModelClassSpec::from_alpha(0.75)));
  DisturbanceStrategy zero;
  const Trace tr = rollout(sc, 0, zero, c, 5, 1);
  std::istringstream csv(trace_csv(tr));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,x0,u0,w0,stage_cost_0,cum_cost_0,stage_cost_1,cum_cost_1,cum_wnorm,ratio");
  int rows = 0;
  while (std::getline(csv, line)) {
    CHECK(line == std::to_string(rows) + ",0,0,0,0,0,0,0,0,0");
    ++rows;
  }
  CHECK(rows == 5);
}

}  // namespace
}  // namespace macs
