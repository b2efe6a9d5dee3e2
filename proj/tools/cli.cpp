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

#include "cli.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "macs/control.hpp"
#include "macs/errors.hpp"
#include "macs/io.hpp"
#include "macs/oracle.hpp"
#include "macs/sim.hpp"
#include "macs/synthesis.hpp"

namespace macs {
namespace {

struct SearchFlags {
  double step = 1e-2;
  double box_scale = 4.0;
  int restarts = 5;

  void add(CLI::App* app) {
    app->add_option("--search-step", step, "adversary grid step")
        ->check(CLI::PositiveNumber);
    app->add_option("--box-scale", box_scale, "adversary box scale")
        ->check(CLI::PositiveNumber);
    app->add_option("--restarts", restarts, "local refinements from the best grid points")
        ->check(CLI::NonNegativeNumber);
  }
  SearchConfig config() const {
    SearchConfig s;
    s.step = step;
    s.box_scale = box_scale;
    s.restarts = restarts;
    return s;
  }
};

struct SampleFlags {
  std::size_t samples = 1000;
  std::uint64_t seed = 7;
  int outer = 3;

  void add(CLI::App* app) {
    app->add_option("--samples", samples, "certification samples");
    app->add_option("--seed", seed, "sampler seed");
    app->add_option("--outer-products", outer, "max rank-one terms in sampled Z")
        ->check(CLI::NonNegativeNumber);
  }
  SampleConfig config() const {
    SampleConfig c;
    c.samples = samples;
    c.seed = seed;
    c.max_outer_products = outer;
    return c;
  }
};

void emit(const Json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << "\n";
  } else {
    write_json(path, j);
  }
}

ScenarioSet default_models(double alpha) {
  return ScenarioSet({Hypothesis::scalar(alpha, 1.0, 0.5, 0.5)}, gamma_alpha(alpha));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimax adaptive LQ control on value cones"};
  app.require_subcommand(1);

  // demo-example
  CLI::App* demo = app.add_subcommand("demo-example", "build the closed-form cone of the spectral model class");
  double demo_alpha = 0.75;
  std::string demo_scenario, demo_out;
  demo->add_option("--alpha", demo_alpha, "spectral bound")->check(CLI::NonNegativeNumber);
  demo->add_option("--scenario", demo_scenario, "models (default: A=0.75, B=1, M=0.5 I)");
  demo->add_option("--out", demo_out, "cone JSON output");

  // synthesize
  CLI::App* syn = app.add_subcommand("synthesize", "grow a cone by value iteration until certified");
  std::string syn_scenario, syn_out, syn_trace;
  double syn_tol = 1e-3;
  std::size_t syn_max = 60;
  std::size_t syn_batch = 1;
  SampleFlags syn_samples;
  SearchFlags syn_search;
  syn_search.step = 5e-2;
  syn->add_option("--scenario", syn_scenario, "scenario JSON")->required();
  syn->add_option("--tol", syn_tol, "certification tolerance")->check(CLI::PositiveNumber);
  syn->add_option("--max-vertices", syn_max, "vertex budget");
  syn->add_option("--batch", syn_batch, "vertices added per pass")->check(CLI::PositiveNumber);
  syn->add_option("--out", syn_out, "cone JSON output");
  syn->add_option("--trace-out", syn_trace, "expansion trace JSON output");
  syn_samples.add(syn);
  syn_search.add(syn);

  // certify
  CLI::App* cert = app.add_subcommand("certify", "check the Bellman inequality on sampled points");
  std::string cert_cone, cert_report;
  double cert_tol = 1e-3;
  SampleFlags cert_samples;
  SearchFlags cert_search;
  cert->add_option("--cone", cert_cone, "cone JSON")->required();
  cert->add_option("--tol", cert_tol, "residual tolerance")->check(CLI::PositiveNumber);
  cert->add_option("--report", cert_report, "report JSON output");
  cert_samples.add(cert);
  cert_search.add(cert);

  // simulate
  CLI::App* sim = app.add_subcommand("simulate", "closed-loop rollouts of the cone controller");
  std::string sim_cone, sim_scenario, sim_out, sim_strategy = "iid_seeded", sim_mode = "randomized";
  std::size_t sim_truth = 0, sim_draws = 1;
  std::optional<std::size_t> sim_decoy;
  int sim_T = 100;
  std::uint64_t sim_seed = 1, sim_dseed = 1;
  double sim_cap = 1.0, sim_kick = 0.1, sim_x0 = 0.0;
  bool sim_suite = false, sim_allow_x0 = false;
  SuiteConfig suite;
  sim->add_option("--cone", sim_cone, "cone JSON")->required();
  sim->add_option("--scenario", sim_scenario, "scenario JSON")->required();
  sim->add_option("--truth", sim_truth, "index of the true hypothesis");
  sim->add_option("--strategy", sim_strategy, "zero | iid_seeded | model_confusion | adversarial_ascent");
  sim->add_option("--decoy", sim_decoy, "hypothesis targeted by model_confusion");
  sim->add_option("--T", sim_T, "horizon")->check(CLI::NonNegativeNumber);
  sim->add_option("--seed", sim_seed, "controller seed");
  sim->add_option("--disturbance-seed", sim_dseed, "disturbance seed");
  sim->add_option("--cap", sim_cap, "disturbance cap")->check(CLI::NonNegativeNumber);
  sim->add_option("--kick", sim_kick, "excitation added by model_confusion")->check(CLI::NonNegativeNumber);
  sim->add_option("--draws", sim_draws, "controller draws averaged into the trace")->check(CLI::PositiveNumber);
  sim->add_option("--mode", sim_mode, "randomized | deterministic");
  sim->add_option("--x0", sim_x0, "initial state (scalar; requires --allow-nonzero-x0)");
  sim->add_flag("--allow-nonzero-x0", sim_allow_x0, "accept a nonzero initial state; voids the guarantee");
  sim->add_option("--out", sim_out, "trace CSV output (suite: JSON)");
  sim->add_flag("--suite", sim_suite, "run the seeded gain suite instead of one rollout");
  sim->add_option("--suite-iid", suite.iid_seeds, "suite iid rollouts per truth");
  sim->add_option("--suite-confusion", suite.confusion_seeds, "suite confusion rollouts per truth");
  sim->add_option("--suite-ascent", suite.ascent_seeds, "suite ascent rollouts per truth");
  sim->add_option("--ascent-passes", suite.ascent.passes, "coordinate ascent passes");
  sim->add_option("--ascent-draws", suite.ascent.draws, "controller draws per ascent objective");

  // oracle
  CLI::App* orc = app.add_subcommand("oracle", "brute-force finite-horizon game value (scalar)");
  std::string orc_scenario, orc_cone, orc_out, orc_vis = "visible";
  int orc_T = 2;
  OracleGrids grids;
  orc->add_option("--scenario", orc_scenario, "scenario JSON")->required();
  orc->add_option("--T", orc_T, "horizon (<= 4)");
  orc->add_option("--u-atoms", grids.u_atoms, "decision atoms");
  orc->add_option("--w-atoms", grids.w_atoms, "disturbance atoms");
  orc->add_option("--u-clip", grids.u_clip, "decision range");
  orc->add_option("--w-clip", grids.w_clip, "disturbance range");
  orc->add_option("--x-clip", grids.x_clip, "state grid range");
  orc->add_option("--x-points", grids.x_points, "state grid points");
  orc->add_option("--d-range", grids.d_range, "payoff difference range");
  orc->add_option("--d-points", grids.d_points, "payoff difference points");
  orc->add_option("--tol", grids.tol, "accepted interpolation error");
  orc->add_option("--visibility", orc_vis, "visible | hidden (adversary sees the draw or not)");
  orc->add_option("--cone", orc_cone, "also report the cone controller's worst case");
  orc->add_option("--out", orc_out, "JSON output");

  // gain-sweep
  CLI::App* sweep = app.add_subcommand("gain-sweep", "best static gain u = -k x on the disturbance suite");
  std::string sw_scenario, sw_out, sw_cone;
  double k_lo = -0.25, k_hi = 0.25;
  int k_points = 11;
  SuiteConfig sw_suite;
  sweep->add_option("--scenario", sw_scenario, "scenario JSON")->required();
  sweep->add_option("--k-lo", k_lo, "smallest gain");
  sweep->add_option("--k-hi", k_hi, "largest gain");
  sweep->add_option("--points", k_points, "grid points")->check(CLI::PositiveNumber);
  sweep->add_option("--T", sw_suite.T, "horizon");
  sweep->add_option("--seed", sw_suite.seed, "suite seed");
  sweep->add_option("--cone", sw_cone, "also run the cone controller on the same suite");
  sweep->add_option("--out", sw_out, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (demo->parsed()) {
      const ModelClassSpec spec = ModelClassSpec::from_alpha(demo_alpha);
      std::vector<Hypothesis> models = demo_scenario.empty()
                                           ? default_models(demo_alpha).hypotheses()
                                           : scenario_from_json(read_json(demo_scenario)).scenarios.hypotheses();
      ValueCone cone;
      try {
        cone = build_example_cone(models, spec);
      } catch (const DegenerateGainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
      } catch (const DomainError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
      }
      emit(cone_to_json(cone), demo_out, out);
      if (!demo_out.empty()) {
        err << "wrote " << cone.size() << " vertices to " << demo_out << "\n";
      }
      return kExitOk;
    }

    if (syn->parsed()) {
      const ScenarioSet sc = scenario_from_json(read_json(syn_scenario)).scenarios;
      ExpansionOptions opt;
      opt.search = syn_search.config();
      opt.certify_search = SearchConfig{};
      opt.batch = syn_batch;
      Json steps = Json::array();
      opt.on_step = [&](const ExpansionStep& s, std::size_t v) {
        steps.push_back({{"vertices", v},
                         {"residual_before", s.residual_before},
                         {"residual_after", s.residual_after}});
        err << "vertices " << v << "  residual " << s.residual_before << " -> "
            << s.residual_after << "\n";
      };
      try {
        const ExpansionResult res = expand_cone(sc, syn_samples.config(), syn_tol, syn_max, opt);
        emit(cone_to_json(res.cone), syn_out, out);
        if (!syn_trace.empty()) {
          write_json(syn_trace, {{"converged", true},
                                 {"steps", steps},
                                 {"final_report", report_to_json(res.trace.final_report)}});
        }
        err << "converged with " << res.cone.size() << " vertices, max residual "
            << res.trace.final_report.max_residual << "\n";
        return kExitOk;
      } catch (const ExpansionDiverged& e) {
        if (!syn_trace.empty()) {
          write_json(syn_trace, {{"converged", false}, {"steps", steps}, {"reason", e.what()}});
        }
        err << "diverged: " << e.what() << "\n";
        return kExitInfeasible;
      }
    }

    if (cert->parsed()) {
      const ValueCone cone = cone_from_json(read_json(cert_cone));
      const BellmanReport rep = certify(cone, cert_samples.config(), cert_tol, cert_search.config());
      emit(report_to_json(rep), cert_report, out);
      err << (rep.certified ? "certified" : "not certified") << ": max residual "
          << rep.max_residual << " over " << rep.samples_checked << " samples\n";
      if (rep.vacuous) err << "warning: zero samples, certificate is vacuous\n";
      return rep.certified ? kExitOk : kExitNotCertified;
    }

    if (sim->parsed()) {
      const ScenarioSet sc = scenario_from_json(read_json(sim_scenario)).scenarios;
      const ValueCone cone = cone_from_json(read_json(sim_cone));
      if (cone.n() != sc.n() || cone.m() != sc.m()) {
        throw ParseError("cone and scenario dimensions differ");
      }
      ControllerOptions copt;
      if (sim_mode == "deterministic") {
        copt.mode = DecisionMode::kDeterministic;
      } else if (sim_mode != "randomized") {
        throw ConfigError("unknown mode '" + sim_mode + "'");
      }
      copt.allow_nonzero_initial_state = sim_allow_x0;
      Controller ctl(cone, copt);
      const double g2 = sc.gamma() * sc.gamma();
      if (sim_suite) {
        suite.T = sim_T;
        suite.draws = sim_draws;
        suite.cap = sim_cap;
        suite.kick = sim_kick;
        suite.seed = sim_seed;
        const SuiteResult r = run_gain_suite(sc, ctl, suite);
        Json entries = Json::array();
        for (const SuiteEntry& e : r.entries) {
          entries.push_back({{"truth", e.truth},
                             {"strategy", strategy_name(e.kind)},
                             {"seed", e.seed},
                             {"gain", e.gain.value},
                             {"prefix", e.gain.prefix}});
        }
        const bool ok = !r.violation && r.max_gain <= g2 + 1e-2;
        emit({{"max_gain", r.max_gain},
              {"bound", g2},
              {"violation", r.violation},
              {"passed", ok},
              {"guarantee_void", ctl.guarantee_void()},
              {"entries", entries}},
             sim_out, out);
        err << "max empirical gain " << r.max_gain << " (bound " << g2 << ")\n";
        return ok ? kExitOk : kExitNotCertified;
      }
      DisturbanceStrategy s;
      s.kind = parse_strategy(sim_strategy);
      s.cap = sim_cap;
      s.kick = sim_kick;
      s.seed = sim_dseed;
      s.decoy = sim_decoy.value_or((sim_truth + 1) % sc.size());
      s.ascent = suite.ascent;
      Trace tr;
      if (sim_draws > 1) {
        if (sim_x0 != 0.0) throw ConfigError("--x0 is not supported with --draws > 1");
        tr = expected_rollout(sc, sim_truth, s, ctl, sim_T, sim_draws, sim_seed);
      } else {
        VectorXd x0 = VectorXd::Constant(sc.n(), sim_x0);
        tr = rollout(sc, sim_truth, s, ctl, sim_T, sim_seed, x0);
      }
      if (sim_out.empty()) {
        out << trace_csv(tr);
      } else {
        write_atomic(sim_out, trace_csv(tr));
      }
      const GainEstimate g = empirical_gain({tr}, sim_truth);
      err << "empirical gain " << g.value << " (bound " << g2 << ")"
          << (ctl.guarantee_void() ? ", guarantee void" : "") << "\n";
      return kExitOk;
    }

    if (orc->parsed()) {
      const ScenarioSet sc = scenario_from_json(read_json(orc_scenario)).scenarios;
      if (orc_vis == "hidden") {
        grids.visibility = DrawVisibility::kHidden;
      } else if (orc_vis != "visible") {
        throw ConfigError("unknown visibility '" + orc_vis + "'");
      }
      const OracleResult r = exact_game_value(sc, orc_T, grids);
      Json j = {{"T", orc_T},
                {"value", r.value},
                {"error_estimate", r.error_estimate},
                {"root_strategy", r.root_strategy}};
      if (!orc_cone.empty()) {
        const ValueCone cone = cone_from_json(read_json(orc_cone));
        j["controller_worst_case"] = controller_worst_case(sc, cone, orc_T, grids);
      }
      emit(j, orc_out, out);
      err << "game value " << r.value << "\n";
      return r.value > grids.tol ? kExitInfeasible : kExitOk;
    }

    if (sweep->parsed()) {
      const ScenarioSet sc = scenario_from_json(read_json(sw_scenario)).scenarios;
      const SweepResult r = static_gain_sweep(sc, k_lo, k_hi, k_points, sw_suite);
      Json j = {{"best_k", r.best_k}, {"best_gain", r.best_gain}, {"k", r.ks}, {"gain", r.gains}};
      err << "best static gain k = " << r.best_k << ", empirical gain " << r.best_gain << "\n";
      if (!sw_cone.empty()) {
        const ValueCone cone = cone_from_json(read_json(sw_cone));
        Controller ctl(cone);
        const SuiteResult a = run_gain_suite(sc, ctl, sw_suite);
        j["adaptive_gain"] = a.max_gain;
        j["adaptive_better"] = a.max_gain < r.best_gain;
        err << "cone controller empirical gain " << a.max_gain << "\n";
      }
      emit(j, sw_out, out);
      return kExitOk;
    }
  } catch (const ExpansionDiverged& e) {
    err << "diverged: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const UnboundedError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace macs
