/*
 Copyright 2026 The dflin Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// dflin: simulate feedback-linearizable discretization schemes, audit
// discrete maps for linearizability, and estimate convergence orders.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dflin/integrator.hpp"
#include "dflin/linearizability.hpp"
#include "dflin/presets.hpp"

namespace {

using namespace dflin;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct Options {
  std::string preset = "unicycle";
  std::string map = "explicit-euler";
  bool lifted = false;
  bool extended = false;
  double h = 1e-2;
  double t_final = 10.0;
  std::string gains;  // rows separated by ';', entries by ','
  unsigned seed = 42;
  int n_points = 25;
  std::string out = "dflin";
  std::string config;
};

bool parse_bool(const std::string& v) {
  return v == "true" || v == "1" || v == "yes" || v == "on";
}

// Flat key=value config; command-line flags take precedence.
void apply_config(const CLI::App* cmd, Options& opt,
                  std::vector<double>* h_list) {
  std::ifstream in(opt.config);
  if (!in)
    throw CLI::ValidationError("--config", "cannot read " + opt.config);
  auto overridden = [cmd](const std::string& flag) {
    const CLI::Option* o = cmd->get_option_no_throw(flag);
    return o != nullptr && o->count() > 0;
  };
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError(
          "--config", "line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (overridden("--" + key)) continue;
    if (key == "preset") opt.preset = val;
    else if (key == "map") opt.map = val;
    else if (key == "lifted") opt.lifted = parse_bool(val);
    else if (key == "extended") opt.extended = parse_bool(val);
    else if (key == "h") opt.h = std::stod(val);
    else if (key == "T") opt.t_final = std::stod(val);
    else if (key == "gains") opt.gains = val;
    else if (key == "seed") opt.seed = static_cast<unsigned>(std::stoul(val));
    else if (key == "points") opt.n_points = std::stoi(val);
    else if (key == "out") opt.out = val;
    else if (key == "h-list" && h_list != nullptr) {
      if (!overridden("--h-list")) {
        h_list->clear();
        std::istringstream hs(val);
        std::string tok;
        while (std::getline(hs, tok, ',')) h_list->push_back(std::stod(tok));
      }
    } else {
      throw CLI::ValidationError("--config", "unknown key: " + key);
    }
  }
  if (opt.h <= 0.0)
    throw CLI::ValidationError("--config", "h must be positive");
  if (opt.t_final < 0.0)
    throw CLI::ValidationError("--config", "T must be non-negative");
}

std::optional<MatXd> parse_gains(const std::string& text, int cols) {
  if (text.empty()) return std::nullopt;
  std::vector<std::vector<double>> rows;
  std::istringstream row_stream(text);
  std::string row;
  while (std::getline(row_stream, row, ';')) {
    rows.emplace_back();
    std::istringstream entry_stream(row);
    std::string entry;
    while (std::getline(entry_stream, entry, ','))
      rows.back().push_back(std::stod(entry));
  }
  MatXd g(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != cols)
      throw CLI::ValidationError("--gains rows must have " +
                                 std::to_string(cols) + " entries");
    for (int j = 0; j < cols; ++j) g(static_cast<Eigen::Index>(i), j) =
        rows[i][static_cast<std::size_t>(j)];
  }
  return g;
}

DiscreteScheme build_scheme(const ScenarioPreset& p, const Options& opt,
                            double h) {
  const MapKind kind = map_kind_from_string(opt.map);
  if (opt.lifted) return make_lifted_scheme(p.ext, p.lin, kind, h);
  return make_implicit_scheme(make_builtin_map(kind, p.ext.n_ext), p.ext, h);
}

int cmd_simulate(const Options& opt) {
  const ScenarioPreset p = preset_by_name(opt.preset);
  const auto gains = parse_gains(opt.gains, p.ext.n_ext);
  const Controller ctrl = stabilizing_controller(p, gains);
  const int steps = static_cast<int>(std::llround(opt.t_final / opt.h));
  const DiscreteScheme scheme = build_scheme(p, opt, opt.h);

  Trajectory traj;
  try {
    traj = simulate(scheme, ctrl, p.xi0, steps);
  } catch (const SimulationError& e) {
    std::cerr << "simulation failed at step " << e.failed_step << ": "
              << e.what() << "\n";
    return kExitRuntime;
  }
  const Trajectory ref =
      reference_closed_loop(p.ext, ctrl, p.xi0, opt.h, steps);
  const std::vector<double> errors = global_error(traj, ref);
  double max_error = 0.0;
  for (double e : errors) max_error = std::max(max_error, e);

  write_trajectory_csv(traj, opt.out + ".traj.csv");
  write_controls_csv(traj, opt.out + ".ctrl.csv");
  write_error_csv(traj, errors, opt.out + ".err.csv");

  std::ostringstream report;
  report << "simulate " << p.name << " map=" << opt.map
         << (opt.lifted ? " lifted" : " unlifted") << " h=" << opt.h
         << " T=" << opt.t_final << "\n";
  report << "steps: " << traj.steps() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", max_error);
  report << "max global error vs reference: " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.6e", traj.states.back().norm());
  report << "final state norm: " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.6e",
                traj.states.back().norm() / p.xi0.norm());
  report << "final/initial norm ratio: " << buf << "\n";
  write_text_file(opt.out + ".report.txt", report.str());
  std::cout << report.str();
  return kExitOk;
}

int cmd_check(const std::string& what, const Options& opt) {
  const ScenarioPreset p = preset_by_name(opt.preset);
  const MapKind kind = map_kind_from_string(opt.map);
  const int n = p.ext.n_ext;

  if (what == "map-axioms") {
    DiscretizationMap map;
    Guard guard = always_valid();
    if (opt.lifted) {
      map = lift_map(make_builtin_map(kind, n),
                     Diffeomorphism::from_linearization_inverse(p.lin));
      guard = p.ext.domain_guard;
    } else {
      map = make_builtin_map(kind, n);
    }
    const auto pts = sample_points(n, opt.n_points, opt.seed, guard);
    const AxiomReport rep = check_map_axioms(map, pts);
    std::printf("%s: base violation %.3e, tangent violation %.3e\n",
                rep.passed ? "PASS" : "FAIL", rep.worst_base_violation,
                rep.worst_tangent_violation);
    return rep.passed ? kExitOk : kExitRuntime;
  }

  if (what == "linearization") {
    const auto pts =
        sample_points(n, opt.n_points, opt.seed, p.ext.domain_guard);
    const LinearizationReport rep = verify_linearization(p.ext, p.lin, pts);
    std::printf("%s: dynamics residual %.3e, input residual %.3e\n",
                rep.passed ? "PASS" : "FAIL", rep.max_dynamics_residual,
                rep.max_input_residual);
    return rep.passed ? kExitOk : kExitRuntime;
  }

  if (what == "fl-discrete") {
    const DiscreteMapModel model =
        opt.lifted ? lifted_euler_map_model(p.ext, p.lin, opt.h)
                   : euler_map_model(p.ext, opt.h);
    const auto pts = sample_points(n + p.ext.m, opt.n_points, opt.seed,
                                   model.guard, 0.3);
    const AuditReport rep = grizzle_audit(model, pts);
    std::cout << rep.to_text();
    write_text_file(opt.out + ".audit.txt", rep.to_text());
    write_text_file(opt.out + ".audit.json", rep.to_json());
    return rep.verdict == AuditVerdict::Inconclusive ? kExitRuntime : kExitOk;
  }

  if (what == "fl-continuous") {
    ControlAffineSystem sys = p.system;
    Guard guard = p.system.domain_guard;
    if (opt.extended) {
      sys = ControlAffineSystem{p.ext.n_ext, p.ext.m, p.ext.F, p.ext.G,
                                p.ext.domain_guard};
      guard = p.ext.domain_guard;
    }
    const auto pts = sample_points(sys.n, opt.n_points, opt.seed, guard, 0.3);
    const StaticFlReport rep = static_fl_check(sys, pts);
    std::cout << rep.to_text();
    write_text_file(opt.out + ".flcheck.txt", rep.to_text());
    write_text_file(opt.out + ".flcheck.json", rep.to_json());
    return rep.verdict == AuditVerdict::Inconclusive ? kExitRuntime : kExitOk;
  }

  if (what == "linearity-residual") {
    if (!opt.lifted) {
      std::cerr << "linearity-residual applies to the lifted scheme\n";
      return kExitUsage;
    }
    const DiscreteScheme scheme = build_scheme(p, opt, opt.h);
    const Controller ctrl = stabilizing_controller(p);
    const DiscreteLTI lti = discretize_lti(
        make_builtin_map(kind, n), p.lin.A, p.lin.B, opt.h);
    Trajectory traj;
    try {
      traj = simulate(scheme, ctrl, p.xi0, 1000);
    } catch (const SimulationError& e) {
      std::cerr << "simulation failed: " << e.what() << "\n";
      return kExitRuntime;
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.steps(); ++k) {
      const VecXd zk = p.lin.phi(traj.states[k]);
      const VecXd zk1 = p.lin.phi(traj.states[k + 1]);
      const VecXd vk = -p.gains * zk;
      worst = std::max(worst,
                       (zk1 - lti.A_h * zk - lti.B_h * vk).norm());
    }
    const bool pass = worst <= 1e-9;
    std::printf("%s: max linearity residual %.3e over %zu steps\n",
                pass ? "PASS" : "FAIL", worst, traj.steps());
    return pass ? kExitOk : kExitRuntime;
  }

  std::cerr << "unknown check: " << what << "\n";
  return kExitUsage;
}

int cmd_order(const Options& opt, std::vector<double> h_list) {
  if (h_list.empty()) h_list = {1e-1, 5e-2, 2.5e-2, 1.25e-2};
  if (h_list.size() < 4) {
    std::cerr << "order estimation needs at least 4 step sizes\n";
    return kExitUsage;
  }
  for (std::size_t i = 2; i < h_list.size(); ++i) {
    const double r0 = h_list[1] / h_list[0], ri = h_list[i] / h_list[i - 1];
    if (std::abs(ri - r0) > 1e-9 * std::abs(r0)) {
      std::cerr << "warning: step sizes are not geometric; proceeding with "
                   "least squares\n";
      break;
    }
  }
  const ScenarioPreset p = preset_by_name(opt.preset);
  OrderEstimate est;
  try {
    est = order_estimate(
        h_list, [&](double h) { return build_scheme(p, opt, h); }, p.ext,
        zero_controller(p.ext.m), p.xi0, 1.0);
  } catch (const std::exception& e) {
    std::cerr << "order sweep failed: " << e.what() << "\n";
    return kExitRuntime;
  }
  std::ostringstream table;
  table << "h,max_error\n";
  char buf[96];
  for (std::size_t i = 0; i < est.h_values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", est.h_values[i],
                  est.max_errors[i]);
    table << buf;
  }
  write_text_file(opt.out + ".order.csv", table.str());
  const bool pass = !est.degenerate && est.slope >= 0.8 && est.slope <= 1.2;
  std::ostringstream report;
  std::snprintf(buf, sizeof buf, "estimated order: %.4f\n", est.slope);
  report << table.str() << buf
         << (pass ? "PASS: slope in [0.8, 1.2]\n"
                  : "FAIL: slope outside [0.8, 1.2]\n");
  write_text_file(opt.out + ".order.txt", report.str());
  std::cout << report.str();
  return pass ? kExitOk : kExitRuntime;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->set_help_flag("--help", "print help");  // frees -h/--h for the step
  cmd->add_option("--preset", opt.preset, "scenario preset name")
      ->check(CLI::IsMember(preset_names()));
  cmd->add_option("--map", opt.map, "discretization map kind")
      ->check(CLI::IsMember({"explicit-euler", "implicit-euler", "midpoint"}));
  cmd->add_flag("--lifted", opt.lifted, "lift the map through Phi");
  cmd->add_option("--h", opt.h, "step size")->check(CLI::PositiveNumber);
  cmd->add_option("--T", opt.t_final, "horizon in seconds")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--gains", opt.gains,
                  "gain override, rows ';'-separated, entries ','-separated");
  cmd->add_option("--seed", opt.seed, "sample-cloud RNG seed");
  cmd->add_option("--points", opt.n_points, "sample-cloud size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opt.out, "output path prefix");
  cmd->add_option("--config", opt.config,
                  "flat key=value config file; flags override it");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feedback-linearizable discretization toolkit"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  Options opt;

  CLI::App* sim = app.add_subcommand("simulate", "run a closed-loop scenario");
  add_common(sim, opt);

  CLI::App* chk = app.add_subcommand("check", "run a verification");
  std::string what;
  chk->add_option("what", what,
                  "map-axioms | linearization | fl-discrete | fl-continuous "
                  "| linearity-residual")
      ->required();
  chk->add_flag("--extended", opt.extended,
                "check the compensated system (fl-continuous)");
  add_common(chk, opt);

  CLI::App* ord = app.add_subcommand("order", "estimate convergence order");
  std::vector<double> h_list;
  ord->add_option("--h-list", h_list, "step sizes for the sweep")
      ->delimiter(',');
  add_common(ord, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (!opt.config.empty()) {
      const CLI::App* active = sim->parsed() ? sim
                               : chk->parsed() ? chk
                                               : ord;
      apply_config(active, opt, ord->parsed() ? &h_list : nullptr);
    }
    if (sim->parsed()) return cmd_simulate(opt);
    if (chk->parsed()) return cmd_check(what, opt);
    return cmd_order(opt, h_list);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
