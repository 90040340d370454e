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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dflin/integrator.hpp"
#include "dflin/linearizability.hpp"
#include "dflin/presets.hpp"

namespace py = pybind11;
using namespace dflin;

namespace {

DiscreteScheme scheme_for(const ScenarioPreset& p, const std::string& map,
                          bool lifted, double h) {
  const MapKind kind = map_kind_from_string(map);
  if (lifted) return make_lifted_scheme(p.ext, p.lin, kind, h);
  return make_implicit_scheme(make_builtin_map(kind, p.ext.n_ext), p.ext, h);
}

MatXd stack_rows(const std::vector<VecXd>& rows) {
  if (rows.empty()) return MatXd(0, 0);
  MatXd m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = rows[i];
  return m;
}

py::dict simulate_preset(const std::string& preset, const std::string& map,
                         bool lifted, double h, double t_final,
                         std::optional<MatXd> gains) {
  const ScenarioPreset p = preset_by_name(preset);
  const Controller ctrl = stabilizing_controller(p, gains);
  const int steps = static_cast<int>(std::llround(t_final / h));
  const Trajectory traj = simulate(scheme_for(p, map, lifted, h), ctrl,
                                   p.xi0, steps);
  const Trajectory ref = reference_closed_loop(p.ext, ctrl, p.xi0, h, steps);
  const std::vector<double> errors = global_error(traj, ref);
  double max_error = 0.0;
  for (double e : errors) max_error = std::max(max_error, e);

  py::dict out;
  std::vector<double> t(traj.states.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = traj.time_at(k);
  out["t"] = t;
  out["states"] = stack_rows(traj.states);
  out["controls"] = stack_rows(traj.controls);
  out["errors"] = errors;
  out["max_error"] = max_error;
  out["final_norm_ratio"] = traj.states.back().norm() / p.xi0.norm();
  return out;
}

py::dict audit_preset(const std::string& preset, bool lifted, double h,
                      int n_points, unsigned seed) {
  const ScenarioPreset p = preset_by_name(preset);
  const DiscreteMapModel model =
      lifted ? lifted_euler_map_model(p.ext, p.lin, h)
             : euler_map_model(p.ext, h);
  const auto pts = sample_points(p.ext.n_ext + p.ext.m, n_points, seed,
                                 model.guard, 0.3);
  const AuditReport rep = grizzle_audit(model, pts);
  py::dict out;
  out["verdict"] = to_string(rep.verdict);
  out["failing_stage"] = rep.failing_stage;
  py::list stages;
  for (const AuditStage& s : rep.stages) {
    py::dict d;
    d["name"] = s.name;
    d["passed"] = s.passed;
    d["ranks"] = s.ranks;
    stages.append(d);
  }
  out["stages"] = stages;
  out["text"] = rep.to_text();
  out["json"] = rep.to_json();
  return out;
}

py::dict static_fl(const std::string& preset, bool extended, int n_points,
                   unsigned seed) {
  const ScenarioPreset p = preset_by_name(preset);
  StaticFlReport rep;
  if (extended) {
    ControlAffineSystem sys{p.ext.n_ext, p.ext.m, p.ext.F, p.ext.G,
                            p.ext.domain_guard};
    rep = static_fl_check(
        sys, sample_points(sys.n, n_points, seed, p.ext.domain_guard, 0.3));
  } else {
    rep = static_fl_check(p.system,
                          sample_points(p.system.n, n_points, seed));
  }
  py::dict out;
  out["verdict"] = to_string(rep.verdict);
  out["linearizable"] = rep.linearizable();
  out["detail"] = rep.detail;
  out["text"] = rep.to_text();
  return out;
}

py::dict order(const std::string& preset, const std::string& map, bool lifted,
               std::vector<double> h_list, double t_final) {
  const ScenarioPreset p = preset_by_name(preset);
  if (h_list.empty()) h_list = {1e-1, 5e-2, 2.5e-2, 1.25e-2};
  const OrderEstimate est = order_estimate(
      h_list, [&](double h) { return scheme_for(p, map, lifted, h); }, p.ext,
      zero_controller(p.ext.m), p.xi0, t_final);
  py::dict out;
  out["slope"] = est.slope;
  out["degenerate"] = est.degenerate;
  out["h"] = est.h_values;
  out["max_errors"] = est.max_errors;
  return out;
}

py::dict map_axioms(const std::string& map, const std::string& preset,
                    bool lifted, int n_points, unsigned seed) {
  const ScenarioPreset p = preset_by_name(preset);
  const int n = p.ext.n_ext;
  DiscretizationMap d;
  Guard guard = always_valid();
  if (lifted) {
    d = lift_map(make_builtin_map(map_kind_from_string(map), n),
                 Diffeomorphism::from_linearization_inverse(p.lin));
    guard = p.ext.domain_guard;
  } else {
    d = make_builtin_map(map_kind_from_string(map), n);
  }
  const AxiomReport rep =
      check_map_axioms(d, sample_points(n, n_points, seed, guard));
  py::dict out;
  out["passed"] = rep.passed;
  out["base_violation"] = rep.worst_base_violation;
  out["tangent_violation"] = rep.worst_tangent_violation;
  return out;
}

double linearity_residual(const std::string& preset, double h, int steps) {
  const ScenarioPreset p = preset_by_name(preset);
  const DiscreteScheme lifted =
      make_lifted_scheme(p.ext, p.lin, MapKind::ExplicitEuler, h);
  const DiscreteLTI lti = discretize_lti(
      make_builtin_map(MapKind::ExplicitEuler, p.ext.n_ext), p.lin.A, p.lin.B,
      h);
  const Trajectory traj =
      simulate(lifted, stabilizing_controller(p), p.xi0, steps);
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.steps(); ++k) {
    const VecXd z = p.lin.phi(traj.states[k]);
    const VecXd v = -p.gains * z;
    worst = std::max(
        worst,
        (p.lin.phi(traj.states[k + 1]) - lti.A_h * z - lti.B_h * v).norm());
  }
  return worst;
}

py::dict verify(const std::string& preset, int n_points, unsigned seed) {
  const ScenarioPreset p = preset_by_name(preset);
  const auto pts =
      sample_points(p.ext.n_ext, n_points, seed, p.ext.domain_guard);
  const LinearizationReport rep = verify_linearization(p.ext, p.lin, pts);
  py::dict out;
  out["passed"] = rep.passed;
  out["max_dynamics_residual"] = rep.max_dynamics_residual;
  out["max_input_residual"] = rep.max_input_residual;
  return out;
}

VecXd phi(const std::string& preset, const VecXd& xi) {
  return preset_by_name(preset).lin.phi(xi);
}

VecXd phi_inv(const std::string& preset, const VecXd& z) {
  return inverse_transform(preset_by_name(preset).lin, z);
}

}  // namespace

PYBIND11_MODULE(_dflin, m) {
  m.doc() = "feedback-linearizable discretization schemes and audits";

  m.def("preset_names", &preset_names);
  m.def("simulate", &simulate_preset, py::arg("preset") = "unicycle",
        py::arg("map") = "explicit-euler", py::arg("lifted") = true,
        py::arg("h") = 1e-2, py::arg("T") = 10.0,
        py::arg("gains") = std::nullopt,
        "Closed-loop simulation with the global error against the "
        "high-accuracy reference.");
  m.def("grizzle_audit", &audit_preset, py::arg("preset") = "unicycle",
        py::arg("lifted") = false, py::arg("h") = 1e-2,
        py::arg("n_points") = 20, py::arg("seed") = 11,
        "Discrete-time feedback-linearizability audit of the one-step map.");
  m.def("static_fl_check", &static_fl, py::arg("preset") = "unicycle",
        py::arg("extended") = false, py::arg("n_points") = 20,
        py::arg("seed") = 13,
        "Continuous-time static feedback linearizability check.");
  m.def("order_estimate", &order, py::arg("preset") = "unicycle",
        py::arg("map") = "explicit-euler", py::arg("lifted") = true,
        py::arg("h_list") = std::vector<double>{},
        py::arg("T") = 1.0, "Convergence-order sweep.");
  m.def("check_map_axioms", &map_axioms, py::arg("map") = "explicit-euler",
        py::arg("preset") = "unicycle", py::arg("lifted") = false,
        py::arg("n_points") = 50, py::arg("seed") = 17,
        "Discretization-map axiom check on a random sample cloud.");
  m.def("linearity_residual", &linearity_residual,
        py::arg("preset") = "unicycle", py::arg("h") = 1e-2,
        py::arg("steps") = 1000,
        "Max deviation of the lifted scheme from its discrete LTI image.");
  m.def("verify_linearization", &verify, py::arg("preset") = "unicycle",
        py::arg("n_points") = 25, py::arg("seed") = 7);
  m.def("phi", &phi, py::arg("preset"), py::arg("xi"),
        "Flat coordinates of a state.");
  m.def("phi_inv", &phi_inv, py::arg("preset"), py::arg("z"),
        "State recovered from flat coordinates.");
}
