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

#ifndef DFLIN_INTEGRATOR_HPP_
#define DFLIN_INTEGRATOR_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dflin/geometry.hpp"
#include "dflin/systems.hpp"

namespace dflin {

enum class SchemeMode {
  ImplicitGeneral,  // Newton on the discretization-map residual
  LiftedFastPath,   // step in z-coordinates, then Phi^{-1}
};

/// One-step scheme induced by a discretization map on a controlled field.
struct DiscreteScheme {
  DiscretizationMap map;
  ExtendedSystem ext;
  double h = 0.0;
  SchemeMode mode = SchemeMode::ImplicitGeneral;
  std::optional<LinearizingData> lin;       // required for the fast path
  MapKind base_kind = MapKind::ExplicitEuler;  // underlying map of a lift
};

/// Scheme solving  D^{-1}(xi_k, xi_{k+1}) = h F_mu(pi_M(D^{-1}(...)))
/// by Newton iteration.
DiscreteScheme make_implicit_scheme(DiscretizationMap map, ExtendedSystem ext,
                                    double h);

/// Scheme for the map lifted through Phi: steps in z-coordinates with the
/// named builtin map and returns through Phi^{-1}. For explicit Euler this
/// is the closed form  Phi^{-1}(Phi(xi) + h DPhi(xi) (F + G mu)).
DiscreteScheme make_lifted_scheme(ExtendedSystem ext, LinearizingData lin,
                                  MapKind base_kind, double h);

/// Uniform-grid trajectory; states has one more entry than controls.
struct Trajectory {
  double t0 = 0.0;
  double h = 0.0;
  std::vector<VecXd> states;
  std::vector<VecXd> controls;

  double time_at(std::size_t k) const { return t0 + h * double(k); }
  std::size_t steps() const { return controls.size(); }
};

/// Step failure carrying the partial trajectory computed so far.
struct SimulationError : std::runtime_error {
  Trajectory partial;
  std::size_t failed_step;
  SimulationError(const std::string& what, Trajectory partial_traj,
                  std::size_t k)
      : std::runtime_error(what),
        partial(std::move(partial_traj)),
        failed_step(k) {}
};

using Controller = std::function<VecXd(int k, const VecXd& xi)>;

inline Controller zero_controller(int m) {
  return [m](int, const VecXd&) { return VecXd::Zero(m).eval(); };
}

/// Advances the scheme one step.
VecXd step(const DiscreteScheme& scheme, const VecXd& xi, const VecXd& mu);

/// Applies the scheme induced by `map` to  z' = A z + B v  and extracts the
/// (A_h, B_h) pair; verifies affinity by superposition first.
DiscreteLTI discretize_lti(const DiscretizationMap& map, const MatXd& a,
                           const MatXd& b, double h);

/// Iterates `step` with the controller; throws SimulationError (carrying
/// the partial trajectory) on step failure.
Trajectory simulate(const DiscreteScheme& scheme, const Controller& controller,
                    const VecXd& xi0, int steps);

/// High-accuracy reference: classical 4th-order steps with h/100 substeps
/// per grid interval, replaying the given piecewise-constant controls.
Trajectory reference_trajectory(const ExtendedSystem& ext,
                                const std::vector<VecXd>& controls,
                                const VecXd& xi0, double h, double t0 = 0.0);

/// Reference for the sampled-data closed loop: controls are recomputed
/// from the reference's own states at each grid time.
Trajectory reference_closed_loop(const ExtendedSystem& ext,
                                 const Controller& controller,
                                 const VecXd& xi0, double h, int steps,
                                 double t0 = 0.0);

/// Per-sample Euclidean distances ||xi_ref(t_k) - xi_k||.
std::vector<double> global_error(const Trajectory& traj,
                                 const Trajectory& ref);

struct OrderEstimate {
  double slope = 0.0;
  bool degenerate = false;  // errors at the rounding floor; slope unreliable
  std::vector<double> h_values;
  std::vector<double> max_errors;
};

using SchemeBuilder = std::function<DiscreteScheme(double h)>;

/// Least-squares slope of log(max global error) against log(h). Each h is
/// simulated with the controller, then the recorded controls are replayed
/// on the reference oracle.
OrderEstimate order_estimate(const std::vector<double>& h_list,
                             const SchemeBuilder& builder,
                             const ExtendedSystem& ext,
                             const Controller& controller, const VecXd& xi0,
                             double t_final);

/// CSV with header  t,xi_1..xi_n,mu_1..mu_m ; controls blank on the final
/// row; 17 significant digits; written atomically (temp file + rename).
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// Single-column variants used by the CLI.
void write_controls_csv(const Trajectory& traj, const std::string& path);
void write_error_csv(const Trajectory& traj, const std::vector<double>& errors,
                     const std::string& path);

/// Atomic small-file write used for reports.
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace dflin

#endif  // DFLIN_INTEGRATOR_HPP_
