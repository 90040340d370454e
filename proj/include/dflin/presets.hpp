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

#ifndef DFLIN_PRESETS_HPP_
#define DFLIN_PRESETS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "dflin/integrator.hpp"
#include "dflin/linearizability.hpp"
#include "dflin/systems.hpp"

namespace dflin {

/// A ready-to-run scenario: system, compensator, linearizing data,
/// initial state, default gains/step/horizon.
struct ScenarioPreset {
  std::string name;
  ControlAffineSystem system;
  DynamicCompensator compensator;
  ExtendedSystem ext;
  LinearizingData lin;
  VecXd xi0;
  MatXd gains;  // v = -gains * z, one row per input channel
  double h = 0.0;
  double t_final = 0.0;
};

/// Planar vehicle with a one-dimensional integrator compensator on the
/// second input; the flat coordinates are
/// (x1 - x2^2, x2, x3 + x4 w, x4, (1 + x3) w) on the chart
/// 1 + x3 - w x4 > 0.
ScenarioPreset unicycle_preset();

std::vector<std::string> preset_names();
ScenarioPreset preset_by_name(const std::string& name);

/// v_k = -gains * Phi(xi_k), then mu_k = alpha~(xi_k) + beta~(xi_k) v_k.
Controller stabilizing_controller(
    const ScenarioPreset& preset,
    const std::optional<MatXd>& gains = std::nullopt);

/// One-step map  (xi, mu) -> xi + h (F(xi) + G(xi) mu)  as an audit model.
DiscreteMapModel euler_map_model(const ExtendedSystem& ext, double h);

/// One-step map of the scheme lifted through Phi:
/// (xi, mu) -> Phi^{-1}(Phi(xi) + h DPhi(xi) (F(xi) + G(xi) mu)).
/// Requires a closed-form inverse on the linearizing data so the model
/// stays differentiable for the audit.
DiscreteMapModel lifted_euler_map_model(const ExtendedSystem& ext,
                                        const LinearizingData& lin, double h);

}  // namespace dflin

#endif  // DFLIN_PRESETS_HPP_
