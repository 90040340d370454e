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

#ifndef DFLIN_GEOMETRY_HPP_
#define DFLIN_GEOMETRY_HPP_

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dflin/systems.hpp"

namespace dflin {

/// R(x, v): maps a tangent vector at x back to the space, fixing base
/// points and first-order structure.
struct RetractionMap {
  int dim = 0;
  std::function<VecXd(const VecXd&, const VecXd&)> R;
};

enum class MapKind {
  ExplicitEuler,
  ImplicitEuler,
  Midpoint,
  Lifted,
  FromRetraction,
  Custom,
};

std::string to_string(MapKind kind);
MapKind map_kind_from_string(const std::string& name);

/// Two-point discretization map D(x, v) = (D1, D2) with inverse.
struct DiscretizationMap {
  int dim = 0;
  MapKind kind = MapKind::Custom;
  /// (x, v) -> (x0, x1)
  std::function<std::pair<VecXd, VecXd>(const VecXd&, const VecXd&)> forward;
  /// (x0, x1) -> (x, v); closed form for builtins, Newton otherwise.
  std::function<std::pair<VecXd, VecXd>(const VecXd&, const VecXd&)> inverse;
};

/// Invertible coordinate change with forward map, inverse, and Jacobian.
struct Diffeomorphism {
  SmoothVectorFun forward;
  std::function<VecXd(const VecXd&)> inverse;
  std::optional<SmoothMatrixFun> jac;  // closed-form Jacobian of `forward`
  Guard chart_guard = always_valid();

  MatXd jacobian_at(const VecXd& x) const {
    if (jac) return (*jac)(x);
    return jacobian(forward, x);
  }

  static Diffeomorphism identity(int dim);
  /// Chart change z = Phi(xi) packaged from linearizing data.
  static Diffeomorphism from_linearization(const LinearizingData& lin);
  /// The reverse chart change xi = Phi^{-1}(z).
  static Diffeomorphism from_linearization_inverse(const LinearizingData& lin);
};

/// Composition b after a (apply a first).
Diffeomorphism compose(const Diffeomorphism& b, const Diffeomorphism& a);

struct AxiomReport {
  bool passed = false;
  double worst_base_violation = 0.0;   // axiom 1: D(x,0) = (x,x)
  double worst_tangent_violation = 0.0;  // axiom 2: derivative identity
  VecXd worst_point;
};

DiscretizationMap make_builtin_map(MapKind kind, int dim);

/// D(x, v) = (x, R(x, v)); inverse solves R(x0, v) = x1 by Newton.
DiscretizationMap retraction_to_discretization(const RetractionMap& r);

/// D_phi = (phi x phi) o D o T(phi^{-1}).
DiscretizationMap lift_map(const DiscretizationMap& d,
                           const Diffeomorphism& phi);

/// Verifies D(x,0) = (x,x) to 1e-12 and the v-derivative identity
/// (dD2/dv - dD1/dv)|_{v=0} = I to 1e-6 (central differences, step 1e-6).
AxiomReport check_map_axioms(const DiscretizationMap& d,
                             const std::vector<VecXd>& points);

AxiomReport check_retraction_axioms(const RetractionMap& r,
                                    const std::vector<VecXd>& points);

}  // namespace dflin

#endif  // DFLIN_GEOMETRY_HPP_
