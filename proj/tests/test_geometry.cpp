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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dflin/geometry.hpp"
#include "dflin/linearizability.hpp"
#include "dflin/presets.hpp"

using namespace dflin;

TEST_CASE("builtin maps satisfy both axioms") {
  const auto pts = sample_points(3, 50, 17, always_valid(), 1.0);
  for (MapKind kind :
       {MapKind::ExplicitEuler, MapKind::ImplicitEuler, MapKind::Midpoint}) {
    const DiscretizationMap d = make_builtin_map(kind, 3);
    const AxiomReport rep = check_map_axioms(d, pts);
    INFO("map ", to_string(kind));
    CHECK(rep.passed);
  }
}

TEST_CASE("a broken map fails the tangent axiom") {
  DiscretizationMap d = make_builtin_map(MapKind::ExplicitEuler, 3);
  d.forward = [](const VecXd& x, const VecXd& v) {
    return std::make_pair(x, VecXd(x + 2.0 * v));
  };
  const auto pts = sample_points(3, 10, 19);
  const AxiomReport rep = check_map_axioms(d, pts);
  CHECK_FALSE(rep.passed);
  CHECK(rep.worst_tangent_violation == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("builtin map inverses are exact") {
  const auto pts = sample_points(4, 20, 23);
  for (MapKind kind :
       {MapKind::ExplicitEuler, MapKind::ImplicitEuler, MapKind::Midpoint}) {
    const DiscretizationMap d = make_builtin_map(kind, 4);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      auto [x, v] = d.inverse(pts[i], pts[i + 1]);
      auto [x0, x1] = d.forward(x, v);
      CHECK((x0 - pts[i]).lpNorm<Eigen::Infinity>() <= 1e-12);
      CHECK((x1 - pts[i + 1]).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
  }
}

TEST_CASE("retraction maps convert and invert") {
  RetractionMap r;
  r.dim = 2;
  // Exponential-style retraction with a curvature term.
  r.R = [](const VecXd& x, const VecXd& v) {
    VecXd y = x + v;
    y(0) += 0.5 * v(1) * v(1);
    return y;
  };
  const DiscretizationMap d = retraction_to_discretization(r);
  const auto pts = sample_points(2, 30, 29);
  CHECK(check_map_axioms(d, pts).passed);

  VecXd x(2), v(2);
  x << 0.2, -0.1;
  v << 0.4, 0.3;
  auto [fx0, fx1] = d.forward(x, v);
  auto [bx, bv] = d.inverse(fx0, fx1);
  CHECK((bv - v).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("lifting preserves the axioms") {
  const ScenarioPreset p = unicycle_preset();
  const Diffeomorphism phi_inv =
      Diffeomorphism::from_linearization_inverse(p.lin);
  const auto pts = sample_points(5, 40, 31, p.ext.domain_guard);
  for (MapKind kind :
       {MapKind::ExplicitEuler, MapKind::ImplicitEuler, MapKind::Midpoint}) {
    const DiscretizationMap lifted =
        lift_map(make_builtin_map(kind, 5), phi_inv);
    CHECK(lifted.kind == MapKind::Lifted);
    const AxiomReport rep = check_map_axioms(lifted, pts);
    INFO("lift of ", to_string(kind));
    CHECK(rep.passed);
  }
}

TEST_CASE("lifted map forward/inverse are mutually consistent") {
  const ScenarioPreset p = unicycle_preset();
  const DiscretizationMap lifted =
      lift_map(make_builtin_map(MapKind::ExplicitEuler, 5),
               Diffeomorphism::from_linearization_inverse(p.lin));
  const auto pts = sample_points(5, 10, 37, p.ext.domain_guard, 0.2);
  for (const VecXd& xi : pts) {
    const VecXd w = 0.01 * VecXd::Ones(5);
    auto [a, b] = lifted.forward(xi, w);
    auto [x, v] = lifted.inverse(a, b);
    CHECK((x - a).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK((v - w).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("diffeomorphism wrappers round-trip") {
  const ScenarioPreset p = unicycle_preset();
  const Diffeomorphism fwd = Diffeomorphism::from_linearization(p.lin);
  const Diffeomorphism bwd =
      Diffeomorphism::from_linearization_inverse(p.lin);
  const auto pts = sample_points(5, 15, 41, p.ext.domain_guard);
  for (const VecXd& xi : pts) {
    CHECK((fwd.inverse(fwd.forward(xi)) - xi).lpNorm<Eigen::Infinity>() <=
          1e-10);
    const VecXd z = p.lin.phi(xi);
    CHECK((bwd.forward(z) - xi).lpNorm<Eigen::Infinity>() <= 1e-10);
    // Jacobians of mutually inverse maps multiply to the identity.
    const MatXd prod = fwd.jacobian_at(xi) * bwd.jacobian_at(z);
    CHECK((prod - MatXd::Identity(5, 5)).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("identity diffeomorphism lifts to the same map") {
  const DiscretizationMap base = make_builtin_map(MapKind::Midpoint, 3);
  const DiscretizationMap lifted =
      lift_map(base, Diffeomorphism::identity(3));
  const auto pts = sample_points(3, 10, 43);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    auto [a0, a1] = base.forward(pts[i], pts[i + 1]);
    auto [b0, b1] = lifted.forward(pts[i], pts[i + 1]);
    CHECK((a0 - b0).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((a1 - b1).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("map kind strings round-trip") {
  for (MapKind kind :
       {MapKind::ExplicitEuler, MapKind::ImplicitEuler, MapKind::Midpoint,
        MapKind::Lifted, MapKind::FromRetraction, MapKind::Custom}) {
    CHECK(map_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(map_kind_from_string("rk4"), DimensionError);
}
