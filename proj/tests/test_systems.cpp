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

#include "dflin/linearizability.hpp"
#include "dflin/presets.hpp"
#include "dflin/systems.hpp"

using namespace dflin;

TEST_CASE("extend stacks drift and compensator dynamics") {
  const ScenarioPreset p = unicycle_preset();
  CHECK(p.ext.n_ext == 5);
  CHECK(p.ext.m == 2);

  VecXd xi(5);
  xi << 0.5, 0.2, 0.1, 0.2, 0.0;
  const VecXd f0 = p.ext.F(xi);
  VecXd expected(5);
  expected << 0.24, 0.1, 0.0, 0.0, 0.0;
  CHECK((f0 - expected).lpNorm<Eigen::Infinity>() <= 1e-14);

  // G columns: mu1 enters x3', mu2 enters w'.
  const MatXd g0 = p.ext.G(xi);
  CHECK(g0(2, 0) == doctest::Approx(1.0));
  CHECK(g0(4, 1) == doctest::Approx(1.0));
  CHECK(g0.cwiseAbs().sum() == doctest::Approx(2.0));
}

TEST_CASE("extend with the identity compensator is a no-op") {
  const ScenarioPreset p = unicycle_preset();
  const ExtendedSystem same =
      extend(p.system, DynamicCompensator::identity(4, 2));
  CHECK(same.n_ext == 4);
  VecXd x(4);
  x << 0.1, 0.2, 0.3, 0.4;
  CHECK((same.F(x) - p.system.f(x)).lpNorm<Eigen::Infinity>() <= 1e-14);
  VecXd mu(2);
  mu << 0.5, -0.5;
  CHECK((eval_dynamics(same, x, mu) - p.system.f(x) - p.system.g(x) * mu)
            .lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("extend rejects dimension mismatches") {
  const ScenarioPreset p = unicycle_preset();
  DynamicCompensator bad = p.compensator;
  bad.alpha = SmoothVectorFun::make<2>(5, 3, [](const auto& xi) {
    using S = typename std::decay_t<decltype(xi)>::Scalar;
    return VecX<S>(VecX<S>::Zero(3));
  });
  CHECK_THROWS_AS(extend(p.system, bad), DimensionError);
}

TEST_CASE("feedback is affine in v") {
  const ScenarioPreset p = unicycle_preset();
  const auto pts = sample_points(5, 10, 21, p.ext.domain_guard);
  for (const VecXd& xi : pts) {
    VecXd v1(2), v2(2);
    v1 << 0.3, -0.4;
    v2 << -1.1, 0.6;
    const VecXd m0 = apply_feedback(p.lin, xi, VecXd::Zero(2));
    const VecXd m1 = apply_feedback(p.lin, xi, v1);
    const VecXd m2 = apply_feedback(p.lin, xi, v2);
    // mu(v1 + v2) - mu(0) = (mu(v1) - mu(0)) + (mu(v2) - mu(0))
    const VecXd lhs = apply_feedback(p.lin, xi, v1 + v2) - m0;
    CHECK((lhs - (m1 - m0) - (m2 - m0)).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("feedback refuses points off the chart") {
  const ScenarioPreset p = unicycle_preset();
  VecXd xi(5);
  xi << 0.0, 0.0, -1.0, 0.0, 0.0;  // 1 + x3 - w x4 = 0
  CHECK_THROWS_AS(apply_feedback(p.lin, xi, VecXd::Zero(2)),
                  SingularityError);
}

TEST_CASE("inverse_transform round-trips the closed form and Newton") {
  ScenarioPreset p = unicycle_preset();
  const auto pts = sample_points(5, 20, 33, p.ext.domain_guard);
  for (const VecXd& xi : pts) {
    const VecXd z = p.lin.phi(xi);
    CHECK((inverse_transform(p.lin, z) - xi).lpNorm<Eigen::Infinity>() <=
          1e-10);
  }
  // Drop the closed form: Newton from a hint must still recover xi.
  LinearizingData newton_only = p.lin;
  newton_only.phi_inv.reset();
  for (const VecXd& xi : pts) {
    const VecXd z = p.lin.phi(xi);
    const VecXd hint = xi + 0.05 * VecXd::Ones(5);
    CHECK((inverse_transform(newton_only, z, hint) - xi)
              .lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("verify_linearization accepts the preset and rejects a corruption") {
  const ScenarioPreset p = unicycle_preset();
  const auto pts = sample_points(5, 25, 7, p.ext.domain_guard);
  const LinearizationReport good = verify_linearization(p.ext, p.lin, pts);
  CHECK(good.passed);
  CHECK(good.max_dynamics_residual <= 1e-9);
  CHECK(good.max_input_residual <= 1e-9);

  LinearizingData wrong = p.lin;
  wrong.A = MatXd::Zero(5, 5);
  const LinearizationReport bad = verify_linearization(p.ext, wrong, pts);
  CHECK_FALSE(bad.passed);
}
