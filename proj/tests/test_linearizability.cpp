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

using namespace dflin;

namespace {

SmoothVectorFun g_column(const SmoothMatrixFun& g, int n, int i) {
  return SmoothVectorFun::make<2>(n, n, [g, i](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    return VecX<S>(g.eval(VecX<S>(x)).col(i));
  });
}

}  // namespace

TEST_CASE("lie bracket of the input fields is the constant e4") {
  const ScenarioPreset p = unicycle_preset();
  const SmoothVectorFun g1 = g_column(p.system.g, 4, 0);
  const SmoothVectorFun g2 = g_column(p.system.g, 4, 1);
  VecXd e4 = VecXd::Zero(4);
  e4(3) = 1.0;
  for (const VecXd& x : sample_points(4, 30, 3, always_valid(), 1.0)) {
    const VecXd br = lie_bracket(g1, g2, x);
    CHECK((br - e4).lpNorm<Eigen::Infinity>() <= 1e-8);
    // antisymmetry
    CHECK((lie_bracket(g2, g1, x) + br).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("brackets of constant fields vanish") {
  VecXd a(3), b(3);
  a << 1.0, 2.0, 3.0;
  b << -1.0, 0.0, 4.0;
  const Distribution d = Distribution::from_constants({a, b}, 3);
  const VecXd x = VecXd::Ones(3);
  CHECK(lie_bracket(d.generators[0], d.generators[1], x).norm() <= 1e-12);
}

TEST_CASE("bracket fields nest one level down") {
  const ScenarioPreset p = unicycle_preset();
  const SmoothVectorFun g2 = g_column(p.system.g, 4, 1);
  const SmoothVectorFun fg2 = lie_bracket_field(p.system.f, g2);
  CHECK(fg2.depth() == 1);
  // [f, [f, g2]] still evaluable (AD at the first level, FD below).
  const SmoothVectorFun ffg2 = lie_bracket_field(p.system.f, fg2);
  const VecXd x = sample_points(4, 1, 5)[0];
  CHECK(ffg2(x).allFinite());
  // Consistency of the field against the pointwise bracket.
  CHECK((fg2(x) - lie_bracket(p.system.f, g2, x)).lpNorm<Eigen::Infinity>() <=
        1e-12);
}

TEST_CASE("kernel at the origin matches the closed form") {
  const ScenarioPreset p = unicycle_preset();
  const double h = 0.01;
  const DiscreteMapModel model = euler_map_model(p.ext, h);
  const auto fields = kernel_fields(model);
  REQUIRE(fields.size() == 2);
  const VecXd origin = VecXd::Zero(7);
  VecXd k1(7), k2(7);
  k1 << -h * h * h, h * h, -h, 0, 0, 1, 0;
  k2 << 0, 0, 0, h * h, -h, 0, 1;
  CHECK((fields[0](origin) - k1).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((fields[1](origin) - k2).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("kernel_distribution spans the smooth kernel fields") {
  const ScenarioPreset p = unicycle_preset();
  const DiscreteMapModel model = euler_map_model(p.ext, 0.01);
  const auto fields = kernel_fields(model);
  for (const VecXd& pt : sample_points(7, 10, 9, model.guard, 0.3)) {
    const Distribution constant_basis = kernel_distribution(model, pt);
    REQUIRE(constant_basis.generators.size() == 2);
    MatXd all(7, 4);
    all.leftCols(2) = constant_basis.evaluate(pt);
    all.col(2) = fields[0](pt);
    all.col(3) = fields[1](pt);
    CHECK(numerical_rank(all, 7) == 2);
  }
}

TEST_CASE("sum and intersection of distributions") {
  VecXd e1 = VecXd::Zero(3), e2 = VecXd::Zero(3), e3 = VecXd::Zero(3);
  e1(0) = 1.0;
  e2(1) = 1.0;
  e3(2) = 1.0;
  const Distribution a = Distribution::from_constants({e1, e2}, 3);
  const Distribution b = Distribution::from_constants({e2, e3}, 3);
  const VecXd x = VecXd::Zero(3);
  CHECK(dist_sum(a, b).rank_at(x) == 3);
  const Distribution inter = dist_intersect(a, b, x);
  REQUIRE(inter.generators.size() == 1);
  CHECK((inter.generators[0](x).cwiseAbs() - e2).lpNorm<Eigen::Infinity>() <=
        1e-12);
  // Disjoint spans intersect trivially.
  const Distribution none = dist_intersect(
      Distribution::from_constants({e1}, 3),
      Distribution::from_constants({e3}, 3), x);
  CHECK(none.generators.empty());
}

TEST_CASE("involutivity detects the classic escape") {
  // span{d/dx, d/dy + x d/dz} is the contact structure: not involutive.
  auto x_field = SmoothVectorFun::make<2>(3, 3, [](const auto& p) {
    using S = typename std::decay_t<decltype(p)>::Scalar;
    VecX<S> v = VecX<S>::Zero(3);
    v(0) = S(1.0);
    return v;
  });
  auto y_field = SmoothVectorFun::make<2>(3, 3, [](const auto& p) {
    using S = typename std::decay_t<decltype(p)>::Scalar;
    VecX<S> v = VecX<S>::Zero(3);
    v(1) = S(1.0);
    v(2) = p(0);
    return v;
  });
  Distribution contact;
  contact.dim = 3;
  contact.generators = {x_field, y_field};
  const auto pts = sample_points(3, 10, 13);
  const InvolutivityReport rep = involutive(contact, pts);
  CHECK_FALSE(rep.involutive);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->rank_before == 2);
  CHECK(rep.witness->rank_after == 3);

  // Dropping the twist restores involutivity.
  Distribution flat = contact;
  flat.generators[1] = x_field;
  CHECK(involutive(flat, pts).involutive);
}

TEST_CASE("euler audit reproduces the non-linearizability verdict") {
  const ScenarioPreset p = unicycle_preset();
  const DiscreteMapModel model = euler_map_model(p.ext, p.h);
  const auto pts = sample_points(7, 20, 11, model.guard, 0.3);
  const AuditReport rep = grizzle_audit(model, pts);
  CHECK(rep.verdict == AuditVerdict::NotLinearizable);
  CHECK(rep.failing_stage == "Delta_1 + K involutive");
  REQUIRE(rep.stages.size() == 4);
  CHECK(rep.stages[0].passed);  // Delta_0 + K involutive
  CHECK(rep.stages[1].passed);  // Delta_0 ^ K constant (zero) dimension
  CHECK(rep.stages[1].ranks.front() == 0);
  CHECK(rep.stages[2].passed);  // Delta_1 involutive
  CHECK_FALSE(rep.stages[3].passed);
  CHECK(rep.stages[3].witness.has_value());
}

TEST_CASE("lifted audit is consistent with linearizability") {
  const ScenarioPreset p = unicycle_preset();
  const DiscreteMapModel model = lifted_euler_map_model(p.ext, p.lin, p.h);
  const auto pts = sample_points(7, 20, 11, model.guard, 0.3);
  const AuditReport rep = grizzle_audit(model, pts);
  CHECK(rep.verdict == AuditVerdict::LinearizableConsistent);
  for (const AuditStage& s : rep.stages) CHECK(s.passed);
}

TEST_CASE("audit reports serialize") {
  const ScenarioPreset p = unicycle_preset();
  const DiscreteMapModel model = euler_map_model(p.ext, p.h);
  const auto pts = sample_points(7, 20, 11, model.guard, 0.3);
  const AuditReport rep = grizzle_audit(model, pts);
  const std::string text = rep.to_text();
  CHECK(text.find("NOT-LINEARIZABLE") != std::string::npos);
  const std::string json = rep.to_json();
  CHECK(json.find("\"verdict\"") != std::string::npos);
  CHECK(json.find("\"stages\"") != std::string::npos);
}

TEST_CASE("static FL check rejects the base system, accepts the extension") {
  const ScenarioPreset p = unicycle_preset();
  const auto pts4 = sample_points(4, 20, 13);
  const StaticFlReport base = static_fl_check(p.system, pts4);
  CHECK(base.verdict == AuditVerdict::NotLinearizable);
  CHECK(base.detail == "G_0 is not involutive");

  ControlAffineSystem ext_sys{p.ext.n_ext, p.ext.m, p.ext.F, p.ext.G,
                              p.ext.domain_guard};
  const auto pts5 = sample_points(5, 20, 13, p.ext.domain_guard, 0.3);
  const StaticFlReport lifted = static_fl_check(ext_sys, pts5);
  CHECK(lifted.linearizable());
  REQUIRE(lifted.ranks_per_level.size() == 3);
  CHECK(lifted.ranks_per_level[0].front() == 2);
  CHECK(lifted.ranks_per_level[1].front() == 4);
  CHECK(lifted.ranks_per_level[2].front() == 5);
}

TEST_CASE("static FL accepts a linear controllable chain") {
  // Double integrator: trivially static feedback linearizable.
  ControlAffineSystem chain;
  chain.n = 2;
  chain.m = 1;
  chain.f = SmoothVectorFun::make<2>(2, 2, [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    VecX<S> v(2);
    v << x(1), S(0.0);
    return v;
  });
  chain.g = SmoothMatrixFun::make<2>(2, 2, 1, [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    MatX<S> g = MatX<S>::Zero(2, 1);
    g(1, 0) = S(1.0);
    return g;
  });
  const StaticFlReport rep = static_fl_check(chain, sample_points(2, 10, 15));
  CHECK(rep.linearizable());
}

TEST_CASE("sample_points respects guards and is deterministic") {
  const Guard right_half = [](const VecXd& x) { return x(0) > 0.0; };
  const auto a = sample_points(3, 40, 99, right_half);
  const auto b = sample_points(3, 40, 99, right_half);
  REQUIRE(a.size() == 40);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i](0) > 0.0);
    CHECK((a[i] - b[i]).lpNorm<Eigen::Infinity>() == 0.0);
  }
  const Guard impossible = [](const VecXd&) { return false; };
  CHECK_THROWS_AS(sample_points(2, 5, 1, impossible), DomainError);
}
