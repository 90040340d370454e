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

#include "dflin/presets.hpp"

namespace dflin {

namespace {

// Chart of the flat coordinates: det [[1, x4], [w, 1+x3]] > 0.
bool unicycle_chart(const VecXd& xi) {
  return 1.0 + xi(2) - xi(4) * xi(3) > 0.0;
}

}  // namespace

ScenarioPreset unicycle_preset() {
  ScenarioPreset p;
  p.name = "unicycle";

  p.system.n = 4;
  p.system.m = 2;
  p.system.f = SmoothVectorFun::make<2>(4, 4, [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    VecX<S> out(4);
    out << x(1) + 2.0 * x(1) * x(2), x(2), S(0.0), S(0.0);
    return out;
  });
  p.system.g = SmoothMatrixFun::make<2>(4, 4, 2, [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    MatX<S> out = MatX<S>::Zero(4, 2);
    out(2, 0) = S(1.0);
    out(0, 1) = 2.0 * x(1) * x(3);
    out(1, 1) = x(3);
    out(3, 1) = 1.0 + x(2);
    return out;
  });

  // u1 = mu1, u2 = w, w' = mu2.
  p.compensator.q = 1;
  p.compensator.alpha = SmoothVectorFun::make<2>(5, 2, [](const auto& xi) {
    using S = typename std::decay_t<decltype(xi)>::Scalar;
    VecX<S> out(2);
    out << S(0.0), xi(4);
    return out;
  });
  p.compensator.beta = SmoothMatrixFun::make<2>(5, 2, 2, [](const auto& xi) {
    using S = typename std::decay_t<decltype(xi)>::Scalar;
    MatX<S> out = MatX<S>::Zero(2, 2);
    out(0, 0) = S(1.0);
    return out;
  });
  p.compensator.gamma = SmoothVectorFun::make<2>(5, 1, [](const auto& xi) {
    using S = typename std::decay_t<decltype(xi)>::Scalar;
    return VecX<S>(VecX<S>::Zero(1));
  });
  p.compensator.delta = SmoothMatrixFun::make<2>(5, 1, 2, [](const auto& xi) {
    using S = typename std::decay_t<decltype(xi)>::Scalar;
    MatX<S> out = MatX<S>::Zero(1, 2);
    out(0, 1) = S(1.0);
    return out;
  });
  p.compensator.w0 = VecXd::Zero(1);

  p.ext = extend(p.system, p.compensator);
  p.ext.domain_guard = unicycle_chart;
  p.ext.provenance = "unicycle preset";

  p.lin.phi = SmoothVectorFun::make<2>(5, 5, [](const auto& xi) {
    using S = typename std::decay_t<decltype(xi)>::Scalar;
    VecX<S> out(5);
    out << xi(0) - xi(1) * xi(1), xi(1), xi(2) + xi(3) * xi(4), xi(3),
        (1.0 + xi(2)) * xi(4);
    return out;
  });
  // Solving z3 = x3 + x4 w, z5 = (1 + x3) w gives the quadratic
  // z4 w^2 - (1 + z3) w + z5 = 0; the branch below keeps
  // 1 + x3 - w x4 = sqrt(disc) > 0 and degrades gracefully to the
  // linear solution when z4 = 0.
  p.lin.phi_inv = SmoothVectorFun::make<2>(5, 5, [](const auto& z) {
    using S = typename std::decay_t<decltype(z)>::Scalar;
    const S one_p_z3 = 1.0 + z(2);
    const S disc = one_p_z3 * one_p_z3 - 4.0 * z(3) * z(4);
    if (real_part(disc) <= 0.0)
      throw DomainError("unicycle inverse: point outside the chart image");
    const S denom = one_p_z3 + sqrt(disc);
    if (real_part(denom) == 0.0)
      throw DomainError("unicycle inverse: degenerate branch");
    const S w = 2.0 * z(4) / denom;
    VecX<S> xi(5);
    xi << z(0) + z(1) * z(1), z(1), z(2) - z(3) * w, z(3), w;
    return xi;
  });
  p.lin.dphi = SmoothMatrixFun::make<2>(5, 5, 5, [](const auto& xi) {
    using S = typename std::decay_t<decltype(xi)>::Scalar;
    MatX<S> d = MatX<S>::Zero(5, 5);
    d(0, 0) = S(1.0);
    d(0, 1) = -2.0 * xi(1);
    d(1, 1) = S(1.0);
    d(2, 2) = S(1.0);
    d(2, 3) = xi(4);
    d(2, 4) = xi(3);
    d(3, 3) = S(1.0);
    d(4, 2) = xi(4);
    d(4, 4) = 1.0 + xi(2);
    return d;
  });
  // mu = M^{-1} (v1 - (1+x3) w^2, v2) with M = [[1, x4], [w, 1+x3]].
  p.lin.beta_tilde = SmoothMatrixFun::make<2>(5, 2, 2, [](const auto& xi) {
    using S = typename std::decay_t<decltype(xi)>::Scalar;
    const S det = (1.0 + xi(2)) - xi(4) * xi(3);
    MatX<S> inv(2, 2);
    inv << (1.0 + xi(2)) / det, -xi(3) / det, -xi(4) / det, S(1.0) / det;
    return inv;
  });
  p.lin.alpha_tilde = SmoothVectorFun::make<2>(5, 2, [](const auto& xi) {
    using S = typename std::decay_t<decltype(xi)>::Scalar;
    const S det = (1.0 + xi(2)) - xi(4) * xi(3);
    const S offset = -(1.0 + xi(2)) * xi(4) * xi(4);
    VecX<S> out(2);
    out << (1.0 + xi(2)) / det * offset, -xi(4) / det * offset;
    return out;
  });
  p.lin.A = MatXd::Zero(5, 5);
  p.lin.A(0, 1) = 1.0;
  p.lin.A(1, 2) = 1.0;
  p.lin.A(3, 4) = 1.0;
  p.lin.B = MatXd::Zero(5, 2);
  p.lin.B(2, 0) = 1.0;
  p.lin.B(4, 1) = 1.0;
  p.lin.chart_guard = unicycle_chart;

  p.xi0 = VecXd(5);
  p.xi0 << 0.5, 0.2, 0.1, 0.2, 0.0;
  p.gains = MatXd::Zero(2, 5);
  p.gains.row(0) << 10.0, 10.0, 10.0, 0.0, 0.0;
  p.gains.row(1) << 0.0, 0.0, 0.0, 10.0, 10.0;
  p.h = 1e-2;
  p.t_final = 10.0;
  return p;
}

std::vector<std::string> preset_names() { return {"unicycle"}; }

ScenarioPreset preset_by_name(const std::string& name) {
  if (name == "unicycle") return unicycle_preset();
  throw DimensionError("unknown preset: " + name);
}

Controller stabilizing_controller(const ScenarioPreset& preset,
                                  const std::optional<MatXd>& gains) {
  const MatXd k = gains.value_or(preset.gains);
  if (k.rows() != preset.ext.m || k.cols() != preset.ext.n_ext)
    throw DimensionError("stabilizing_controller: gain matrix must be m x n");
  const LinearizingData lin = preset.lin;
  return [lin, k](int, const VecXd& xi) {
    const VecXd v = -k * lin.phi(xi);
    return apply_feedback(lin, xi, v);
  };
}

DiscreteMapModel euler_map_model(const ExtendedSystem& ext, double h) {
  DiscreteMapModel model;
  model.d_s = ext.n_ext;
  model.m = ext.m;
  const int n = ext.n_ext, m = ext.m;
  model.map = SmoothVectorFun::make<2>(
      n + m, n, [F = ext.F, G = ext.G, n, m, h](const auto& p) {
        using S = typename std::decay_t<decltype(p)>::Scalar;
        const VecX<S> xi = p.head(n);
        const VecX<S> mu = p.tail(m);
        return VecX<S>(xi + h * (F.eval(xi) + G.eval(xi) * mu));
      });
  model.guard = [guard = ext.domain_guard, n](const VecXd& p) {
    return guard(p.head(n));
  };
  return model;
}

DiscreteMapModel lifted_euler_map_model(const ExtendedSystem& ext,
                                        const LinearizingData& lin, double h) {
  if (!lin.phi_inv)
    throw DimensionError(
        "lifted_euler_map_model: closed-form inverse required");
  if (!lin.dphi)
    throw DimensionError(
        "lifted_euler_map_model: closed-form Jacobian required");
  DiscreteMapModel model;
  model.d_s = ext.n_ext;
  model.m = ext.m;
  const int n = ext.n_ext, m = ext.m;
  model.map = SmoothVectorFun::make<2>(
      n + m, n,
      [F = ext.F, G = ext.G, phi = lin.phi, phi_inv = *lin.phi_inv,
       dphi = *lin.dphi, n, m, h](const auto& p) {
        using S = typename std::decay_t<decltype(p)>::Scalar;
        const VecX<S> xi = p.head(n);
        const VecX<S> mu = p.tail(m);
        const VecX<S> z_next =
            phi.eval(xi) + h * (dphi.eval(xi) * (F.eval(xi) + G.eval(xi) * mu));
        return phi_inv.eval(z_next);
      });
  model.guard = [guard = lin.chart_guard, n](const VecXd& p) {
    return guard(p.head(n));
  };
  return model;
}

}  // namespace dflin
