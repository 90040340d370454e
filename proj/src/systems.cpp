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

#include "dflin/systems.hpp"

#include <algorithm>

namespace dflin {

DynamicCompensator DynamicCompensator::identity(int n, int m) {
  DynamicCompensator c;
  c.q = 0;
  c.alpha = SmoothVectorFun::make<2>(n, m, [m](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    return VecX<S>::Zero(m).eval();
  });
  c.beta = SmoothMatrixFun::make<2>(n, m, m, [m](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    return MatX<S>::Identity(m, m).eval();
  });
  c.gamma = SmoothVectorFun::make<2>(n, 0, [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    return VecX<S>::Zero(0).eval();
  });
  c.delta = SmoothMatrixFun::make<2>(n, 0, m, [m](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    return MatX<S>::Zero(0, m).eval();
  });
  c.w0 = VecXd::Zero(0);
  return c;
}

ExtendedSystem extend(const ControlAffineSystem& sys,
                      const DynamicCompensator& comp) {
  const int n = sys.n, m = sys.m, q = comp.q;
  if (comp.alpha.out_dim() != m)
    throw DimensionError("extend: alpha must map into R^m");
  if (comp.beta.rows() != m || comp.beta.cols() != m)
    throw DimensionError("extend: beta must be m x m");
  if (comp.gamma.out_dim() != q)
    throw DimensionError("extend: gamma must map into R^q");
  if (comp.delta.rows() != q || comp.delta.cols() != m)
    throw DimensionError("extend: delta must be q x m");
  if (sys.f.out_dim() != n || sys.g.rows() != n || sys.g.cols() != m)
    throw DimensionError("extend: system f/g dimensions inconsistent");

  const SmoothVectorFun f = sys.f;
  const SmoothMatrixFun g = sys.g;
  const SmoothVectorFun alpha = comp.alpha;
  const SmoothMatrixFun beta = comp.beta;
  const SmoothVectorFun gamma = comp.gamma;
  const SmoothMatrixFun delta = comp.delta;

  const int depth = std::min({f.depth(), g.depth(), alpha.depth(),
                              beta.depth(), gamma.depth(), delta.depth()});

  ExtendedSystem ext;
  ext.n_ext = n + q;
  ext.m = m;
  ext.provenance = "extend(control-affine system, dynamic compensator)";
  ext.domain_guard = sys.domain_guard
                         ? Guard([guard = sys.domain_guard, n](const VecXd& xi) {
                             return guard(xi.head(n));
                           })
                         : always_valid();

  // First n rows: f + g alpha; last q rows: gamma  (drift block).
  auto f_ext = [f, g, alpha, gamma, n, q](const auto& xi) {
    using S = typename std::decay_t<decltype(xi)>::Scalar;
    VecX<S> x = xi.head(n);
    VecX<S> out(n + q);
    out.head(n) = f.eval(x) + g.eval(x) * alpha.eval(VecX<S>(xi));
    out.tail(q) = gamma.eval(VecX<S>(xi));
    return out;
  };
  // First n rows: g beta; last q rows: delta  (input block).
  auto g_ext = [g, beta, delta, n, q, m](const auto& xi) {
    using S = typename std::decay_t<decltype(xi)>::Scalar;
    VecX<S> x = xi.head(n);
    MatX<S> out(n + q, m);
    out.topRows(n) = g.eval(x) * beta.eval(VecX<S>(xi));
    out.bottomRows(q) = delta.eval(VecX<S>(xi));
    return out;
  };
  if (depth >= 2) {
    ext.F = SmoothVectorFun::make<2>(n + q, n + q, f_ext);
    ext.G = SmoothMatrixFun::make<2>(n + q, n + q, m, g_ext);
  } else if (depth == 1) {
    ext.F = SmoothVectorFun::make<1>(n + q, n + q, f_ext);
    ext.G = SmoothMatrixFun::make<1>(n + q, n + q, m, g_ext);
  } else {
    ext.F = SmoothVectorFun::make<0>(n + q, n + q, f_ext);
    ext.G = SmoothMatrixFun::make<0>(n + q, n + q, m, g_ext);
  }
  return ext;
}

VecXd eval_dynamics(const ExtendedSystem& ext, const VecXd& xi,
                    const VecXd& mu) {
  if (xi.size() != ext.n_ext || mu.size() != ext.m)
    throw DimensionError("eval_dynamics: dimension mismatch");
  if (!ext.domain_guard(xi))
    throw DomainError("eval_dynamics: point violates the domain guard");
  return ext.F(xi) + ext.G(xi) * mu;
}

VecXd apply_feedback(const LinearizingData& lin, const VecXd& xi,
                     const VecXd& v) {
  if (!lin.chart_guard(xi))
    throw SingularityError("apply_feedback: point violates the chart guard");
  return lin.alpha_tilde(xi) + lin.beta_tilde(xi) * v;
}

VecXd inverse_transform(const LinearizingData& lin, const VecXd& z,
                        const std::optional<VecXd>& hint) {
  if (lin.phi_inv) return (*lin.phi_inv)(z);
  VecXd seed = hint.value_or(VecXd(z));
  auto residual = [&lin, &z](const VecXd& xi) -> VecXd {
    return lin.phi(xi) - z;
  };
  try {
    return newton_solve(residual, seed, 1e-10, 50, /*damped=*/true);
  } catch (const NewtonError& e) {
    throw NewtonError(
        "inverse_transform: Newton failed to invert Phi (residual " +
            std::to_string(e.last_residual) + ")",
        e.last_residual, e.iterations);
  }
}

LinearizationReport verify_linearization(const ExtendedSystem& ext,
                                         const LinearizingData& lin,
                                         const std::vector<VecXd>& points) {
  LinearizationReport report;
  for (const VecXd& xi : points) {
    const MatXd dphi = lin.phi_jacobian(xi);
    const VecXd a = lin.alpha_tilde(xi);
    const MatXd b = lin.beta_tilde(xi);
    const VecXd dyn =
        dphi * (ext.F(xi) + ext.G(xi) * a) - lin.A * lin.phi(xi);
    const MatXd inp = dphi * ext.G(xi) * b - lin.B;
    report.max_dynamics_residual =
        std::max(report.max_dynamics_residual, dyn.norm());
    report.max_input_residual =
        std::max(report.max_input_residual, inp.norm());
  }
  report.passed = report.max_dynamics_residual <= 1e-9 &&
                  report.max_input_residual <= 1e-9;
  return report;
}

}  // namespace dflin
