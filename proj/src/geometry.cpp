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

#include "dflin/geometry.hpp"

#include <Eigen/LU>

namespace dflin {

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::ExplicitEuler: return "explicit-euler";
    case MapKind::ImplicitEuler: return "implicit-euler";
    case MapKind::Midpoint: return "midpoint";
    case MapKind::Lifted: return "lifted";
    case MapKind::FromRetraction: return "from-retraction";
    case MapKind::Custom: return "custom";
  }
  return "custom";
}

MapKind map_kind_from_string(const std::string& name) {
  if (name == "explicit-euler") return MapKind::ExplicitEuler;
  if (name == "implicit-euler") return MapKind::ImplicitEuler;
  if (name == "midpoint") return MapKind::Midpoint;
  if (name == "lifted") return MapKind::Lifted;
  if (name == "from-retraction") return MapKind::FromRetraction;
  if (name == "custom") return MapKind::Custom;
  throw DimensionError("unknown discretization map kind: " + name);
}

Diffeomorphism Diffeomorphism::identity(int dim) {
  Diffeomorphism d;
  d.forward = SmoothVectorFun::make<2>(dim, dim, [](const auto& x) {
    return x.eval();
  });
  d.inverse = [](const VecXd& y) { return y; };
  d.jac = SmoothMatrixFun::make<2>(dim, dim, dim, [dim](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    return MatX<S>::Identity(dim, dim).eval();
  });
  return d;
}

Diffeomorphism Diffeomorphism::from_linearization(const LinearizingData& lin) {
  Diffeomorphism d;
  d.forward = lin.phi;
  d.jac = lin.dphi;
  d.chart_guard = lin.chart_guard;
  d.inverse = [lin](const VecXd& z) { return inverse_transform(lin, z); };
  return d;
}

Diffeomorphism Diffeomorphism::from_linearization_inverse(
    const LinearizingData& lin) {
  Diffeomorphism d;
  if (lin.phi_inv) {
    d.forward = *lin.phi_inv;
  } else {
    d.forward = SmoothVectorFun::make_plain(
        lin.phi.out_dim(), lin.phi.in_dim(),
        [lin](const VecXd& z) { return inverse_transform(lin, z); });
  }
  d.inverse = [phi = lin.phi](const VecXd& xi) { return phi(xi); };
  const int dim = lin.phi.in_dim();
  // DPhi^{-1}(z) = (DPhi(Phi^{-1}(z)))^{-1}
  d.jac = SmoothMatrixFun::make_plain(
      dim, dim, dim, [lin](const VecXd& z) -> MatXd {
        const VecXd xi = inverse_transform(lin, z);
        return Eigen::PartialPivLU<MatXd>(lin.phi_jacobian(xi))
            .inverse();
      });
  d.chart_guard = [lin](const VecXd& z) {
    try {
      return lin.chart_guard(inverse_transform(lin, z));
    } catch (const DomainError&) {
      return false;
    } catch (const NewtonError&) {
      return false;
    }
  };
  return d;
}

Diffeomorphism compose(const Diffeomorphism& b, const Diffeomorphism& a) {
  Diffeomorphism c;
  const SmoothVectorFun fa = a.forward, fb = b.forward;
  const int depth = std::min(fa.depth(), fb.depth());
  auto fwd = [fa, fb](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    return fb.eval(VecX<S>(fa.eval(VecX<S>(x)))).eval();
  };
  if (depth >= 2)
    c.forward = SmoothVectorFun::make<2>(fa.in_dim(), fb.out_dim(), fwd);
  else if (depth == 1)
    c.forward = SmoothVectorFun::make<1>(fa.in_dim(), fb.out_dim(), fwd);
  else
    c.forward = SmoothVectorFun::make<0>(fa.in_dim(), fb.out_dim(), fwd);
  c.inverse = [ia = a.inverse, ib = b.inverse](const VecXd& y) {
    return ia(ib(y));
  };
  if (a.jac || b.jac) {
    // Chain rule through the available closed forms.
    c.jac.reset();
  }
  c.chart_guard = [ga = a.chart_guard, gb = b.chart_guard,
                   fa](const VecXd& x) { return ga(x) && gb(fa(x)); };
  return c;
}

DiscretizationMap make_builtin_map(MapKind kind, int dim) {
  if (dim < 1) throw DimensionError("make_builtin_map: dim must be >= 1");
  DiscretizationMap d;
  d.dim = dim;
  d.kind = kind;
  switch (kind) {
    case MapKind::ExplicitEuler:
      d.forward = [](const VecXd& x, const VecXd& v) {
        return std::make_pair(x, VecXd(x + v));
      };
      d.inverse = [](const VecXd& x0, const VecXd& x1) {
        return std::make_pair(x0, VecXd(x1 - x0));
      };
      break;
    case MapKind::ImplicitEuler:
      d.forward = [](const VecXd& x, const VecXd& v) {
        return std::make_pair(VecXd(x - v), x);
      };
      d.inverse = [](const VecXd& x0, const VecXd& x1) {
        return std::make_pair(x1, VecXd(x1 - x0));
      };
      break;
    case MapKind::Midpoint:
      d.forward = [](const VecXd& x, const VecXd& v) {
        return std::make_pair(VecXd(x - v / 2.0), VecXd(x + v / 2.0));
      };
      d.inverse = [](const VecXd& x0, const VecXd& x1) {
        return std::make_pair(VecXd((x0 + x1) / 2.0), VecXd(x1 - x0));
      };
      break;
    default:
      throw DimensionError("make_builtin_map: not a builtin kind: " +
                           to_string(kind));
  }
  return d;
}

DiscretizationMap retraction_to_discretization(const RetractionMap& r) {
  DiscretizationMap d;
  d.dim = r.dim;
  d.kind = MapKind::FromRetraction;
  d.forward = [R = r.R](const VecXd& x, const VecXd& v) {
    return std::make_pair(x, R(x, v));
  };
  d.inverse = [R = r.R](const VecXd& x0, const VecXd& x1) {
    auto residual = [&](const VecXd& v) -> VecXd { return R(x0, v) - x1; };
    VecXd v = newton_solve(residual, VecXd(x1 - x0), 1e-12, 50);
    return std::make_pair(x0, v);
  };
  return d;
}

DiscretizationMap lift_map(const DiscretizationMap& d,
                           const Diffeomorphism& phi) {
  DiscretizationMap out;
  out.dim = d.dim;
  out.kind = MapKind::Lifted;
  out.forward = [d, phi](const VecXd& y, const VecXd& ydot) {
    const VecXd x = phi.inverse(y);
    if (!phi.chart_guard(x))
      throw DomainError("lift_map: base point leaves the chart");
    const MatXd dphi = phi.jacobian_at(x);
    const VecXd v = Eigen::PartialPivLU<MatXd>(dphi).solve(ydot);
    auto [a, b] = d.forward(x, v);
    return std::make_pair(phi.forward(a), phi.forward(b));
  };
  out.inverse = [d, phi](const VecXd& y0, const VecXd& y1) {
    auto [x, v] = d.inverse(phi.inverse(y0), phi.inverse(y1));
    const MatXd dphi = phi.jacobian_at(x);
    return std::make_pair(phi.forward(x), VecXd(dphi * v));
  };
  return out;
}

namespace {

AxiomReport check_pair_axioms(
    int dim,
    const std::function<std::pair<VecXd, VecXd>(const VecXd&, const VecXd&)>&
        forward,
    const std::vector<VecXd>& points) {
  AxiomReport report;
  report.passed = true;
  const double fd_step = 1e-6;
  for (const VecXd& x : points) {
    const VecXd zero = VecXd::Zero(dim);
    auto [b0, b1] = forward(x, zero);
    const double base_violation = std::max(
        (b0 - x).lpNorm<Eigen::Infinity>(), (b1 - x).lpNorm<Eigen::Infinity>());
    // axiom 2: d(D2 - D1)/dv at v = 0 equals the identity
    MatXd deriv(dim, dim);
    for (int j = 0; j < dim; ++j) {
      VecXd vp = zero, vm = zero;
      vp(j) = fd_step;
      vm(j) = -fd_step;
      auto [p0, p1] = forward(x, vp);
      auto [m0, m1] = forward(x, vm);
      deriv.col(j) = ((p1 - p0) - (m1 - m0)) / (2.0 * fd_step);
    }
    const double tangent_violation =
        (deriv - MatXd::Identity(dim, dim)).lpNorm<Eigen::Infinity>();
    if (base_violation > report.worst_base_violation ||
        tangent_violation > report.worst_tangent_violation) {
      report.worst_point = x;
    }
    report.worst_base_violation =
        std::max(report.worst_base_violation, base_violation);
    report.worst_tangent_violation =
        std::max(report.worst_tangent_violation, tangent_violation);
  }
  report.passed = report.worst_base_violation <= 1e-12 &&
                  report.worst_tangent_violation <= 1e-6;
  return report;
}

}  // namespace

AxiomReport check_map_axioms(const DiscretizationMap& d,
                             const std::vector<VecXd>& points) {
  return check_pair_axioms(d.dim, d.forward, points);
}

AxiomReport check_retraction_axioms(const RetractionMap& r,
                                    const std::vector<VecXd>& points) {
  auto forward = [&r](const VecXd& x, const VecXd& v) {
    return std::make_pair(x, r.R(x, v));
  };
  return check_pair_axioms(r.dim, forward, points);
}

}  // namespace dflin
