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

#include "dflin/integrator.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/LU>

namespace dflin {

DiscreteScheme make_implicit_scheme(DiscretizationMap map, ExtendedSystem ext,
                                    double h) {
  if (h <= 0.0) throw DimensionError("make_implicit_scheme: h must be > 0");
  DiscreteScheme s;
  s.map = std::move(map);
  s.ext = std::move(ext);
  s.h = h;
  s.mode = SchemeMode::ImplicitGeneral;
  return s;
}

DiscreteScheme make_lifted_scheme(ExtendedSystem ext, LinearizingData lin,
                                  MapKind base_kind, double h) {
  if (h <= 0.0) throw DimensionError("make_lifted_scheme: h must be > 0");
  DiscreteScheme s;
  s.map = lift_map(make_builtin_map(base_kind, ext.n_ext),
                   Diffeomorphism::from_linearization_inverse(lin));
  s.ext = std::move(ext);
  s.h = h;
  s.mode = SchemeMode::LiftedFastPath;
  s.lin = std::move(lin);
  s.base_kind = base_kind;
  return s;
}

namespace {

VecXd step_implicit(const DiscreteScheme& scheme, const VecXd& xi,
                    const VecXd& mu) {
  const ExtendedSystem& ext = scheme.ext;
  const double h = scheme.h;
  auto residual = [&](const VecXd& xi_next) -> VecXd {
    auto [x, v] = scheme.map.inverse(xi, xi_next);
    return v - h * (ext.F(x) + ext.G(x) * mu);
  };
  const VecXd seed = xi + h * (ext.F(xi) + ext.G(xi) * mu);
  return newton_solve(residual, seed, 1e-12, 50);
}

VecXd step_lifted(const DiscreteScheme& scheme, const VecXd& xi,
                  const VecXd& mu) {
  const LinearizingData& lin = *scheme.lin;
  const ExtendedSystem& ext = scheme.ext;
  const double h = scheme.h;
  if (!lin.chart_guard(xi))
    throw DomainError("step: state left the linearization chart");
  const VecXd z = lin.phi(xi);
  // Pushforward of the controlled field to z-coordinates.
  auto zdot = [&](const VecXd& zq) -> VecXd {
    const VecXd xq = inverse_transform(lin, zq, xi);
    return lin.phi_jacobian(xq) * (ext.F(xq) + ext.G(xq) * mu);
  };
  VecXd z_next;
  switch (scheme.base_kind) {
    case MapKind::ExplicitEuler:
      z_next = z + h * zdot(z);
      break;
    case MapKind::ImplicitEuler: {
      auto residual = [&](const VecXd& zn) -> VecXd {
        return zn - z - h * zdot(zn);
      };
      z_next = newton_solve(residual, VecXd(z + h * zdot(z)), 1e-12, 50);
      break;
    }
    case MapKind::Midpoint: {
      auto residual = [&](const VecXd& zn) -> VecXd {
        return zn - z - h * zdot(0.5 * (z + zn));
      };
      z_next = newton_solve(residual, VecXd(z + h * zdot(z)), 1e-12, 50);
      break;
    }
    default:
      throw DimensionError("step: lifted fast path needs a builtin base map");
  }
  return inverse_transform(lin, z_next, xi);
}

}  // namespace

VecXd step(const DiscreteScheme& scheme, const VecXd& xi, const VecXd& mu) {
  if (scheme.mode == SchemeMode::LiftedFastPath) {
    if (!scheme.lin)
      throw DimensionError("step: fast path requires linearizing data");
    return step_lifted(scheme, xi, mu);
  }
  return step_implicit(scheme, xi, mu);
}

DiscreteLTI discretize_lti(const DiscretizationMap& map, const MatXd& a,
                           const MatXd& b, double h) {
  const int n = int(a.rows());
  const int m = int(b.cols());
  if (a.cols() != n || b.rows() != n)
    throw DimensionError("discretize_lti: inconsistent (A, B) dimensions");

  ExtendedSystem linear;
  linear.n_ext = n;
  linear.m = m;
  linear.F = SmoothVectorFun::make_plain(
      n, n, [a](const VecXd& z) -> VecXd { return a * z; });
  linear.G = SmoothMatrixFun::make_plain(
      n, n, m, [b](const VecXd&) -> MatXd { return b; });
  const DiscreteScheme scheme = make_implicit_scheme(map, linear, h);

  auto one_step = [&](const VecXd& z, const VecXd& v) {
    return step(scheme, z, v);
  };

  const VecXd origin_step = one_step(VecXd::Zero(n), VecXd::Zero(m));

  DiscreteLTI lti;
  lti.h = h;
  lti.A_h.resize(n, n);
  lti.B_h.resize(n, m);
  for (int j = 0; j < n; ++j)
    lti.A_h.col(j) = one_step(VecXd::Unit(n, j), VecXd::Zero(m)) - origin_step;
  for (int j = 0; j < m; ++j)
    lti.B_h.col(j) = one_step(VecXd::Zero(n), VecXd::Unit(m, j)) - origin_step;

  // Superposition test: the induced scheme must be affine in (z, v).
  double worst = origin_step.lpNorm<Eigen::Infinity>();
  const VecXd z1 = VecXd::Constant(n, 0.3), z2 = VecXd::Constant(n, -0.7);
  const VecXd v1 = VecXd::Constant(m, 0.5), v2 = VecXd::Constant(m, 0.2);
  const VecXd super = one_step(z1 + z2, v1 + v2) - one_step(z1, v1) -
                      one_step(z2, v2) + origin_step;
  worst = std::max(worst, super.lpNorm<Eigen::Infinity>());
  if (worst > 1e-9)
    throw DomainError(
        "discretize_lti: induced scheme is not affine (violation " +
        std::to_string(worst) + ")");
  return lti;
}

Trajectory simulate(const DiscreteScheme& scheme, const Controller& controller,
                    const VecXd& xi0, int steps) {
  Trajectory traj;
  traj.h = scheme.h;
  traj.states.reserve(std::size_t(steps) + 1);
  traj.controls.reserve(std::size_t(steps));
  traj.states.push_back(xi0);
  VecXd xi = xi0;
  for (int k = 0; k < steps; ++k) {
    try {
      const VecXd mu = controller(k, xi);
      xi = step(scheme, xi, mu);
      traj.controls.push_back(mu);
      traj.states.push_back(xi);
    } catch (const std::exception& e) {
      throw SimulationError(
          "simulate: step " + std::to_string(k) + " failed: " + e.what(),
          std::move(traj), std::size_t(k));
    }
  }
  return traj;
}

namespace {

VecXd rk4_segment(const ExtendedSystem& ext, VecXd xi, const VecXd& mu,
                  double h, int substeps) {
  const double hs = h / double(substeps);
  auto f = [&](const VecXd& x) -> VecXd { return ext.F(x) + ext.G(x) * mu; };
  for (int s = 0; s < substeps; ++s) {
    const VecXd k1 = f(xi);
    const VecXd k2 = f(xi + 0.5 * hs * k1);
    const VecXd k3 = f(xi + 0.5 * hs * k2);
    const VecXd k4 = f(xi + hs * k3);
    xi += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return xi;
}

constexpr int kReferenceSubsteps = 100;

}  // namespace

Trajectory reference_trajectory(const ExtendedSystem& ext,
                                const std::vector<VecXd>& controls,
                                const VecXd& xi0, double h, double t0) {
  Trajectory traj;
  traj.t0 = t0;
  traj.h = h;
  traj.states.push_back(xi0);
  VecXd xi = xi0;
  for (const VecXd& mu : controls) {
    xi = rk4_segment(ext, xi, mu, h, kReferenceSubsteps);
    traj.controls.push_back(mu);
    traj.states.push_back(xi);
  }
  return traj;
}

Trajectory reference_closed_loop(const ExtendedSystem& ext,
                                 const Controller& controller,
                                 const VecXd& xi0, double h, int steps,
                                 double t0) {
  Trajectory traj;
  traj.t0 = t0;
  traj.h = h;
  traj.states.push_back(xi0);
  VecXd xi = xi0;
  for (int k = 0; k < steps; ++k) {
    const VecXd mu = controller(k, xi);
    xi = rk4_segment(ext, xi, mu, h, kReferenceSubsteps);
    traj.controls.push_back(mu);
    traj.states.push_back(xi);
  }
  return traj;
}

std::vector<double> global_error(const Trajectory& traj,
                                 const Trajectory& ref) {
  if (traj.states.size() != ref.states.size() || traj.h != ref.h)
    throw DimensionError("global_error: trajectories on different grids");
  std::vector<double> errors;
  errors.reserve(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    errors.push_back((traj.states[k] - ref.states[k]).norm());
  return errors;
}

OrderEstimate order_estimate(const std::vector<double>& h_list,
                             const SchemeBuilder& builder,
                             const ExtendedSystem& ext,
                             const Controller& controller, const VecXd& xi0,
                             double t_final) {
  if (h_list.size() < 4)
    throw DimensionError("order_estimate: need at least 4 step sizes");
  OrderEstimate est;
  est.h_values = h_list;
  for (double h : h_list) {
    const int steps = int(std::lround(t_final / h));
    const DiscreteScheme scheme = builder(h);
    const Trajectory traj = simulate(scheme, controller, xi0, steps);
    const Trajectory ref =
        reference_trajectory(ext, traj.controls, xi0, h, traj.t0);
    const std::vector<double> errors = global_error(traj, ref);
    est.max_errors.push_back(
        *std::max_element(errors.begin(), errors.end()));
  }
  // least squares on log-log
  const std::size_t n = h_list.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (est.max_errors[i] < 1e-12) est.degenerate = true;
    const double x = std::log(h_list[i]);
    const double y = std::log(std::max(est.max_errors[i], 1e-300));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  est.slope = (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
  return est;
}

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << contents;
  }
  std::filesystem::rename(tmp, path);
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  const int n = traj.states.empty() ? 0 : int(traj.states.front().size());
  const int m = traj.controls.empty()
                    ? 0
                    : int(traj.controls.front().size());
  std::ostringstream out;
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",xi_" << i;
  for (int j = 1; j <= m; ++j) out << ",mu_" << j;
  out << "\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out << format_value(traj.time_at(k));
    for (int i = 0; i < n; ++i) out << "," << format_value(traj.states[k](i));
    for (int j = 0; j < m; ++j) {
      out << ",";
      if (k < traj.controls.size()) out << format_value(traj.controls[k](j));
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

void write_controls_csv(const Trajectory& traj, const std::string& path) {
  const int m = traj.controls.empty() ? 0 : int(traj.controls.front().size());
  std::ostringstream out;
  out << "t";
  for (int j = 1; j <= m; ++j) out << ",mu_" << j;
  out << "\n";
  for (std::size_t k = 0; k < traj.controls.size(); ++k) {
    out << format_value(traj.time_at(k));
    for (int j = 0; j < m; ++j) out << "," << format_value(traj.controls[k](j));
    out << "\n";
  }
  write_text_file(path, out.str());
}

void write_error_csv(const Trajectory& traj, const std::vector<double>& errors,
                     const std::string& path) {
  std::ostringstream out;
  out << "t,err\n";
  for (std::size_t k = 0; k < errors.size(); ++k)
    out << format_value(traj.time_at(k)) << "," << format_value(errors[k])
        << "\n";
  write_text_file(path, out.str());
}

}  // namespace dflin
