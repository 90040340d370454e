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

#ifndef DFLIN_SYSTEMS_HPP_
#define DFLIN_SYSTEMS_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dflin/smooth.hpp"

namespace dflin {

using Guard = std::function<bool(const VecXd&)>;

inline Guard always_valid() {
  return [](const VecXd&) { return true; };
}

/// Control-affine system  x' = f(x) + g(x) u  on an open chart of R^n.
struct ControlAffineSystem {
  int n = 0;  // state dimension
  int m = 0;  // input dimension
  SmoothVectorFun f;  // R^n -> R^n
  SmoothMatrixFun g;  // R^n -> R^{n x m}, columns g_i
  Guard domain_guard = always_valid();
};

/// Dynamic compensator  w' = gamma + delta mu,  u = alpha + beta mu.
/// All maps take the stacked (x, w) vector of size n + q.
struct DynamicCompensator {
  int q = 0;  // compensator state dimension
  SmoothVectorFun alpha;  // R^{n+q} -> R^m
  SmoothMatrixFun beta;   // R^{n+q} -> R^{m x m}
  SmoothVectorFun gamma;  // R^{n+q} -> R^q
  SmoothMatrixFun delta;  // R^{n+q} -> R^{q x m}
  VecXd w0;               // initial compensator state, zero by default

  static DynamicCompensator identity(int n, int m);
};

/// Compensated system  xi' = F(xi) + G(xi) mu  on R^{n+q}.
struct ExtendedSystem {
  int n_ext = 0;
  int m = 0;
  SmoothVectorFun F;  // R^{n_ext} -> R^{n_ext}
  SmoothMatrixFun G;  // R^{n_ext} -> R^{n_ext x m}
  Guard domain_guard = always_valid();
  std::string provenance;  // human-readable source tag
};

/// Coordinate change + feedback that renders an extended system LTI.
struct LinearizingData {
  SmoothVectorFun phi;                  // forward diffeomorphism
  std::optional<SmoothVectorFun> phi_inv;  // closed-form inverse if known
  std::optional<SmoothMatrixFun> dphi;     // closed-form Jacobian if known
  SmoothVectorFun alpha_tilde;          // feedback offset, R^{n_ext} -> R^m
  SmoothMatrixFun beta_tilde;           // feedback gain, R^{n_ext} -> R^{m x m}
  MatXd A;                              // target LTI pair
  MatXd B;
  Guard chart_guard = always_valid();

  MatXd phi_jacobian(const VecXd& xi) const {
    if (dphi) return (*dphi)(xi);
    return jacobian(phi, xi);
  }
};

/// One-step linear system  z_{k+1} = A_h z_k + B_h v_k.
struct DiscreteLTI {
  MatXd A_h;
  MatXd B_h;
  double h = 0.0;
};

/// Residuals of the two linearization identities over a sample set.
struct LinearizationReport {
  double max_dynamics_residual = 0.0;  // || DPhi (F + G a) - A Phi ||
  double max_input_residual = 0.0;     // || DPhi G b - B ||
  bool passed = false;
};

/// Couples a system with a compensator into the extended block system.
/// Throws DimensionError naming the offending map on mismatch.
ExtendedSystem extend(const ControlAffineSystem& sys,
                      const DynamicCompensator& comp);

/// F(xi) + G(xi) mu, with the domain guard enforced.
VecXd eval_dynamics(const ExtendedSystem& ext, const VecXd& xi,
                    const VecXd& mu);

/// mu = alpha_tilde(xi) + beta_tilde(xi) v on the chart.
VecXd apply_feedback(const LinearizingData& lin, const VecXd& xi,
                     const VecXd& v);

/// Solves Phi(xi) = z: closed form when available, damped Newton otherwise
/// (seeded from `hint`, tolerance 1e-10, 50 iterations).
VecXd inverse_transform(const LinearizingData& lin, const VecXd& z,
                        const std::optional<VecXd>& hint = std::nullopt);

/// Max residuals of  DPhi (F + G alpha~) = A Phi  and  DPhi G beta~ = B
/// over the sample points; passes iff both <= 1e-9.
LinearizationReport verify_linearization(const ExtendedSystem& ext,
                                         const LinearizingData& lin,
                                         const std::vector<VecXd>& points);

}  // namespace dflin

#endif  // DFLIN_SYSTEMS_HPP_
