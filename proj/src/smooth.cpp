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

#include "dflin/smooth.hpp"

#include <Eigen/LU>

namespace dflin {

MatXd fd_jacobian(const SmoothVectorFun& f, const VecXd& x) {
  const Eigen::Index n = x.size();
  MatXd jac(f.out_dim(), n);
  VecXd xp = x, xm = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = std::max(1e-6, 1e-6 * std::abs(x(j)));
    xp(j) = x(j) + step;
    xm(j) = x(j) - step;
    jac.col(j) = (f(xp) - f(xm)) / (2.0 * step);
    xp(j) = x(j);
    xm(j) = x(j);
  }
  return jac;
}

MatXd jacobian(const SmoothVectorFun& f, const VecXd& x) {
  if (f.depth() >= 1) return jacobian_ad<double>(f, x);
  return fd_jacobian(f, x);
}

int numerical_rank(const MatXd& m, int ambient_dim) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatXd> svd(m);
  const VecXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double tol = ambient_dim * sv(0) * 1e-10;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return rank;
}

MatXd nullspace(const MatXd& m, int ambient_dim) {
  Eigen::JacobiSVD<MatXd> svd(m, Eigen::ComputeFullV);
  const VecXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double tol = ambient_dim * smax * 1e-10;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

VecXd newton_solve(const std::function<VecXd(const VecXd&)>& residual,
                   VecXd x, double tol, int max_iter, bool damped) {
  VecXd r = residual(x);
  double rnorm = r.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < max_iter; ++it) {
    if (rnorm <= tol) return x;
    // FD Jacobian of the residual; the systems here are small and smooth.
    const Eigen::Index n = x.size();
    MatXd jac(r.size(), n);
    VecXd xp = x, xm = x;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double step = std::max(1e-8, 1e-8 * std::abs(x(j)));
      xp(j) = x(j) + step;
      xm(j) = x(j) - step;
      jac.col(j) = (residual(xp) - residual(xm)) / (2.0 * step);
      xp(j) = x(j);
      xm(j) = x(j);
    }
    Eigen::PartialPivLU<MatXd> lu(jac);
    VecXd dx = lu.solve(r);
    if (!dx.allFinite())
      throw NewtonError("newton_solve: singular Jacobian", rnorm, it);
    double lambda = 1.0;
    VecXd xn = x - dx;
    VecXd rn = residual(xn);
    double rn_norm = rn.lpNorm<Eigen::Infinity>();
    if (damped) {
      int backtracks = 0;
      while (rn_norm > rnorm && backtracks < 30) {
        lambda *= 0.5;
        xn = x - lambda * dx;
        rn = residual(xn);
        rn_norm = rn.lpNorm<Eigen::Infinity>();
        ++backtracks;
      }
    }
    x = xn;
    r = rn;
    rnorm = rn_norm;
  }
  if (rnorm <= tol) return x;
  throw NewtonError("newton_solve: no convergence in " +
                        std::to_string(max_iter) + " iterations",
                    rnorm, max_iter);
}

}  // namespace dflin
