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

#ifndef DFLIN_SMOOTH_HPP_
#define DFLIN_SMOOTH_HPP_

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "dflin/dual.hpp"

namespace dflin {

template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

using VecXd = Eigen::VectorXd;
using MatXd = Eigen::MatrixXd;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct SingularityError : DomainError {
  using DomainError::DomainError;
};
struct NewtonError : std::runtime_error {
  double last_residual;
  int iterations;
  NewtonError(const std::string& what, double residual, int iters)
      : std::runtime_error(what), last_residual(residual), iterations(iters) {}
};

/// Dense linear solve by Gaussian elimination with partial pivoting.
/// Works for any scalar with arithmetic + real_part (plain double or duals);
/// the small systems here (dim <= 10) do not warrant anything fancier.
template <typename S>
VecX<S> solve_dense(MatX<S> a, VecX<S> b) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.size() != n)
    throw DimensionError("solve_dense: non-square system");
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = c;
    double best = std::abs(real_part(a(c, c)));
    for (Eigen::Index r = c + 1; r < n; ++r) {
      double m = std::abs(real_part(a(r, c)));
      if (m > best) { best = m; piv = r; }
    }
    if (best == 0.0) throw SingularityError("solve_dense: singular matrix");
    if (piv != c) { a.row(piv).swap(a.row(c)); std::swap(b(piv), b(c)); }
    for (Eigen::Index r = c + 1; r < n; ++r) {
      S f = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
      b(r) -= f * b(c);
    }
  }
  VecX<S> x(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    S acc = b(r);
    for (Eigen::Index k = r + 1; k < n; ++k) acc -= a(r, k) * x(k);
    x(r) = acc / a(r, r);
  }
  return x;
}

/// A vector-valued smooth map R^in -> R^out, type-erased at three scalar
/// levels so that first and second derivatives can be taken by forward AD.
/// `depth` records how many dual levels the underlying callable supports;
/// maps built from double-only callables get depth 0 and fall back to
/// finite differences in jacobian().
class SmoothVectorFun {
 public:
  SmoothVectorFun() = default;

  template <int Depth = 2, typename F>
  static SmoothVectorFun make(int in_dim, int out_dim, F f) {
    static_assert(Depth >= 0 && Depth <= 2);
    SmoothVectorFun m;
    m.in_dim_ = in_dim;
    m.out_dim_ = out_dim;
    m.depth_ = Depth;
    m.f0_ = [f](const VecX<double>& x) -> VecX<double> { return f(x); };
    if constexpr (Depth >= 1)
      m.f1_ = [f](const VecX<Dual1>& x) -> VecX<Dual1> { return f(x); };
    if constexpr (Depth >= 2)
      m.f2_ = [f](const VecX<Dual2>& x) -> VecX<Dual2> { return f(x); };
    return m;
  }

  /// Double-only map (no AD path).
  static SmoothVectorFun make_plain(
      int in_dim, int out_dim, std::function<VecXd(const VecXd&)> f) {
    SmoothVectorFun m;
    m.in_dim_ = in_dim;
    m.out_dim_ = out_dim;
    m.depth_ = 0;
    m.f0_ = std::move(f);
    return m;
  }

  bool valid() const { return static_cast<bool>(f0_); }
  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  int depth() const { return depth_; }

  VecXd operator()(const VecXd& x) const { return f0_(x); }

  template <typename S>
  VecX<S> eval(const VecX<S>& x) const {
    if constexpr (std::is_same_v<S, double>) {
      return f0_(x);
    } else if constexpr (std::is_same_v<S, Dual1>) {
      if (!f1_) throw DomainError("SmoothVectorFun: no first-order AD path");
      return f1_(x);
    } else {
      static_assert(std::is_same_v<S, Dual2>);
      if (!f2_) throw DomainError("SmoothVectorFun: no second-order AD path");
      return f2_(x);
    }
  }

  /// Erase one AD level (used when wrapping in contexts that must not
  /// attempt deeper differentiation than the constituents support).
  SmoothVectorFun with_depth(int depth) const {
    SmoothVectorFun m = *this;
    m.depth_ = std::min(depth, depth_);
    return m;
  }

 private:
  int in_dim_ = 0, out_dim_ = 0, depth_ = 0;
  std::function<VecX<double>(const VecX<double>&)> f0_;
  std::function<VecX<Dual1>(const VecX<Dual1>&)> f1_;
  std::function<VecX<Dual2>(const VecX<Dual2>&)> f2_;
};

/// Matrix-valued counterpart (input matrices g(x), beta(x, w), ...).
class SmoothMatrixFun {
 public:
  SmoothMatrixFun() = default;

  template <int Depth = 2, typename F>
  static SmoothMatrixFun make(int in_dim, int rows, int cols, F f) {
    static_assert(Depth >= 0 && Depth <= 2);
    SmoothMatrixFun m;
    m.in_dim_ = in_dim;
    m.rows_ = rows;
    m.cols_ = cols;
    m.depth_ = Depth;
    m.f0_ = [f](const VecX<double>& x) -> MatX<double> { return f(x); };
    if constexpr (Depth >= 1)
      m.f1_ = [f](const VecX<Dual1>& x) -> MatX<Dual1> { return f(x); };
    if constexpr (Depth >= 2)
      m.f2_ = [f](const VecX<Dual2>& x) -> MatX<Dual2> { return f(x); };
    return m;
  }

  /// Double-only map (no AD path).
  static SmoothMatrixFun make_plain(
      int in_dim, int rows, int cols, std::function<MatXd(const VecXd&)> f) {
    SmoothMatrixFun m;
    m.in_dim_ = in_dim;
    m.rows_ = rows;
    m.cols_ = cols;
    m.depth_ = 0;
    m.f0_ = std::move(f);
    return m;
  }

  bool valid() const { return static_cast<bool>(f0_); }
  int in_dim() const { return in_dim_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int depth() const { return depth_; }

  MatXd operator()(const VecXd& x) const { return f0_(x); }

  template <typename S>
  MatX<S> eval(const VecX<S>& x) const {
    if constexpr (std::is_same_v<S, double>) {
      return f0_(x);
    } else if constexpr (std::is_same_v<S, Dual1>) {
      if (!f1_) throw DomainError("SmoothMatrixFun: no first-order AD path");
      return f1_(x);
    } else {
      static_assert(std::is_same_v<S, Dual2>);
      if (!f2_) throw DomainError("SmoothMatrixFun: no second-order AD path");
      return f2_(x);
    }
  }

 private:
  int in_dim_ = 0, rows_ = 0, cols_ = 0, depth_ = 0;
  std::function<MatX<double>(const VecX<double>&)> f0_;
  std::function<MatX<Dual1>(const VecX<Dual1>&)> f1_;
  std::function<MatX<Dual2>(const VecX<Dual2>&)> f2_;
};

/// Forward-AD Jacobian at any scalar level. Requires the map to be
/// evaluable one dual level above S.
template <typename S>
MatX<S> jacobian_ad(const SmoothVectorFun& f, const VecX<S>& x) {
  const Eigen::Index n = x.size();
  VecX<Dual<S>> xd(n);
  for (Eigen::Index i = 0; i < n; ++i) xd(i) = Dual<S>(x(i));
  MatX<S> jac(f.out_dim(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    xd(j).d = S(1.0);
    VecX<Dual<S>> y = f.eval(xd);
    for (Eigen::Index i = 0; i < y.size(); ++i) jac(i, j) = y(i).d;
    xd(j).d = S(0.0);
  }
  return jac;
}

/// Central finite differences with step max(1e-6, 1e-6*|x_i|).
MatXd fd_jacobian(const SmoothVectorFun& f, const VecXd& x);

/// Jacobian of f at x: forward AD when the map supports it, central
/// finite differences otherwise.
MatXd jacobian(const SmoothVectorFun& f, const VecXd& x);

/// Templated dispatch used inside generic field lambdas.
template <typename S>
MatX<S> jacobian_t(const SmoothVectorFun& f, const VecX<S>& x) {
  if constexpr (std::is_same_v<S, double>) {
    return jacobian(f, x);
  } else {
    return jacobian_ad<S>(f, x);
  }
}

/// Numerical rank with tolerance dim * sigma_max * 1e-10.
int numerical_rank(const MatXd& m, int ambient_dim);

/// Orthonormal nullspace basis (columns), same tolerance convention.
MatXd nullspace(const MatXd& m, int ambient_dim);

/// Plain multivariate Newton on r(x) = 0 with LU solves and optional
/// damping by residual backtracking. Returns the root.
VecXd newton_solve(const std::function<VecXd(const VecXd&)>& residual,
                   VecXd x0, double tol = 1e-12, int max_iter = 50,
                   bool damped = false);

}  // namespace dflin

#endif  // DFLIN_SMOOTH_HPP_
