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

#ifndef DFLIN_DUAL_HPP_
#define DFLIN_DUAL_HPP_

#include <cmath>
#include <limits>
#include <type_traits>

#include <Eigen/Core>

namespace dflin {

/// Forward-mode dual number. Nesting Dual<Dual<double>> yields exact
/// second-order directional derivatives, which the involutivity machinery
/// relies on (Lie brackets of fields that are themselves Jacobian-based).
template <typename T>
struct Dual {
  T v{};  // value
  T d{};  // derivative along the seeded direction

  Dual() = default;
  Dual(const T& value) : v(value) {}  // NOLINT: implicit by design
  Dual(const T& value, const T& deriv) : v(value), d(deriv) {}

  template <typename U,
            typename = std::enable_if_t<std::is_arithmetic_v<U>>>
  Dual(U value) : v(static_cast<T>(double(value))) {}  // NOLINT

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v = v * o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    d = (d * o.v - v * o.d) / (o.v * o.v);
    v = v / o.v;
    return *this;
  }
  Dual operator-() const { return Dual(-v, -d); }
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

template <typename T>
inline Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <typename T>
inline Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <typename T>
inline Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <typename T>
inline Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }

template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
inline Dual<T> operator+(const Dual<T>& a, U b) { return a + Dual<T>(b); }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
inline Dual<T> operator+(U a, const Dual<T>& b) { return Dual<T>(a) + b; }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
inline Dual<T> operator-(const Dual<T>& a, U b) { return a - Dual<T>(b); }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
inline Dual<T> operator-(U a, const Dual<T>& b) { return Dual<T>(a) - b; }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
inline Dual<T> operator*(const Dual<T>& a, U b) { return a * Dual<T>(b); }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
inline Dual<T> operator*(U a, const Dual<T>& b) { return Dual<T>(a) * b; }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
inline Dual<T> operator/(const Dual<T>& a, U b) { return a / Dual<T>(b); }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
inline Dual<T> operator/(U a, const Dual<T>& b) { return Dual<T>(a) / b; }

/// Underlying double value, through arbitrary nesting.
inline double real_part(double x) { return x; }
template <typename T>
inline double real_part(const Dual<T>& x) { return real_part(x.v); }

template <typename T>
inline bool operator<(const Dual<T>& a, const Dual<T>& b) {
  return real_part(a) < real_part(b);
}
template <typename T>
inline bool operator>(const Dual<T>& a, const Dual<T>& b) {
  return real_part(a) > real_part(b);
}
template <typename T>
inline bool operator<=(const Dual<T>& a, const Dual<T>& b) {
  return real_part(a) <= real_part(b);
}
template <typename T>
inline bool operator>=(const Dual<T>& a, const Dual<T>& b) {
  return real_part(a) >= real_part(b);
}
template <typename T>
inline bool operator==(const Dual<T>& a, const Dual<T>& b) {
  return real_part(a) == real_part(b);
}
template <typename T>
inline bool operator!=(const Dual<T>& a, const Dual<T>& b) {
  return !(a == b);
}

using std::abs;
using std::sqrt;

template <typename T>
inline Dual<T> sqrt(const Dual<T>& x) {
  T s = sqrt(x.v);
  return Dual<T>(s, x.d / (2.0 * s));
}

template <typename T>
inline Dual<T> abs(const Dual<T>& x) {
  return real_part(x) < 0.0 ? -x : x;
}

template <typename T>
inline Dual<T> exp(const Dual<T>& x) {
  using std::exp;
  T e = exp(x.v);
  return Dual<T>(e, x.d * e);
}

template <typename T>
inline Dual<T> sin(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return Dual<T>(sin(x.v), x.d * cos(x.v));
}

template <typename T>
inline Dual<T> cos(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return Dual<T>(cos(x.v), -x.d * sin(x.v));
}

/// Number of dual nesting levels of a scalar type.
template <typename S>
struct dual_depth : std::integral_constant<int, 0> {};
template <typename T>
struct dual_depth<Dual<T>>
    : std::integral_constant<int, dual_depth<T>::value + 1> {};
template <typename S>
inline constexpr int dual_depth_v = dual_depth<S>::value;

}  // namespace dflin

namespace Eigen {

template <typename T>
struct NumTraits<dflin::Dual<T>> {
  using Real = dflin::Dual<T>;
  using NonInteger = dflin::Dual<T>;
  using Literal = dflin::Dual<T>;
  using Nested = dflin::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<double>::ReadCost,
    AddCost = 2 * NumTraits<double>::AddCost,
    MulCost = 4 * NumTraits<double>::MulCost,
  };
  static Real epsilon() { return Real(NumTraits<double>::epsilon()); }
  static Real dummy_precision() {
    return Real(NumTraits<double>::dummy_precision());
  }
  static Real highest() { return Real(NumTraits<double>::highest()); }
  static Real lowest() { return Real(NumTraits<double>::lowest()); }
  static int digits10() { return NumTraits<double>::digits10(); }
};

}  // namespace Eigen

#endif  // DFLIN_DUAL_HPP_
