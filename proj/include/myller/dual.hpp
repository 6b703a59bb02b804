#pragma once

#include <cmath>
#include <type_traits>

namespace myller {

// Forward-mode dual number. Nest Dual<Dual<double>> for second derivatives.
template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(double x) : v(x), d(0.0) {}  // NOLINT: implicit constants
  constexpr Dual(T v_, T d_) : v(v_), d(d_) {}
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) { return primal(x.v); }

inline bool all_finite(double x) { return std::isfinite(x); }
template <class T>
bool all_finite(const Dual<T>& x) { return all_finite(x.v) && all_finite(x.d); }

inline bool is_zero(double x) { return x == 0.0; }
template <class T>
bool is_zero(const Dual<T>& x) { return is_zero(x.v) && is_zero(x.d); }
// True when every derivative component is exactly zero (the value is a constant).
inline bool is_constant(double) { return true; }
template <class T>
bool is_constant(const Dual<T>& x) { return is_constant(x.v) && is_zero(x.d); }

template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  const T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}
template <class T> Dual<T> operator*(const Dual<T>& a, double k) { return {a.v * k, a.d * k}; }
template <class T> Dual<T> operator*(double k, const Dual<T>& a) { return {a.v * k, a.d * k}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double k) { return {a.v / k, a.d / k}; }
template <class T> Dual<T> operator/(double k, const Dual<T>& b) { return Dual<T>(k) / b; }
template <class T> Dual<T> operator+(const Dual<T>& a, double k) { return {a.v + k, a.d}; }
template <class T> Dual<T> operator+(double k, const Dual<T>& a) { return {a.v + k, a.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double k) { return {a.v - k, a.d}; }
template <class T> Dual<T> operator-(double k, const Dual<T>& a) { return {k - a.v, -a.d}; }

// Elementary functions: value f(v), derivative f'(v) d.
#define MYLLER_DUAL_FN(name, deriv)                   \
  template <class T>                                  \
  Dual<T> name(const Dual<T>& a) {                    \
    using std::name;                                  \
    const T& x = a.v;                                 \
    return {name(x), (deriv) * a.d};                  \
  }

using std::sin; using std::cos; using std::tan; using std::asin; using std::acos; using std::atan;
using std::sqrt; using std::exp; using std::log; using std::sinh; using std::cosh; using std::tanh;

MYLLER_DUAL_FN(sin, cos(x))
MYLLER_DUAL_FN(cos, -sin(x))
MYLLER_DUAL_FN(tan, 1.0 / (cos(x) * cos(x)))
MYLLER_DUAL_FN(asin, 1.0 / sqrt(1.0 - x * x))
MYLLER_DUAL_FN(acos, -1.0 / sqrt(1.0 - x * x))
MYLLER_DUAL_FN(atan, 1.0 / (1.0 + x * x))
MYLLER_DUAL_FN(sqrt, 0.5 / sqrt(x))
MYLLER_DUAL_FN(exp, exp(x))
MYLLER_DUAL_FN(log, 1.0 / x)
MYLLER_DUAL_FN(sinh, cosh(x))
MYLLER_DUAL_FN(cosh, sinh(x))
MYLLER_DUAL_FN(tanh, 1.0 - tanh(x) * tanh(x))
#undef MYLLER_DUAL_FN

inline double abs_value(double x) { return std::abs(x); }
template <class T>
Dual<T> abs_value(const Dual<T>& a) {
  // Derivative taken as sign(x); at x = 0 the right derivative is used.
  return primal(a.v) < 0 ? -a : a;
}

inline double power(double a, double b) { return std::pow(a, b); }
template <class T>
Dual<T> power(const Dual<T>& a, const Dual<T>& b) {
  if (is_constant(b)) {
    const double n = primal(b.v);
    // Power rule keeps negative bases with integer exponents valid.
    if (n == 0.0) return Dual<T>(1.0);
    return {power(a.v, T(n)), power(a.v, T(n - 1.0)) * n * a.d};
  }
  const T p = power(a.v, b.v);
  return {p, p * (b.d * log(a.v) + b.v * a.d / a.v)};
}

}  // namespace myller
