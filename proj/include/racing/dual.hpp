#pragma once

// Forward-mode dual numbers with a fixed number of derivative lanes. Used to
// differentiate the horizon rollout with respect to blocks of control
// variables.

#include <array>
#include <cmath>

namespace racing {

template <int W>
struct Dual {
  double v = 0.0;
  std::array<double, W> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants

  static Dual variable(double value, int lane) {
    Dual x(value);
    x.d[lane] = 1.0;
    return x;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < W; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < W; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < W; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    const double q = v * inv;
    for (int i = 0; i < W; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
    v = q;
    return *this;
  }
};

namespace detail {
// Chain rule helper: f(x) with f'(x) = slope.
template <int W>
inline Dual<W> apply(const Dual<W>& x, double fx, double slope) {
  Dual<W> out(fx);
  for (int i = 0; i < W; ++i) out.d[i] = slope * x.d[i];
  return out;
}
}  // namespace detail

template <int W>
inline Dual<W> operator-(const Dual<W>& a) {
  Dual<W> out(-a.v);
  for (int i = 0; i < W; ++i) out.d[i] = -a.d[i];
  return out;
}

template <int W>
inline Dual<W> operator+(Dual<W> a, const Dual<W>& b) { return a += b; }
template <int W>
inline Dual<W> operator-(Dual<W> a, const Dual<W>& b) { return a -= b; }
template <int W>
inline Dual<W> operator*(Dual<W> a, const Dual<W>& b) { return a *= b; }
template <int W>
inline Dual<W> operator/(Dual<W> a, const Dual<W>& b) { return a /= b; }

template <int W>
inline Dual<W> operator+(Dual<W> a, double b) { a.v += b; return a; }
template <int W>
inline Dual<W> operator+(double a, Dual<W> b) { b.v += a; return b; }
template <int W>
inline Dual<W> operator-(Dual<W> a, double b) { a.v -= b; return a; }
template <int W>
inline Dual<W> operator-(double a, const Dual<W>& b) { return -b + a; }
template <int W>
inline Dual<W> operator*(Dual<W> a, double b) {
  a.v *= b;
  for (auto& x : a.d) x *= b;
  return a;
}
template <int W>
inline Dual<W> operator*(double a, Dual<W> b) { return b * a; }
template <int W>
inline Dual<W> operator/(Dual<W> a, double b) { return a * (1.0 / b); }
template <int W>
inline Dual<W> operator/(double a, const Dual<W>& b) {
  const double q = a / b.v;
  return detail::apply(b, q, -q / b.v);
}

template <int W>
inline bool operator<(const Dual<W>& a, const Dual<W>& b) { return a.v < b.v; }
template <int W>
inline bool operator>(const Dual<W>& a, const Dual<W>& b) { return a.v > b.v; }
template <int W>
inline bool operator<(const Dual<W>& a, double b) { return a.v < b; }
template <int W>
inline bool operator>(const Dual<W>& a, double b) { return a.v > b; }
template <int W>
inline bool operator<=(const Dual<W>& a, double b) { return a.v <= b; }
template <int W>
inline bool operator>=(const Dual<W>& a, double b) { return a.v >= b; }

template <int W>
inline Dual<W> sin(const Dual<W>& x) { return detail::apply(x, std::sin(x.v), std::cos(x.v)); }
template <int W>
inline Dual<W> cos(const Dual<W>& x) { return detail::apply(x, std::cos(x.v), -std::sin(x.v)); }
template <int W>
inline Dual<W> tan(const Dual<W>& x) {
  const double t = std::tan(x.v);
  return detail::apply(x, t, 1.0 + t * t);
}
template <int W>
inline Dual<W> atan(const Dual<W>& x) { return detail::apply(x, std::atan(x.v), 1.0 / (1.0 + x.v * x.v)); }
template <int W>
inline Dual<W> exp(const Dual<W>& x) {
  const double e = std::exp(x.v);
  return detail::apply(x, e, e);
}
template <int W>
inline Dual<W> sqrt(const Dual<W>& x) {
  const double s = std::sqrt(x.v);
  return detail::apply(x, s, s > 0.0 ? 0.5 / s : 0.0);
}
template <int W>
inline Dual<W> abs(const Dual<W>& x) { return x.v < 0.0 ? -x : x; }
template <int W>
inline Dual<W> atan2(const Dual<W>& y, const Dual<W>& x) {
  const double den = x.v * x.v + y.v * y.v;
  Dual<W> out(std::atan2(y.v, x.v));
  for (int i = 0; i < W; ++i) out.d[i] = (x.v * y.d[i] - y.v * x.d[i]) / den;
  return out;
}
template <int W>
inline bool isfinite(const Dual<W>& x) { return std::isfinite(x.v); }

inline double value(double x) { return x; }
template <int W>
inline double value(const Dual<W>& x) { return x.v; }

}  // namespace racing
