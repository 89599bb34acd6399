#pragma once

// Forward-mode dual numbers with a fixed number of derivative directions. Used
// to differentiate the discrete mean-curvature residual with respect to the
// three unknowns of its stencil.

#include <array>
#include <cmath>

namespace cmclab {

template <int N, typename Real = double>
struct Dual {
  Real v = 0;
  std::array<Real, N> d{};

  Dual() = default;
  Dual(Real value) : v(value) {}  // NOLINT: implicit promotion from constants

  static Dual variable(Real value, int direction) {
    Dual x(value);
    x.d[static_cast<std::size_t>(direction)] = 1.0;
    return x;
  }

  Dual operator-() const {
    Dual r;
    r.v = -v;
    for (int i = 0; i < N; ++i) r.d[i] = -d[i];
    return r;
  }
  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const Real inv = Real(1) / o.v;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
    v *= inv;
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
};

template <int N, typename Real>
Dual<N, Real> sqrt(const Dual<N, Real>& x) {
  using std::sqrt;
  Dual<N, Real> r;
  r.v = sqrt(x.v);
  const Real g = Real(0.5) / r.v;
  for (int i = 0; i < N; ++i) r.d[i] = g * x.d[i];
  return r;
}

inline double value_of(double x) { return x; }
inline long double value_of(long double x) { return x; }
template <int N, typename Real>
Real value_of(const Dual<N, Real>& x) {
  return x.v;
}

}  // namespace cmclab
