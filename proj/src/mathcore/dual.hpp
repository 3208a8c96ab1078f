#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace hiermc::mathcore {

// Forward-mode scalar: value plus a dense derivative seed vector. An empty seed
// means "constant" (derivative identically zero); this lets plain doubles mix into
// dual arithmetic without knowing the seed dimension.
struct Dual {
  double val = 0.0;
  std::vector<double> der;

  Dual() = default;
  /*implicit*/ Dual(double v) : val(v) {}
  Dual(double v, std::vector<double> d) : val(v), der(std::move(d)) {}

  // Seeded variable: d/dz_i of itself is 1.
  static Dual variable(double v, std::size_t i, std::size_t n) {
    Dual d(v);
    d.der.assign(n, 0.0);
    d.der[i] = 1.0;
    return d;
  }

  Dual& operator+=(const Dual& o);
  Dual& operator-=(const Dual& o);
  Dual& operator*=(const Dual& o);
  Dual& operator/=(const Dual& o);
};

inline double value_of(double x) { return x; }
inline double value_of(const Dual& d) { return d.val; }

namespace detail {
// out = fa * a + fb * b where either derivative vector may be empty (== zero).
inline std::vector<double> lincomb(const std::vector<double>& a, double fa,
                                   const std::vector<double>& b, double fb) {
  const std::size_t n = a.size() > b.size() ? a.size() : b.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = fa * a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += fb * b[i];
  return out;
}
inline std::vector<double> scaled(const std::vector<double>& a, double f) {
  std::vector<double> out(a);
  for (double& x : out) x *= f;
  return out;
}
}  // namespace detail

inline Dual operator+(const Dual& a, const Dual& b) {
  return {a.val + b.val, detail::lincomb(a.der, 1.0, b.der, 1.0)};
}
inline Dual operator-(const Dual& a, const Dual& b) {
  return {a.val - b.val, detail::lincomb(a.der, 1.0, b.der, -1.0)};
}
inline Dual operator-(const Dual& a) { return {-a.val, detail::scaled(a.der, -1.0)}; }
inline Dual operator*(const Dual& a, const Dual& b) {
  return {a.val * b.val, detail::lincomb(a.der, b.val, b.der, a.val)};
}
inline Dual operator/(const Dual& a, const Dual& b) {
  const double inv = 1.0 / b.val;
  return {a.val * inv, detail::lincomb(a.der, inv, b.der, -a.val * inv * inv)};
}

inline Dual& Dual::operator+=(const Dual& o) { return *this = *this + o; }
inline Dual& Dual::operator-=(const Dual& o) { return *this = *this - o; }
inline Dual& Dual::operator*=(const Dual& o) { return *this = *this * o; }
inline Dual& Dual::operator/=(const Dual& o) { return *this = *this / o; }

inline bool operator<(const Dual& a, const Dual& b) { return a.val < b.val; }
inline bool operator>(const Dual& a, const Dual& b) { return a.val > b.val; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.val <= b.val; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.val >= b.val; }

// Chain rule for unary f: (f(v), f'(v) * der).
inline Dual unary(const Dual& a, double fv, double dfv) {
  return {fv, detail::scaled(a.der, dfv)};
}

inline Dual exp(const Dual& a) {
  const double e = std::exp(a.val);
  return unary(a, e, e);
}
inline Dual log(const Dual& a) { return unary(a, std::log(a.val), 1.0 / a.val); }
inline Dual log1p(const Dual& a) { return unary(a, std::log1p(a.val), 1.0 / (1.0 + a.val)); }
inline Dual sqrt(const Dual& a) {
  const double r = std::sqrt(a.val);
  return unary(a, r, 0.5 / r);
}
inline Dual tan(const Dual& a) {
  const double t = std::tan(a.val);
  return unary(a, t, 1.0 + t * t);
}
inline Dual tanh(const Dual& a) {
  const double t = std::tanh(a.val);
  return unary(a, t, 1.0 - t * t);
}
inline Dual atanh(const Dual& a) {
  return unary(a, std::atanh(a.val), 1.0 / (1.0 - a.val * a.val));
}
inline Dual fabs(const Dual& a) { return a.val < 0.0 ? -a : a; }

}  // namespace hiermc::mathcore
