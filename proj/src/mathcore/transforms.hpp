#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "core/errors.hpp"
#include "mathcore/densities.hpp"
#include "mathcore/dual.hpp"

namespace hiermc::mathcore {

template <class T>
struct ScalarConstrain {
  T value;
  T log_jacobian;
};

// softplus(z) = ln(1 + e^z), computed without overflow.
template <class T>
T softplus(const T& z) {
  using std::exp;
  using std::log1p;
  if (value_of(z) > 0.0) return z + log1p(exp(-z));
  return log1p(exp(z));
}

// z in R  ->  x = exp(z) > 0;  log |dx/dz| = z.
template <class T>
ScalarConstrain<T> positive_log_constrain(const T& z) {
  using std::exp;
  return {exp(z), z};
}

inline double positive_log_unconstrain(double x) {
  if (!(x > 0.0)) throw DomainError("positive_log_unconstrain: x must be positive");
  return std::log(x);
}

// z in R  ->  x = lo + (hi-lo) * logistic(z) in (lo, hi);
// log |dx/dz| = ln(hi-lo) + ln s + ln(1-s) with s = logistic(z).
template <class T>
ScalarConstrain<T> interval_constrain(const T& z, double lo, double hi) {
  using std::exp;
  T sp_neg = softplus(-z);  // -ln s
  T sp_pos = softplus(z);   // -ln(1-s)
  T s = exp(-sp_neg);
  return {T(lo) + T(hi - lo) * s, T(std::log(hi - lo)) - sp_neg - sp_pos};
}

inline double interval_unconstrain(double x, double lo, double hi) {
  if (!(x > lo && x < hi))
    throw DomainError("interval_unconstrain: x must lie strictly inside the interval");
  return std::log((x - lo) / (hi - x));
}

// Canonical-partial-correlation map: z (length K(K-1)/2, rows of the strict lower
// triangle in row-major order) -> lower Cholesky factor L (K x K, row-major) of a
// correlation matrix. Returns the log-Jacobian. Row k is built from partial
// correlations c = tanh(z): L[k][m] = c_m * sqrt(s_{m-1}), s_m = s_{m-1} (1 - c_m^2),
// L[k][k] = sqrt(s); each entry contributes ln(1-c^2) + 0.5 ln s_{m-1}.
template <class T>
T cholesky_corr_constrain(std::span<const T> z, std::size_t K, std::vector<T>& L_out) {
  using std::log;
  using std::log1p;
  using std::sqrt;
  using std::tanh;
  if (z.size() != K * (K - 1) / 2)
    throw ShapeError("cholesky_corr_constrain: z has wrong length for K");
  L_out.assign(K * K, T(0.0));
  T log_jac(0.0);
  std::size_t idx = 0;
  if (K > 0) L_out[0] = T(1.0);
  for (std::size_t i = 1; i < K; ++i) {
    T s(1.0);
    for (std::size_t m = 0; m < i; ++m) {
      T c = tanh(z[idx++]);
      T one_minus_c2 = T(1.0) - c * c;
      L_out[i * K + m] = c * sqrt(s);
      log_jac += log(one_minus_c2) + T(0.5) * log(s);
      s *= one_minus_c2;
    }
    L_out[i * K + i] = sqrt(s);
  }
  return log_jac;
}

// Inverse of cholesky_corr_constrain on the double path.
std::vector<double> cholesky_corr_unconstrain(std::span<const double> L, std::size_t K);

enum class TransformKind { kIdentity, kPositiveLog, kIntervalLogistic, kCholeskyCorrelation };

struct ConstrainResult {
  std::vector<double> value;
  double log_jacobian;
};

// A fixed bijection between an unconstrained vector and a constrained one, with its
// log-Jacobian. Identity/positive/interval act elementwise on n coordinates;
// cholesky-correlation maps K(K-1)/2 reals to a K x K factor (full row-major matrix).
class ConstraintTransform {
 public:
  static ConstraintTransform identity(std::size_t n);
  static ConstraintTransform positive_log(std::size_t n);
  static ConstraintTransform interval(double lo, double hi, std::size_t n);
  static ConstraintTransform cholesky_correlation(std::size_t K);

  TransformKind kind() const { return kind_; }
  std::size_t unconstrained_dim() const;
  std::size_t constrained_dim() const;

  ConstrainResult constrain(std::span<const double> z) const;
  std::vector<double> unconstrain(std::span<const double> x) const;

 private:
  ConstraintTransform(TransformKind k, std::size_t n, double lo, double hi)
      : kind_(k), n_(n), lo_(lo), hi_(hi) {}
  TransformKind kind_;
  std::size_t n_;  // element count, or K for the Cholesky kind
  double lo_, hi_;
};

}  // namespace hiermc::mathcore
