#include "mathcore/transforms.hpp"

#include <cmath>

namespace hiermc::mathcore {

std::vector<double> cholesky_corr_unconstrain(std::span<const double> L, std::size_t K) {
  if (L.size() != K * K) throw ShapeError("cholesky_corr_unconstrain: L has wrong size");
  std::vector<double> z;
  z.reserve(K * (K - 1) / 2);
  for (std::size_t i = 1; i < K; ++i) {
    double s = 1.0;
    for (std::size_t m = 0; m < i; ++m) {
      const double c = L[i * K + m] / std::sqrt(s);
      if (!(c > -1.0 && c < 1.0))
        throw DomainError("cholesky_corr_unconstrain: entry outside valid range");
      z.push_back(std::atanh(c));
      s *= 1.0 - c * c;
    }
  }
  return z;
}

ConstraintTransform ConstraintTransform::identity(std::size_t n) {
  return {TransformKind::kIdentity, n, 0.0, 0.0};
}

ConstraintTransform ConstraintTransform::positive_log(std::size_t n) {
  return {TransformKind::kPositiveLog, n, 0.0, 0.0};
}

ConstraintTransform ConstraintTransform::interval(double lo, double hi, std::size_t n) {
  if (!(lo < hi)) throw DomainError("ConstraintTransform::interval: need lo < hi");
  return {TransformKind::kIntervalLogistic, n, lo, hi};
}

ConstraintTransform ConstraintTransform::cholesky_correlation(std::size_t K) {
  if (K == 0) throw DomainError("ConstraintTransform::cholesky_correlation: K must be >= 1");
  return {TransformKind::kCholeskyCorrelation, K, 0.0, 0.0};
}

std::size_t ConstraintTransform::unconstrained_dim() const {
  return kind_ == TransformKind::kCholeskyCorrelation ? n_ * (n_ - 1) / 2 : n_;
}

std::size_t ConstraintTransform::constrained_dim() const {
  return kind_ == TransformKind::kCholeskyCorrelation ? n_ * n_ : n_;
}

ConstrainResult ConstraintTransform::constrain(std::span<const double> z) const {
  if (z.size() != unconstrained_dim())
    throw ShapeError("ConstraintTransform::constrain: wrong input length");
  ConstrainResult out;
  out.log_jacobian = 0.0;
  switch (kind_) {
    case TransformKind::kIdentity:
      out.value.assign(z.begin(), z.end());
      return out;
    case TransformKind::kPositiveLog:
      out.value.reserve(n_);
      for (double zi : z) {
        auto [x, lj] = positive_log_constrain(zi);
        out.value.push_back(x);
        out.log_jacobian += lj;
      }
      return out;
    case TransformKind::kIntervalLogistic:
      out.value.reserve(n_);
      for (double zi : z) {
        auto [x, lj] = interval_constrain(zi, lo_, hi_);
        out.value.push_back(x);
        out.log_jacobian += lj;
      }
      return out;
    case TransformKind::kCholeskyCorrelation:
      out.log_jacobian = cholesky_corr_constrain(z, n_, out.value);
      return out;
  }
  throw DomainError("ConstraintTransform: unknown kind");
}

std::vector<double> ConstraintTransform::unconstrain(std::span<const double> x) const {
  if (x.size() != constrained_dim())
    throw ShapeError("ConstraintTransform::unconstrain: wrong input length");
  std::vector<double> z;
  switch (kind_) {
    case TransformKind::kIdentity:
      return {x.begin(), x.end()};
    case TransformKind::kPositiveLog:
      z.reserve(n_);
      for (double xi : x) z.push_back(positive_log_unconstrain(xi));
      return z;
    case TransformKind::kIntervalLogistic:
      z.reserve(n_);
      for (double xi : x) z.push_back(interval_unconstrain(xi, lo_, hi_));
      return z;
    case TransformKind::kCholeskyCorrelation:
      return cholesky_corr_unconstrain(x, n_);
  }
  throw DomainError("ConstraintTransform: unknown kind");
}

}  // namespace hiermc::mathcore
