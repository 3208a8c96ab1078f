#include "mathcore/densities.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace hiermc::mathcore {

double lkj_cholesky_lpdf(const Matrix& L, double eta) {
  if (eta < 1.0) throw DomainError("lkj_cholesky_lpdf: eta must be >= 1");
  if (L.rows() != L.cols() || L.rows() == 0)
    throw ShapeError("lkj_cholesky_lpdf: L must be square and non-empty");
  const std::size_t K = L.rows();
  std::vector<double> diag(K);
  for (std::size_t i = 0; i < K; ++i) {
    if (!(L(i, i) > 0.0))
      throw DomainError("lkj_cholesky_lpdf: diagonal must be positive (row " +
                        std::to_string(i + 1) + ")");
    double row_norm2 = 0.0;
    for (std::size_t j = 0; j <= i; ++j) row_norm2 += L(i, j) * L(i, j);
    if (std::fabs(row_norm2 - 1.0) > 1e-8)
      throw DomainError("lkj_cholesky_lpdf: row " + std::to_string(i + 1) +
                        " does not have unit norm");
    for (std::size_t j = i + 1; j < K; ++j)
      if (L(i, j) != 0.0)
        throw DomainError("lkj_cholesky_lpdf: L must be lower triangular");
    diag[i] = L(i, i);
  }
  return lkj_cholesky_kernel(std::span<const double>(diag), eta);
}

double cauchy_inv_cdf(double w, double location, double scale) {
  if (!(scale > 0.0)) throw DomainError("cauchy_inv_cdf: scale must be positive");
  if (!(w > 0.0 && w < 1.0)) throw DomainError("cauchy_inv_cdf: w must lie in (0,1)");
  return location + scale * std::tan(kPi * (w - 0.5));
}

DensityKernel DensityKernel::normal(double mu, double sd) {
  if (!(sd > 0.0)) throw DomainError("DensityKernel::normal: sd must be positive");
  return {Family::kNormal, mu, sd};
}

DensityKernel DensityKernel::half_cauchy(double scale) {
  if (!(scale > 0.0)) throw DomainError("DensityKernel::half_cauchy: scale must be positive");
  return {Family::kHalfCauchy, 0.0, scale};
}

DensityKernel DensityKernel::uniform_interval(double lo, double hi) {
  if (!(lo < hi)) throw DomainError("DensityKernel::uniform_interval: need lo < hi");
  return {Family::kUniformInterval, lo, hi};
}

DensityKernel DensityKernel::lkj_cholesky(double eta) {
  if (eta < 1.0) throw DomainError("DensityKernel::lkj_cholesky: eta must be >= 1");
  return {Family::kLkjCholesky, eta, 0.0};
}

double DensityKernel::lpdf(double x) const {
  switch (family_) {
    case Family::kNormal:
      return normal_lpdf(x, p1_, p2_);
    case Family::kHalfCauchy:
      return half_cauchy_lpdf(x, p2_);
    case Family::kUniformInterval:
      if (x < p1_ || x > p2_)
        throw DomainError("DensityKernel: x outside the uniform interval");
      return -std::log(p2_ - p1_);
    case Family::kLkjCholesky:
      throw ShapeError("DensityKernel: LKJ family needs a Cholesky factor, not a scalar");
  }
  throw DomainError("DensityKernel: unknown family");
}

double DensityKernel::lpdf(const Matrix& cholesky_factor) const {
  if (family_ != Family::kLkjCholesky)
    throw ShapeError("DensityKernel: matrix argument only valid for the LKJ family");
  return lkj_cholesky_lpdf(cholesky_factor, p1_);
}

double DensityKernel::support_lo() const {
  switch (family_) {
    case Family::kNormal:
      return -std::numeric_limits<double>::infinity();
    case Family::kHalfCauchy:
      return 0.0;
    case Family::kUniformInterval:
      return p1_;
    case Family::kLkjCholesky:
      throw ShapeError("DensityKernel: LKJ family has no scalar support");
  }
  throw DomainError("DensityKernel: unknown family");
}

double DensityKernel::support_hi() const {
  switch (family_) {
    case Family::kNormal:
    case Family::kHalfCauchy:
      return std::numeric_limits<double>::infinity();
    case Family::kUniformInterval:
      return p2_;
    case Family::kLkjCholesky:
      throw ShapeError("DensityKernel: LKJ family has no scalar support");
  }
  throw DomainError("DensityKernel: unknown family");
}

}  // namespace hiermc::mathcore
