#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "doctest.h"
#include "mathcore/densities.hpp"
#include "mathcore/dual.hpp"
#include "mathcore/transforms.hpp"

using namespace hiermc;
namespace mc = hiermc::mathcore;

namespace {

// Composite Simpson; panels must be smooth on [a,b].
double simpson(double a, double b, int n, const std::function<double(double)>& f) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

double deriv_central(const std::function<double(double)>& f, double x) {
  const double h = 1e-6 * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("normal_lpdf closed-form values") {
  CHECK(mc::normal_lpdf(0.0, 0.0, 1.0) == doctest::Approx(-0.9189385332046727).epsilon(1e-14));
  CHECK(mc::normal_lpdf(1.0, 0.0, 1.0) == doctest::Approx(-1.4189385332046727).epsilon(1e-14));
  CHECK(mc::normal_lpdf(0.3, 0.1, 0.2) == doctest::Approx(0.19049937922942772).epsilon(1e-14));
  CHECK(mc::normal_lpdf(0.0, 0.0, std::sqrt(5.0)) ==
        doctest::Approx(-1.723657489421723).epsilon(1e-14));
  CHECK_THROWS_AS((void)mc::normal_lpdf(0.0, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS((void)mc::normal_lpdf(0.0, 0.0, -1.0), DomainError);
}

TEST_CASE("half_cauchy_lpdf closed-form values and domain") {
  CHECK(mc::half_cauchy_lpdf(1.0, 5.0) == doctest::Approx(-2.100241330876836).epsilon(1e-14));
  CHECK(mc::half_cauchy_lpdf(5.0, 5.0) == doctest::Approx(-2.7541677982835004).epsilon(1e-14));
  CHECK(mc::half_cauchy_lpdf(1.7, 2.5) == doctest::Approx(-1.7479523588813584).epsilon(1e-14));
  // Density at 0 is 2/(pi*scale).
  CHECK(mc::half_cauchy_lpdf(0.0, 2.0) ==
        doctest::Approx(std::log(2.0 / (mc::kPi * 2.0))).epsilon(1e-14));
  CHECK_THROWS_AS((void)mc::half_cauchy_lpdf(-0.1, 1.0), DomainError);
  CHECK_THROWS_AS((void)mc::half_cauchy_lpdf(1.0, 0.0), DomainError);
}

TEST_CASE("cauchy_inv_cdf quantiles") {
  CHECK(mc::cauchy_inv_cdf(0.5, 3.0, 7.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(mc::cauchy_inv_cdf(0.73, 1.0, 2.0) ==
        doctest::Approx(2.763237184726378).epsilon(1e-13));
  // Quartiles of the standard Cauchy sit at -+1.
  CHECK(mc::cauchy_inv_cdf(0.25, 0.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(mc::cauchy_inv_cdf(0.75, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)mc::cauchy_inv_cdf(0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS((void)mc::cauchy_inv_cdf(1.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS((void)mc::cauchy_inv_cdf(0.5, 0.0, 0.0), DomainError);
}

TEST_CASE("densities integrate to one") {
  // Normal over mu +- 9 sd; the truncated tail is < 1e-18 (Mills bound).
  for (auto [mu, sd] : {std::pair{0.0, 1.0}, {1.3, 0.4}, {-2.0, 3.5}}) {
    const double total = simpson(mu - 9 * sd, mu + 9 * sd, 40000, [&](double x) {
      return std::exp(mc::normal_lpdf(x, mu, sd));
    });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
  // Half-Cauchy on log-spaced panels; f(x) <= 2s/(pi x^2), so the mass beyond
  // 1e7*s is under 6.4e-8.
  for (double s : {0.7, 5.0}) {
    double total = simpson(0.0, s, 20000,
                           [&](double x) { return std::exp(mc::half_cauchy_lpdf(x, s)); });
    for (int k = 0; k < 7; ++k) {
      const double a = s * std::pow(10.0, k), b = 10.0 * a;
      total += simpson(a, b, 20000,
                       [&](double x) { return std::exp(mc::half_cauchy_lpdf(x, s)); });
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
  // Uniform is flat at 1/(hi-lo).
  const auto uni = mc::DensityKernel::uniform_interval(-2.0, 5.0);
  CHECK(std::exp(uni.lpdf(0.0)) * 7.0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("DensityKernel matches the free functions and knows its support") {
  const auto nrm = mc::DensityKernel::normal(0.4, 1.7);
  CHECK(nrm.lpdf(1.0) == doctest::Approx(mc::normal_lpdf(1.0, 0.4, 1.7)).epsilon(1e-15));
  CHECK(nrm.support_lo() == -std::numeric_limits<double>::infinity());
  CHECK(nrm.support_hi() == std::numeric_limits<double>::infinity());

  const auto hc = mc::DensityKernel::half_cauchy(2.5);
  CHECK(hc.lpdf(1.7) == doctest::Approx(mc::half_cauchy_lpdf(1.7, 2.5)).epsilon(1e-15));
  CHECK(hc.support_lo() == 0.0);

  const auto uni = mc::DensityKernel::uniform_interval(1.0, 3.0);
  CHECK(uni.lpdf(2.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(uni.support_lo() == 1.0);
  CHECK(uni.support_hi() == 3.0);

  CHECK_THROWS_AS(mc::DensityKernel::uniform_interval(3.0, 3.0), DomainError);
  CHECK_THROWS_AS(mc::DensityKernel::normal(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(mc::DensityKernel::half_cauchy(-1.0), DomainError);
  // Scalar lpdf on the matrix family (and vice versa) is a shape misuse.
  const auto lkj = mc::DensityKernel::lkj_cholesky(2.0);
  CHECK_THROWS_AS((void)lkj.lpdf(0.5), ShapeError);
  CHECK_THROWS_AS((void)uni.lpdf(Matrix::identity(2)), ShapeError);
}

TEST_CASE("positive_log transform: round trip, Jacobian, gradient") {
  for (double z : {-3.0, -0.5, 0.0, 1.2, 4.0}) {
    const auto [x, lj] = mc::positive_log_constrain(z);
    CHECK(x == doctest::Approx(std::exp(z)).epsilon(1e-15));
    CHECK(lj == doctest::Approx(z).epsilon(1e-15));
    CHECK(mc::positive_log_unconstrain(x) == doctest::Approx(z).epsilon(1e-12));
    // log|dx/dz| equals the numerical derivative's log.
    const double d = deriv_central(
        [](double t) { return mc::positive_log_constrain(t).value; }, z);
    CHECK(std::log(d) == doctest::Approx(lj).epsilon(1e-7));
  }
  CHECK_THROWS_AS((void)mc::positive_log_unconstrain(0.0), DomainError);
  CHECK_THROWS_AS((void)mc::positive_log_unconstrain(-1.0), DomainError);
}

TEST_CASE("interval transform: frozen values, round trip, Jacobian") {
  {
    const auto [x, lj] = mc::interval_constrain(0.7, -2.0, 5.0);
    CHECK(x == doctest::Approx(2.677314405177163).epsilon(1e-14));
    CHECK(lj == doctest::Approx(0.43953805128439716).epsilon(1e-13));
  }
  {
    const auto [x, lj] = mc::interval_constrain(0.0, 0.0, 0.5 * mc::kPi);
    CHECK(x == doctest::Approx(0.25 * mc::kPi).epsilon(1e-14));
    CHECK(lj == doctest::Approx(-0.9347116558304358).epsilon(1e-13));
  }
  for (double z : {-30.0, -2.0, 0.0, 1.5, 30.0}) {
    const auto [x, lj] = mc::interval_constrain(z, 1.0, 4.0);
    CHECK(x > 1.0);
    CHECK(x < 4.0);
    if (std::abs(z) < 20.0) {
      CHECK(mc::interval_unconstrain(x, 1.0, 4.0) == doctest::Approx(z).epsilon(1e-9));
      const double d = deriv_central(
          [](double t) { return mc::interval_constrain(t, 1.0, 4.0).value; }, z);
      CHECK(std::log(d) == doctest::Approx(lj).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS((void)mc::interval_unconstrain(1.0, 1.0, 4.0), DomainError);
  CHECK_THROWS_AS((void)mc::interval_unconstrain(5.0, 1.0, 4.0), DomainError);
}

TEST_CASE("softplus is overflow-safe and accurate") {
  CHECK(mc::softplus(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(mc::softplus(40.0) == doctest::Approx(40.0).epsilon(1e-15));
  CHECK(mc::softplus(700.0) == doctest::Approx(700.0).epsilon(1e-15));
  CHECK(mc::softplus(-40.0) == doctest::Approx(std::exp(-40.0)).epsilon(1e-10));
  CHECK(std::isfinite(mc::softplus(-700.0)));
}

TEST_CASE("cholesky_corr_constrain: frozen K=2 and K=3 examples") {
  {
    const std::vector<double> z{0.5};
    std::vector<double> L;
    const double lj = mc::cholesky_corr_constrain(std::span<const double>(z), 2, L);
    CHECK(L[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(L[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(L[2] == doctest::Approx(0.46211715726000974).epsilon(1e-14));
    CHECK(L[3] == doctest::Approx(0.8868188839700739).epsilon(1e-14));
    CHECK(lj == doctest::Approx(-0.24022901391655505).epsilon(1e-13));
  }
  {
    const std::vector<double> z{0.3, -0.4, 0.2};
    std::vector<double> L;
    const double lj = mc::cholesky_corr_constrain(std::span<const double>(z), 3, L);
    CHECK(L[3] == doctest::Approx(0.2913126124515909).epsilon(1e-14));
    CHECK(L[4] == doctest::Approx(0.9566279119002483).epsilon(1e-14));
    CHECK(L[6] == doctest::Approx(-0.3799489622552249).epsilon(1e-14));
    CHECK(L[7] == doctest::Approx(0.1825736420303209).epsilon(1e-14));
    CHECK(L[8] == doctest::Approx(0.9068107031332184).epsilon(1e-14));
    CHECK(lj == doctest::Approx(-0.3622781396953926).epsilon(1e-13));
  }
  std::vector<double> L;
  const std::vector<double> wrong{0.1, 0.2};
  CHECK_THROWS_AS((void)mc::cholesky_corr_constrain(std::span<const double>(wrong), 3, L),
                  ShapeError);
}

TEST_CASE("cholesky_corr_constrain: unit rows and exact round trip") {
  std::mt19937 gen(7);
  std::normal_distribution<double> nd(0.0, 1.2);
  for (std::size_t K : {2, 3, 5, 6}) {
    std::vector<double> z(K * (K - 1) / 2);
    for (double& v : z) v = nd(gen);
    std::vector<double> L;
    mc::cholesky_corr_constrain(std::span<const double>(z), K, L);
    for (std::size_t i = 0; i < K; ++i) {
      double norm = 0.0;
      for (std::size_t m = 0; m <= i; ++m) norm += L[i * K + m] * L[i * K + m];
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
      for (std::size_t m = i + 1; m < K; ++m) CHECK(L[i * K + m] == 0.0);
      CHECK(L[i * K + i] > 0.0);
    }
    const std::vector<double> back =
        mc::cholesky_corr_unconstrain(std::span<const double>(L), K);
    REQUIRE(back.size() == z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
      CHECK(back[i] == doctest::Approx(z[i]).epsilon(1e-12));
  }
}

TEST_CASE("lkj_cholesky: kernel, validation, and eta=1 flatness") {
  // 2x2: the only free entry is rho; kernel must be (eta-1) * ln(1 - rho^2) + const.
  for (double eta : {1.0, 2.0, 3.5}) {
    double offset = 0.0;
    bool first = true;
    for (double rho = -0.95; rho < 0.96; rho += 0.05) {
      Matrix L(2, 2, 0.0);
      L(0, 0) = 1.0;
      L(1, 0) = rho;
      L(1, 1) = std::sqrt(1.0 - rho * rho);
      const double got = mc::lkj_cholesky_lpdf(L, eta);
      const double expect = (eta - 1.0) * std::log1p(-rho * rho);
      if (first) {
        offset = got - expect;
        first = false;
      }
      CHECK(got - expect == doctest::Approx(offset).epsilon(1e-12));
    }
  }
  // The kernel agrees with the validated wrapper on a 3x3 factor.
  const std::vector<double> z{0.3, -0.4, 0.2};
  std::vector<double> Lv;
  mc::cholesky_corr_constrain(std::span<const double>(z), 3, Lv);
  Matrix L(3, 3, 0.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) L(i, j) = Lv[i * 3 + j];
  const std::vector<double> diag{L(0, 0), L(1, 1), L(2, 2)};
  CHECK(mc::lkj_cholesky_lpdf(L, 2.0) ==
        doctest::Approx(mc::lkj_cholesky_kernel(std::span<const double>(diag), 2.0))
            .epsilon(1e-13));
  // Bad factors are rejected: non-unit row norm, upper-triangular garbage.
  Matrix bad = L;
  bad(1, 0) += 0.1;
  CHECK_THROWS_AS((void)mc::lkj_cholesky_lpdf(bad, 2.0), DomainError);
  Matrix upper = L;
  upper(0, 2) = 0.3;
  CHECK_THROWS_AS((void)mc::lkj_cholesky_lpdf(upper, 2.0), DomainError);
  CHECK_THROWS_AS(mc::DensityKernel::lkj_cholesky(0.5), DomainError);
}

TEST_CASE("ConstraintTransform wraps the element maps with consistent shapes") {
  const auto pos = mc::ConstraintTransform::positive_log(3);
  CHECK(pos.unconstrained_dim() == 3);
  CHECK(pos.constrained_dim() == 3);
  const std::vector<double> z{-1.0, 0.0, 2.0};
  const auto res = pos.constrain(std::span<const double>(z));
  CHECK(res.value[2] == doctest::Approx(std::exp(2.0)).epsilon(1e-15));
  CHECK(res.log_jacobian == doctest::Approx(1.0).epsilon(1e-15));  // -1 + 0 + 2
  const auto back = pos.unconstrain(std::span<const double>(res.value));
  for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(z[i]).epsilon(1e-13));

  const auto iv = mc::ConstraintTransform::interval(0.0, 10.0, 2);
  const std::vector<double> z2{0.0, 1.0};
  const auto res2 = iv.constrain(std::span<const double>(z2));
  CHECK(res2.value[0] == doctest::Approx(5.0).epsilon(1e-14));
  const auto id = mc::ConstraintTransform::identity(4);
  const std::vector<double> z4{1.0, 2.0, 3.0, 4.0};
  const auto res4 = id.constrain(std::span<const double>(z4));
  CHECK(res4.log_jacobian == 0.0);
  CHECK(res4.value == z4);

  const auto ch = mc::ConstraintTransform::cholesky_correlation(3);
  CHECK(ch.unconstrained_dim() == 3);
  CHECK(ch.constrained_dim() == 9);
  const std::vector<double> z3{0.3, -0.4, 0.2};
  const auto res3 = ch.constrain(std::span<const double>(z3));
  CHECK(res3.log_jacobian == doctest::Approx(-0.3622781396953926).epsilon(1e-13));
  const auto back3 = ch.unconstrain(std::span<const double>(res3.value));
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(back3[i] == doctest::Approx(z3[i]).epsilon(1e-12));

  const std::vector<double> short_z{1.0};
  CHECK_THROWS_AS((void)pos.constrain(std::span<const double>(short_z)), ShapeError);
}

TEST_CASE("dual numbers differentiate the densities exactly") {
  // d/dx normal_lpdf(x | mu, sd) = -(x - mu)/sd^2, and a seeded three-way check.
  const mc::Dual x = mc::Dual::variable(0.7, 0, 3);
  const mc::Dual mu = mc::Dual::variable(0.2, 1, 3);
  const mc::Dual sd = mc::Dual::variable(1.3, 2, 3);
  const mc::Dual lp = mc::normal_lpdf(x, mu, sd);
  CHECK(lp.val == doctest::Approx(mc::normal_lpdf(0.7, 0.2, 1.3)).epsilon(1e-15));
  CHECK(lp.der[0] == doctest::Approx(-(0.7 - 0.2) / (1.3 * 1.3)).epsilon(1e-13));
  CHECK(lp.der[1] == doctest::Approx((0.7 - 0.2) / (1.3 * 1.3)).epsilon(1e-13));
  const double fd = deriv_central(
      [](double s) { return mc::normal_lpdf(0.7, 0.2, s); }, 1.3);
  CHECK(lp.der[2] == doctest::Approx(fd).epsilon(1e-7));

  const mc::Dual hx = mc::Dual::variable(1.7, 0, 1);
  const mc::Dual hlp = mc::half_cauchy_lpdf(hx, mc::Dual(2.5));
  const double hfd = deriv_central(
      [](double t) { return mc::half_cauchy_lpdf(t, 2.5); }, 1.7);
  CHECK(hlp.der[0] == doctest::Approx(hfd).epsilon(1e-7));

  const mc::Dual iz = mc::Dual::variable(0.4, 0, 1);
  const auto ic = mc::interval_constrain(iz, -1.0, 2.0);
  const double ifd = deriv_central(
      [](double t) { return mc::interval_constrain(t, -1.0, 2.0).value; }, 0.4);
  CHECK(ic.value.der[0] == doctest::Approx(ifd).epsilon(1e-7));
  const double jfd = deriv_central(
      [](double t) { return mc::interval_constrain(t, -1.0, 2.0).log_jacobian; }, 0.4);
  CHECK(ic.log_jacobian.der[0] == doctest::Approx(jfd).epsilon(1e-7));
}
