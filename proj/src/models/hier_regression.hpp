#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/matrix.hpp"
#include "mathcore/densities.hpp"
#include "mathcore/transforms.hpp"
#include "models/model.hpp"

namespace hiermc::models {

struct HouseholdRecord {
  int site_index = 0;  // 1-based
  double outcome = 0.0;
  int treatment = 0;  // 0 or 1
  std::optional<double> baseline;
};

// Fully assembled regression inputs: household design matrix X (N x I, first
// column ones), 0-based site index per household, outcomes, and site-level
// predictor matrix Z (S x J).
struct RegressionData {
  Matrix x;
  std::vector<int> site;
  std::vector<double> y;
  Matrix z;
  std::size_t num_sites = 0;
};

// Builds X = (1, treatment) or (1, treatment, baseline) and validates:
// site indices contiguous 1..S, treatment in {0,1}, finite outcomes, baseline
// present on every record when requested, Z rows == S.
RegressionData assemble_regression_data(std::span<const HouseholdRecord> records,
                                        const Matrix& z, bool use_baseline);

// beta = gamma * Z^T + diag(theta) * L * u; shapes (I x J)(J x S) + (I x I)(I x S).
Matrix regression_coefficients(const Matrix& gamma, const Matrix& z,
                               std::span<const double> theta, const Matrix& l_omega,
                               const Matrix& u);

struct HierRegressionConfig {
  double lkj_eta = 2.0;
  double gamma_prior_sd = 2.2360679774997896;  // sqrt(5)
  double theta_cauchy_scale = 2.5;
  double sigma_upper = 100000.0;
};

// Varying-slopes regression with site-level predictors:
//   y_i ~ N(X_i . beta_{site(i)}, sigma_{site(i)})
//   beta = gamma Z^T + diag(theta) L u,  u_{ks} ~ N(0,1),  L ~ LKJ-Cholesky(eta)
//   theta_k = theta_cauchy_scale * tan(theta_unif_k),  theta_unif_k ~ U(0, pi/2)
//     (equivalently theta_k is half-Cauchy via its quantile map)
//   gamma_{kj} ~ N(0, gamma_prior_sd),  sigma_s ~ U(0, sigma_upper)
// Unconstrained order: u (I*S), L rows (I(I-1)/2), theta_unif raw (I),
// gamma (I*J), sigma raw (S).
class HierRegressionModel final : public Model {
 public:
  HierRegressionModel(RegressionData data, HierRegressionConfig cfg = {});

  std::size_t dim() const override { return dim_; }
  double log_density(std::span<const double> z, std::span<double> grad) const override;
  std::vector<double> constrain(std::span<const double> z) const override;
  std::vector<std::string> value_names() const override;
  std::vector<std::string> coordinate_labels() const override;

  // Likelihood term only (sum of household log densities), for oracle comparison.
  double log_likelihood(std::span<const double> z) const;

  std::size_t num_predictors() const { return I_; }
  std::size_t num_sites() const { return S_; }
  std::size_t num_site_predictors() const { return J_; }
  const RegressionData& data() const { return data_; }
  const HierRegressionConfig& config() const { return cfg_; }

  template <class T>
  T log_density_generic(std::span<const T> zvec) const {
    namespace mc = hiermc::mathcore;
    using std::tan;
    if (zvec.size() != dim_) throw ShapeError("log_density: wrong parameter count");
    const std::size_t I = I_, S = S_, J = J_, M = I * (I - 1) / 2;
    std::span<const T> u = zvec.subspan(0, I * S);
    std::span<const T> zl = zvec.subspan(I * S, M);
    std::span<const T> zt = zvec.subspan(I * S + M, I);
    std::span<const T> zg = zvec.subspan(I * S + M + I, I * J);
    std::span<const T> zs = zvec.subspan(I * S + M + I + I * J, S);

    T lp(0.0);
    std::vector<T> L;
    lp += mc::cholesky_corr_constrain(zl, I, L);
    std::vector<T> diag(I);
    for (std::size_t k = 0; k < I; ++k) diag[k] = L[k * I + k];
    lp += mc::lkj_cholesky_kernel(std::span<const T>(diag), cfg_.lkj_eta);

    std::vector<T> theta(I);
    for (std::size_t k = 0; k < I; ++k) {
      auto [v, lj] = mc::interval_constrain(zt[k], 0.0, 0.5 * mc::kPi);
      theta[k] = T(cfg_.theta_cauchy_scale) * tan(v);
      lp += lj - std::log(0.5 * mc::kPi);  // Jacobian + uniform prior
    }

    std::vector<T> sigma(S);
    for (std::size_t s = 0; s < S; ++s) {
      auto [v, lj] = mc::interval_constrain(zs[s], 0.0, cfg_.sigma_upper);
      sigma[s] = v;
      lp += lj - std::log(cfg_.sigma_upper);
    }

    for (std::size_t i = 0; i < I * S; ++i) lp += mc::normal_lpdf(u[i], T(0.0), T(1.0));
    for (std::size_t i = 0; i < I * J; ++i)
      lp += mc::normal_lpdf(zg[i], T(0.0), T(cfg_.gamma_prior_sd));

    // beta[k][s] = sum_j gamma[k][j] Z[s][j] + theta_k * sum_{m<=k} L[k][m] u[m][s]
    std::vector<T> beta(I * S, T(0.0));
    for (std::size_t k = 0; k < I; ++k)
      for (std::size_t s = 0; s < S; ++s) {
        T acc(0.0);
        for (std::size_t j = 0; j < J; ++j) acc += zg[k * J + j] * T(data_.z(s, j));
        for (std::size_t m = 0; m <= k; ++m)
          acc += theta[k] * L[k * I + m] * u[m * S + s];
        beta[k * S + s] = acc;
      }

    const std::size_t N = data_.y.size();
    for (std::size_t n = 0; n < N; ++n) {
      const int s = data_.site[n];
      T mu(0.0);
      for (std::size_t k = 0; k < I; ++k) mu += T(data_.x(n, k)) * beta[k * S + s];
      lp += mc::normal_lpdf(T(data_.y[n]), mu, sigma[s]);
    }
    return lp;
  }

 private:
  void check_input(std::span<const double> z) const;

  RegressionData data_;
  HierRegressionConfig cfg_;
  std::size_t I_, S_, J_, dim_;
};

}  // namespace hiermc::models
