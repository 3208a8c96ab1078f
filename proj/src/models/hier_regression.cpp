#include "models/hier_regression.hpp"

#include <algorithm>
#include <cmath>

namespace hiermc::models {

namespace mc = hiermc::mathcore;

RegressionData assemble_regression_data(std::span<const HouseholdRecord> records,
                                        const Matrix& z, bool use_baseline) {
  if (records.empty()) throw DataError("household data is empty");
  int max_site = 0;
  for (const auto& r : records) max_site = std::max(max_site, r.site_index);
  if (max_site <= 0) throw DataError("site indices must be positive (1-based)");
  const std::size_t S = static_cast<std::size_t>(max_site);

  std::vector<bool> seen(S, false);
  std::vector<std::size_t> missing_baseline;
  for (std::size_t n = 0; n < records.size(); ++n) {
    const auto& r = records[n];
    if (r.site_index < 1 || static_cast<std::size_t>(r.site_index) > S)
      throw DataError("record " + std::to_string(n + 1) + ": site index out of range");
    seen[r.site_index - 1] = true;
    if (r.treatment != 0 && r.treatment != 1)
      throw DataError("record " + std::to_string(n + 1) + ": treatment must be 0 or 1");
    if (!std::isfinite(r.outcome))
      throw DataError("record " + std::to_string(n + 1) + ": non-finite outcome");
    if (use_baseline && !r.baseline) missing_baseline.push_back(n + 1);
  }
  for (std::size_t s = 0; s < S; ++s)
    if (!seen[s])
      throw DataError("site indices are not contiguous: no records for site " +
                      std::to_string(s + 1));
  if (!missing_baseline.empty()) {
    std::string msg = "baseline outcome missing for record(s)";
    for (std::size_t i = 0; i < missing_baseline.size() && i < 20; ++i)
      msg += (i ? "," : "") + std::string(" ") + std::to_string(missing_baseline[i]);
    if (missing_baseline.size() > 20) msg += ", ...";
    throw DataError(msg);
  }
  if (z.rows() != S)
    throw ShapeError("site predictor matrix has " + std::to_string(z.rows()) +
                     " rows, expected " + std::to_string(S));
  if (z.cols() == 0) throw ShapeError("site predictor matrix has no columns");

  RegressionData d;
  d.num_sites = S;
  d.z = z;
  const std::size_t I = use_baseline ? 3 : 2;
  d.x = Matrix(records.size(), I);
  d.site.resize(records.size());
  d.y.resize(records.size());
  for (std::size_t n = 0; n < records.size(); ++n) {
    d.x(n, 0) = 1.0;
    d.x(n, 1) = records[n].treatment;
    if (use_baseline) d.x(n, 2) = *records[n].baseline;
    d.site[n] = records[n].site_index - 1;
    d.y[n] = records[n].outcome;
  }
  return d;
}

Matrix regression_coefficients(const Matrix& gamma, const Matrix& z,
                               std::span<const double> theta, const Matrix& l_omega,
                               const Matrix& u) {
  const std::size_t I = gamma.rows(), J = gamma.cols(), S = u.cols();
  if (z.cols() != J) throw ShapeError("regression_coefficients: Z columns != gamma columns");
  if (z.rows() != S) throw ShapeError("regression_coefficients: Z rows != u columns");
  if (theta.size() != I) throw ShapeError("regression_coefficients: theta length != rows");
  if (l_omega.rows() != I || l_omega.cols() != I)
    throw ShapeError("regression_coefficients: L must be I x I");
  if (u.rows() != I) throw ShapeError("regression_coefficients: u rows != I");

  Matrix beta(I, S);
  for (std::size_t k = 0; k < I; ++k)
    for (std::size_t s = 0; s < S; ++s) {
      double acc = 0.0;
      for (std::size_t j = 0; j < J; ++j) acc += gamma(k, j) * z(s, j);
      for (std::size_t m = 0; m <= k; ++m) acc += theta[k] * l_omega(k, m) * u(m, s);
      beta(k, s) = acc;
    }
  return beta;
}

HierRegressionModel::HierRegressionModel(RegressionData data, HierRegressionConfig cfg)
    : data_(std::move(data)), cfg_(cfg) {
  I_ = data_.x.cols();
  S_ = data_.num_sites;
  J_ = data_.z.cols();
  if (I_ == 0 || S_ == 0 || J_ == 0)
    throw ShapeError("HierRegressionModel: empty design");
  if (data_.x.rows() != data_.y.size() || data_.y.size() != data_.site.size())
    throw ShapeError("HierRegressionModel: X, y, site sizes disagree");
  if (data_.z.rows() != S_) throw ShapeError("HierRegressionModel: Z rows != sites");
  for (int s : data_.site)
    if (s < 0 || static_cast<std::size_t>(s) >= S_)
      throw DataError("HierRegressionModel: site index out of range");
  if (cfg_.lkj_eta < 1.0) throw DomainError("HierRegressionModel: lkj_eta must be >= 1");
  if (!(cfg_.gamma_prior_sd > 0.0))
    throw DomainError("HierRegressionModel: gamma_prior_sd must be positive");
  if (!(cfg_.theta_cauchy_scale > 0.0))
    throw DomainError("HierRegressionModel: theta_cauchy_scale must be positive");
  if (!(cfg_.sigma_upper > 0.0))
    throw DomainError("HierRegressionModel: sigma_upper must be positive");
  dim_ = I_ * S_ + I_ * (I_ - 1) / 2 + I_ + I_ * J_ + S_;
}

void HierRegressionModel::check_input(std::span<const double> z) const {
  if (z.size() != dim_) throw ShapeError("log_density: wrong parameter count");
  for (double zi : z)
    if (!std::isfinite(zi)) throw EvaluationError("log_density: non-finite input");
}

double HierRegressionModel::log_density(std::span<const double> zvec,
                                        std::span<double> grad) const {
  check_input(zvec);
  const bool want_grad = !grad.empty();
  if (want_grad && grad.size() != dim_)
    throw ShapeError("log_density: gradient buffer has wrong length");

  const std::size_t I = I_, S = S_, J = J_, M = I * (I - 1) / 2;
  const std::size_t off_u = 0, off_l = I * S, off_t = off_l + M, off_g = off_t + I,
                    off_s = off_g + I * J;
  const double* u = zvec.data() + off_u;
  const double* zl = zvec.data() + off_l;
  const double* zt = zvec.data() + off_t;
  const double* zg = zvec.data() + off_g;
  const double* zs = zvec.data() + off_s;

  double lp = 0.0;

  // Cholesky rows from partial correlations; keep c and the pre-entry row mass
  // for the backward sweep.
  std::vector<double> L(I * I, 0.0), c(M), s_pre(M);
  L[0] = 1.0;
  {
    std::size_t idx = 0;
    for (std::size_t i = 1; i < I; ++i) {
      double s = 1.0;
      for (std::size_t m = 0; m < i; ++m, ++idx) {
        const double cm = std::tanh(zl[idx]);
        c[idx] = cm;
        s_pre[idx] = s;
        const double omc2 = 1.0 - cm * cm;
        L[i * I + m] = cm * std::sqrt(s);
        lp += std::log(omc2) + 0.5 * std::log(s);
        s *= omc2;
      }
      L[i * I + i] = std::sqrt(s);
      // LKJ kernel exponent for 1-based row k = i+1: I - k + 2*eta - 2.
      lp += (static_cast<double>(I - (i + 1)) + 2.0 * cfg_.lkj_eta - 2.0) *
            std::log(L[i * I + i]);
    }
  }

  // theta_k = scale * tan(v_k), v_k = (pi/2) * logistic(z); net contribution of the
  // Jacobian and the uniform prior is ln s + ln(1-s).
  std::vector<double> theta(I), lt(I);
  for (std::size_t k = 0; k < I; ++k) {
    const double sp_neg = mc::softplus(-zt[k]);  // -ln s
    const double sp_pos = mc::softplus(zt[k]);   // -ln(1-s)
    lt[k] = std::exp(-sp_neg);
    theta[k] = cfg_.theta_cauchy_scale * std::tan(0.5 * mc::kPi * lt[k]);
    lp += -sp_neg - sp_pos;
  }

  std::vector<double> sigma(S), ls(S);
  for (std::size_t s = 0; s < S; ++s) {
    const double sp_neg = mc::softplus(-zs[s]);
    const double sp_pos = mc::softplus(zs[s]);
    ls[s] = std::exp(-sp_neg);
    sigma[s] = cfg_.sigma_upper * ls[s];
    lp += -sp_neg - sp_pos;
  }

  for (std::size_t i = 0; i < I * S; ++i)
    lp += -0.5 * mc::kLogTwoPi - 0.5 * u[i] * u[i];
  const double gsd = cfg_.gamma_prior_sd;
  for (std::size_t i = 0; i < I * J; ++i)
    lp += -0.5 * mc::kLogTwoPi - std::log(gsd) - 0.5 * zg[i] * zg[i] / (gsd * gsd);

  std::vector<double> beta(I * S, 0.0);
  for (std::size_t k = 0; k < I; ++k)
    for (std::size_t s = 0; s < S; ++s) {
      double acc = 0.0;
      for (std::size_t j = 0; j < J; ++j) acc += zg[k * J + j] * data_.z(s, j);
      for (std::size_t m = 0; m <= k; ++m) acc += theta[k] * L[k * I + m] * u[m * S + s];
      beta[k * S + s] = acc;
    }

  // Likelihood sweep; G[k][s] = d lp / d beta[k][s], dsig = d lp / d sigma_s.
  std::vector<double> G(want_grad ? I * S : 0, 0.0), dsig(want_grad ? S : 0, 0.0);
  const std::size_t N = data_.y.size();
  for (std::size_t n = 0; n < N; ++n) {
    const int s = data_.site[n];
    double mu = 0.0;
    for (std::size_t k = 0; k < I; ++k) mu += data_.x(n, k) * beta[k * S + s];
    const double sg = sigma[s];
    const double r = data_.y[n] - mu;
    const double w = r / (sg * sg);
    lp += -0.5 * mc::kLogTwoPi - std::log(sg) - 0.5 * r * w;
    if (want_grad) {
      for (std::size_t k = 0; k < I; ++k) G[k * S + s] += w * data_.x(n, k);
      dsig[s] += (r * w - 1.0) / sg;
    }
  }

  if (!want_grad) return lp;

  // gamma: G Z plus the prior score.
  for (std::size_t k = 0; k < I; ++k)
    for (std::size_t j = 0; j < J; ++j) {
      double acc = 0.0;
      for (std::size_t s = 0; s < S; ++s) acc += G[k * S + s] * data_.z(s, j);
      grad[off_g + k * J + j] = acc - zg[k * J + j] / (gsd * gsd);
    }

  // u: (diag(theta) L)^T G plus the prior score.
  for (std::size_t m = 0; m < I; ++m)
    for (std::size_t s = 0; s < S; ++s) {
      double acc = 0.0;
      for (std::size_t k = m; k < I; ++k) acc += theta[k] * L[k * I + m] * G[k * S + s];
      grad[off_u + m * S + s] = acc - u[m * S + s];
    }

  // W[k][m] = sum_s G[k][s] u[m][s], needed for theta and L adjoints.
  std::vector<double> W(I * I, 0.0);
  for (std::size_t k = 0; k < I; ++k)
    for (std::size_t m = 0; m <= k; ++m) {
      double acc = 0.0;
      for (std::size_t s = 0; s < S; ++s) acc += G[k * S + s] * u[m * S + s];
      W[k * I + m] = acc;
    }

  for (std::size_t k = 0; k < I; ++k) {
    double dtheta = 0.0;
    for (std::size_t m = 0; m <= k; ++m) dtheta += W[k * I + m] * L[k * I + m];
    // theta = scale * tan(v), v = (pi/2) s: dtheta/dz = (scale + theta^2/scale)
    //   * (pi/2) s (1-s); Jacobian term d/dz [ln s + ln(1-s)] = 1 - 2s.
    const double dtheta_dz = (cfg_.theta_cauchy_scale +
                              theta[k] * theta[k] / cfg_.theta_cauchy_scale) *
                             0.5 * mc::kPi * lt[k] * (1.0 - lt[k]);
    grad[off_t + k] = dtheta * dtheta_dz + (1.0 - 2.0 * lt[k]);
  }

  for (std::size_t s = 0; s < S; ++s)
    grad[off_s + s] =
        dsig[s] * cfg_.sigma_upper * ls[s] * (1.0 - ls[s]) + (1.0 - 2.0 * ls[s]);

  // Cholesky rows, reverse sweep. Row i: adjoint of the running mass s flows
  // backwards through s_m = s_{m-1} (1 - c_m^2); the diagonal, the LKJ kernel,
  // the likelihood (through A = diag(theta) L), and the per-entry Jacobian all
  // inject contributions.
  {
    std::size_t row_base = 0;
    for (std::size_t i = 1; i < I; ++i) {
      const double Ldiag = L[i * I + i];
      const double e_lkj = static_cast<double>(I - (i + 1)) + 2.0 * cfg_.lkj_eta - 2.0;
      double sbar = (W[i * I + i] * theta[i] + e_lkj / Ldiag) * 0.5 / Ldiag;
      for (std::size_t m = i; m-- > 0;) {
        const std::size_t idx = row_base + m;
        const double cm = c[idx], sp = s_pre[idx];
        const double omc2 = 1.0 - cm * cm;
        const double root = std::sqrt(sp);
        const double gL = W[i * I + m] * theta[i];
        const double cbar = gL * root - 2.0 * cm / omc2 - sbar * sp * 2.0 * cm;
        const double nsbar = gL * cm * 0.5 / root + 0.5 / sp + sbar * omc2;
        grad[off_l + idx] = cbar * omc2;  // dc/dz = 1 - tanh^2
        sbar = nsbar;
      }
      row_base += i;
    }
  }
  return lp;
}

double HierRegressionModel::log_likelihood(std::span<const double> zvec) const {
  check_input(zvec);
  std::vector<double> values = constrain(zvec);
  const std::size_t I = I_, S = S_;
  const double* beta = values.data();
  const double* sigma = values.data() + I * S + I * J_ + I + I * (I - 1) / 2;
  double lp = 0.0;
  for (std::size_t n = 0; n < data_.y.size(); ++n) {
    const int s = data_.site[n];
    double mu = 0.0;
    for (std::size_t k = 0; k < I; ++k) mu += data_.x(n, k) * beta[k * S + s];
    lp += mc::normal_lpdf(data_.y[n], mu, sigma[s]);
  }
  return lp;
}

std::vector<double> HierRegressionModel::constrain(std::span<const double> zvec) const {
  if (zvec.size() != dim_) throw ShapeError("constrain: wrong parameter count");
  const std::size_t I = I_, S = S_, J = J_, M = I * (I - 1) / 2;
  const double* u = zvec.data();
  std::span<const double> zl = zvec.subspan(I * S, M);
  const double* zt = zvec.data() + I * S + M;
  const double* zg = zvec.data() + I * S + M + I;
  const double* zs = zvec.data() + I * S + M + I + I * J;

  std::vector<double> L;
  mc::cholesky_corr_constrain(zl, I, L);
  std::vector<double> theta(I), sigma(S);
  for (std::size_t k = 0; k < I; ++k)
    theta[k] = cfg_.theta_cauchy_scale *
               std::tan(0.5 * mc::kPi * mc::interval_constrain(zt[k], 0.0, 1.0).value);
  for (std::size_t s = 0; s < S; ++s)
    sigma[s] = mc::interval_constrain(zs[s], 0.0, cfg_.sigma_upper).value;

  std::vector<double> out;
  out.reserve(2 * I * S + I * J + I + M + S);
  for (std::size_t k = 0; k < I; ++k)
    for (std::size_t s = 0; s < S; ++s) {
      double acc = 0.0;
      for (std::size_t j = 0; j < J; ++j) acc += zg[k * J + j] * data_.z(s, j);
      for (std::size_t m = 0; m <= k; ++m) acc += theta[k] * L[k * I + m] * u[m * S + s];
      out.push_back(acc);
    }
  out.insert(out.end(), zg, zg + I * J);
  out.insert(out.end(), theta.begin(), theta.end());
  for (std::size_t k = 0; k < I; ++k)
    for (std::size_t l = k + 1; l < I; ++l) {
      double acc = 0.0;  // Omega = L L^T, off-diagonal correlation entries
      for (std::size_t m = 0; m <= k; ++m) acc += L[k * I + m] * L[l * I + m];
      out.push_back(acc);
    }
  out.insert(out.end(), sigma.begin(), sigma.end());
  out.insert(out.end(), u, u + I * S);
  return out;
}

std::vector<std::string> HierRegressionModel::value_names() const {
  std::vector<std::string> names;
  const auto idx2 = [](const char* base, std::size_t a, std::size_t b) {
    return std::string(base) + "[" + std::to_string(a + 1) + "," +
           std::to_string(b + 1) + "]";
  };
  for (std::size_t k = 0; k < I_; ++k)
    for (std::size_t s = 0; s < S_; ++s) names.push_back(idx2("beta", k, s));
  for (std::size_t k = 0; k < I_; ++k)
    for (std::size_t j = 0; j < J_; ++j) names.push_back(idx2("gamma", k, j));
  for (std::size_t k = 0; k < I_; ++k)
    names.push_back("theta[" + std::to_string(k + 1) + "]");
  for (std::size_t k = 0; k < I_; ++k)
    for (std::size_t l = k + 1; l < I_; ++l) names.push_back(idx2("Omega", k, l));
  for (std::size_t s = 0; s < S_; ++s)
    names.push_back("sigma_s[" + std::to_string(s + 1) + "]");
  for (std::size_t k = 0; k < I_; ++k)
    for (std::size_t s = 0; s < S_; ++s) names.push_back(idx2("u", k, s));
  return names;
}

std::vector<std::string> HierRegressionModel::coordinate_labels() const {
  std::vector<std::string> labels;
  labels.reserve(dim_);
  const auto idx2 = [](const char* base, std::size_t a, std::size_t b) {
    return std::string(base) + "[" + std::to_string(a + 1) + "," +
           std::to_string(b + 1) + "]";
  };
  for (std::size_t k = 0; k < I_; ++k)
    for (std::size_t s = 0; s < S_; ++s) labels.push_back(idx2("u", k, s));
  for (std::size_t i = 1; i < I_; ++i)
    for (std::size_t m = 0; m < i; ++m) labels.push_back(idx2("L", i, m));
  for (std::size_t k = 0; k < I_; ++k)
    labels.push_back("theta_unif[" + std::to_string(k + 1) + "]");
  for (std::size_t k = 0; k < I_; ++k)
    for (std::size_t j = 0; j < J_; ++j) labels.push_back(idx2("gamma", k, j));
  for (std::size_t s = 0; s < S_; ++s)
    labels.push_back("sigma_raw[" + std::to_string(s + 1) + "]");
  return labels;
}

}  // namespace hiermc::models
