// hiermc command line: CSV in, fitted posterior tables out. All numerical work
// happens behind the C API; this file owns ingestion, validation, and file layout.
//
// Exit codes: 0 ok; 2 validation/usage error (no output files written);
// 3 sampling failure; 4 fit finished but some split R-hat exceeds 1.01
// (outputs are still written).
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hiermc/hiermc.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct CliError : std::runtime_error {
  int code;
  explicit CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

[[noreturn]] void fail(int code, const std::string& msg) { throw CliError(code, msg); }

// rc from the C API -> exit code; invalid inputs are validation failures.
[[noreturn]] void fail_api(hiermc_rc rc, const std::string& context) {
  fail(rc == HIERMC_ERR_SAMPLING ? 3 : 2, context + ": " + hiermc_last_error());
}

void check_api(hiermc_rc rc, const std::string& context) {
  if (rc != HIERMC_OK) fail_api(rc, context);
}

// Fixed-width-free, locale-independent float formatting shared by every output
// file, so identical fits serialize byte-identically.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e) fail(2, where + ": not a number: '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& where) {
  long v = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e) fail(2, where + ": not an integer: '" + s + "'");
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // data rows; CSV line = index + 2
};

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(2, path + ": cannot open");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) fail(2, path + ": empty file");
  t.header = split_csv_line(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != t.header.size())
      fail(2, path + ": line " + std::to_string(lineno) + ": expected " +
                  std::to_string(t.header.size()) + " fields, got " +
                  std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  if (t.rows.empty()) fail(2, path + ": no data rows");
  return t;
}

void require_header(const CsvTable& t, const std::vector<std::string>& expect,
                    const std::string& path) {
  if (t.header.size() < expect.size())
    fail(2, path + ": line 1: expected header '" +
                [&] {
                  std::string h;
                  for (const auto& c : expect) h += (h.empty() ? "" : ",") + c;
                  return h;
                }());
  for (std::size_t i = 0; i < expect.size(); ++i)
    if (t.header[i] != expect[i])
      fail(2, path + ": line 1: column " + std::to_string(i + 1) + " must be '" +
                  expect[i] + "', got '" + t.header[i] + "'");
}

// ---------- ingestion ----------

struct Sites {
  std::vector<std::string> names;
  std::vector<double> tau_hat, sigma_hat;
};

Sites ingest_sites(const std::string& path) {
  const CsvTable t = read_csv(path);
  require_header(t, {"site", "tau_hat", "sigma_hat"}, path);
  if (t.header.size() != 3) fail(2, path + ": line 1: expected exactly 3 columns");
  Sites s;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path + ": line " + std::to_string(r + 2);
    const auto& row = t.rows[r];
    if (row[0].empty()) fail(2, where + ": empty site name");
    for (const auto& prev : s.names)
      if (prev == row[0]) fail(2, where + ": duplicate site '" + row[0] + "'");
    const double th = parse_double(row[1], where + ", tau_hat");
    const double sh = parse_double(row[2], where + ", sigma_hat");
    if (!(sh > 0.0)) fail(2, where + ": sigma_hat must be positive for site '" +
                                 row[0] + "'");
    s.names.push_back(row[0]);
    s.tau_hat.push_back(th);
    s.sigma_hat.push_back(sh);
  }
  return s;
}

struct Households {
  std::vector<int32_t> site_index;
  std::vector<double> y;
  std::vector<int32_t> treatment;
  std::vector<double> baseline;  // used only when bis
};

Households ingest_households(const std::string& path, bool bis) {
  const CsvTable t = read_csv(path);
  require_header(t, {"site_index", "y", "treatment"}, path);
  const bool has_baseline_col = t.header.size() == 4 && t.header[3] == "y_baseline";
  if (t.header.size() > 3 && !has_baseline_col)
    fail(2, path + ": line 1: column 4 must be 'y_baseline', got '" + t.header[3] + "'");
  if (bis && !has_baseline_col)
    fail(2, path + ": model 2bis needs a 'y_baseline' column");
  Households h;
  std::vector<std::size_t> missing;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path + ": line " + std::to_string(r + 2);
    const auto& row = t.rows[r];
    const long s = parse_long(row[0], where + ", site_index");
    if (s < 1 || s > 1'000'000) fail(2, where + ": site_index out of range");
    const double y = parse_double(row[1], where + ", y");
    const long treat = parse_long(row[2], where + ", treatment");
    if (treat != 0 && treat != 1)
      fail(2, where + ": treatment must be 0 or 1, got " + row[2]);
    double base = 0.0;
    if (bis) {
      if (row[3].empty()) {
        missing.push_back(r + 2);
      } else {
        base = parse_double(row[3], where + ", y_baseline");
      }
    }
    h.site_index.push_back(static_cast<int32_t>(s));
    h.y.push_back(y);
    h.treatment.push_back(static_cast<int32_t>(treat));
    if (bis) h.baseline.push_back(base);
  }
  if (!missing.empty()) {
    std::string msg = path + ": empty y_baseline cells on lines ";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i)
      msg += (i ? ", " : "") + std::to_string(missing[i]);
    if (missing.size() > 20) msg += ", ...";
    fail(2, msg);
  }
  return h;
}

// Z = (intercept | predictor columns), rows ordered by site_index 1..S.
std::vector<double> ingest_sitepred(const std::string& path, int32_t& n_sites,
                                    int32_t& n_cols) {
  const CsvTable t = read_csv(path);
  require_header(t, {"site_index"}, path);
  if (t.header.size() < 2)
    fail(2, path + ": line 1: need at least one predictor column");
  const std::size_t extra = t.header.size() - 1;
  n_sites = static_cast<int32_t>(t.rows.size());
  n_cols = static_cast<int32_t>(extra + 1);
  std::vector<double> z(static_cast<std::size_t>(n_sites) * n_cols);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path + ": line " + std::to_string(r + 2);
    const long s = parse_long(t.rows[r][0], where + ", site_index");
    if (s != static_cast<long>(r + 1))
      fail(2, where + ": site_index must be " + std::to_string(r + 1) +
                  " (rows ordered 1..S), got " + std::to_string(s));
    z[r * n_cols] = 1.0;
    for (std::size_t c = 0; c < extra; ++c)
      z[r * n_cols + 1 + c] =
          parse_double(t.rows[r][1 + c], where + ", " + t.header[1 + c]);
  }
  return z;
}

// ---------- shared config plumbing ----------

struct ConfigFlags {
  int32_t chains = 4;
  int32_t warmup = 1000;
  int32_t iterations = 2000;
  std::uint64_t seed = 1;
  double target_accept = 0.99;
  int32_t max_leapfrog = 32;
  double divergence_threshold = 1000.0;
  bool no_metric_adaptation = false;
  double stepsize_jitter = 0.0;
  std::string out_dir = ".";
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--chains", f.chains, "Number of chains");
  cmd->add_option("--warmup", f.warmup, "Warmup iterations per chain");
  cmd->add_option("--iterations", f.iterations, "Total iterations per chain");
  cmd->add_option("--seed", f.seed, "Master RNG seed");
  cmd->add_option("--target-accept", f.target_accept, "Dual-averaging target");
  cmd->add_option("--max-leapfrog", f.max_leapfrog, "Max leapfrog steps per proposal");
  cmd->add_option("--divergence-threshold", f.divergence_threshold,
                  "Energy error flagged as divergent");
  cmd->add_flag("--no-metric-adaptation", f.no_metric_adaptation,
                "Keep the identity metric");
  cmd->add_option("--stepsize-jitter", f.stepsize_jitter,
                  "Uniform step-size jitter fraction in [0,1)");
  cmd->add_option("-o,--out", f.out_dir, "Output directory");
}

// Resolved pooling-model priors as the library applies them (<= 0 picks the
// built-in default), so the manifest records what was actually used.
json pooling_priors_json(double tau_prior_sd, double sigma_prior_scale) {
  return {{"tau_prior_sd", tau_prior_sd > 0.0 ? tau_prior_sd : std::sqrt(5.0)},
          {"sigma_prior_scale", sigma_prior_scale > 0.0 ? sigma_prior_scale : 5.0}};
}

struct ConfigHandle {
  hiermc_config* c = nullptr;
  ~ConfigHandle() { hiermc_config_free(c); }
};

void build_config(const ConfigFlags& f, ConfigHandle& h) {
  check_api(hiermc_config_create(&h.c), "config");
  check_api(hiermc_config_set_chains(h.c, f.chains), "config --chains");
  check_api(hiermc_config_set_iterations(h.c, f.warmup, f.iterations),
            "config --warmup/--iterations");
  check_api(hiermc_config_set_seed(h.c, f.seed), "config --seed");
  check_api(hiermc_config_set_target_accept(h.c, f.target_accept),
            "config --target-accept");
  check_api(hiermc_config_set_max_leapfrog(h.c, f.max_leapfrog),
            "config --max-leapfrog");
  check_api(hiermc_config_set_divergence_threshold(h.c, f.divergence_threshold),
            "config --divergence-threshold");
  check_api(hiermc_config_set_metric_adaptation(h.c, f.no_metric_adaptation ? 0 : 1),
            "config --no-metric-adaptation");
  check_api(hiermc_config_set_stepsize_jitter(h.c, f.stepsize_jitter),
            "config --stepsize-jitter");
}

json config_json(const ConfigFlags& f) {
  return {{"chains", f.chains},
          {"warmup", f.warmup},
          {"iterations", f.iterations},
          {"seed", f.seed},
          {"target_accept", f.target_accept},
          {"max_leapfrog", f.max_leapfrog},
          {"divergence_threshold", f.divergence_threshold},
          {"adapt_metric", !f.no_metric_adaptation},
          {"stepsize_jitter", f.stepsize_jitter}};
}

// ---------- output writers ----------

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) fail(3, p.string() + ": cannot write");
  return out;
}

void write_manifest(const std::filesystem::path& dir, const json& manifest) {
  auto out = open_out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
}

std::string sanitize(const std::string& name) {
  std::string s;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      s += ch;
    } else if (!s.empty() && s.back() != '_') {
      s += '_';
    }
  }
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s.empty() ? "param" : s;
}

double quantile_sorted(const std::vector<double>& x, double p) {
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= x.size()) return x.back();
  return x[lo] + (h - static_cast<double>(lo)) * (x[lo + 1] - x[lo]);
}

void write_density(const std::filesystem::path& dir, const std::string& name,
                   std::vector<double> draws) {
  std::sort(draws.begin(), draws.end());
  double lo = quantile_sorted(draws, 0.001);
  double hi = quantile_sorted(draws, 0.999);
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  constexpr int kBins = 60;
  const double width = (hi - lo) / kBins;
  std::vector<long> counts(kBins, 0);
  for (double v : draws) {
    if (v < lo || v > hi) continue;
    int b = static_cast<int>((v - lo) / width);
    if (b >= kBins) b = kBins - 1;
    ++counts[b];
  }
  auto out = open_out(dir / ("density_" + sanitize(name) + ".csv"));
  out << "bin_left,bin_right,count\n";
  for (int b = 0; b < kBins; ++b)
    out << num(lo + b * width) << "," << num(lo + (b + 1) * width) << ","
        << counts[b] << "\n";
}

// Writes summary.csv, diagnostics.txt, and per-parameter densities; returns the
// largest non-degenerate R-hat so the caller can pick the exit code.
double write_fit_outputs(const std::filesystem::path& dir, const hiermc_fit* fit) {
  const int32_t nv = hiermc_fit_num_values(fit);
  const int32_t nc = hiermc_fit_num_chains(fit);
  const int32_t nd = hiermc_fit_draws_per_chain(fit);

  {
    auto out = open_out(dir / "summary.csv");
    out << "parameter,mean,sd,q2.5,q25,q50,q75,q97.5,rhat,ess\n";
    for (int32_t i = 0; i < nv; ++i) {
      hiermc_summary s;
      check_api(hiermc_fit_summary(fit, i, &s), "summary");
      out << hiermc_fit_value_name(fit, i) << "," << num(s.mean) << "," << num(s.sd)
          << "," << num(s.q025) << "," << num(s.q25) << "," << num(s.q50) << ","
          << num(s.q75) << "," << num(s.q975) << "," << num(s.rhat) << ","
          << num(s.ess) << "\n";
    }
  }

  std::vector<double> draws(static_cast<std::size_t>(nc) * nd);
  for (int32_t i = 0; i < nv; ++i) {
    check_api(hiermc_fit_extract(fit, i, draws.data()), "extract");
    write_density(dir, hiermc_fit_value_name(fit, i), draws);
  }

  {
    std::vector<int32_t> div(nc), wdiv(nc);
    std::vector<double> step(nc), acc(nc);
    check_api(hiermc_fit_divergences(fit, div.data()), "diagnostics");
    check_api(hiermc_fit_warmup_divergences(fit, wdiv.data()), "diagnostics");
    check_api(hiermc_fit_step_sizes(fit, step.data()), "diagnostics");
    check_api(hiermc_fit_accept_rates(fit, acc.data()), "diagnostics");
    auto out = open_out(dir / "diagnostics.txt");
    long total = 0;
    for (int32_t c = 0; c < nc; ++c) {
      total += div[c];
      out << "chain " << (c + 1) << ": divergences " << div[c]
          << ", warmup_divergences " << wdiv[c] << ", step_size " << num(step[c])
          << ", accept_rate " << num(acc[c]) << "\n";
    }
    double max_rhat = 0.0;
    check_api(hiermc_fit_max_rhat(fit, &max_rhat), "diagnostics");
    out << "total post-warmup divergences: " << total << "\n";
    out << "max split R-hat: " << num(max_rhat) << "\n";
  }

  double max_rhat = 0.0;
  check_api(hiermc_fit_max_rhat(fit, &max_rhat), "max rhat");
  return max_rhat;
}

struct SitesHandle {
  hiermc_sites* s = nullptr;
  ~SitesHandle() { hiermc_sites_free(s); }
};

struct DataHandle {
  hiermc_data* d = nullptr;
  ~DataHandle() { hiermc_data_free(d); }
};

struct FitHandle {
  hiermc_fit* f = nullptr;
  ~FitHandle() { hiermc_fit_free(f); }
};

SitesHandle make_sites(const Sites& s) {
  std::vector<const char*> names;
  names.reserve(s.names.size());
  for (const auto& n : s.names) names.push_back(n.c_str());
  SitesHandle h;
  check_api(hiermc_sites_create(names.data(), s.tau_hat.data(), s.sigma_hat.data(),
                                static_cast<int32_t>(s.names.size()), &h.s),
            "sites");
  return h;
}

// ---------- fit-model1 ----------

struct Model1Flags {
  std::string sites_path;
  double tau_prior_sd = 0.0;      // <= 0: library default sqrt(5)
  double sigma_prior_scale = 0.0;  // <= 0: library default 5
  ConfigFlags config;
};

int run_fit_model1(const Model1Flags& f) {
  const Sites sites = ingest_sites(f.sites_path);
  SitesHandle sh = make_sites(sites);
  ConfigHandle ch;
  build_config(f.config, ch);

  FitHandle fit;
  const hiermc_rc rc = hiermc_fit_pooling_model(sh.s, ch.c, f.tau_prior_sd,
                                                f.sigma_prior_scale, &fit.f);
  if (rc != HIERMC_OK) fail_api(rc, "fit-model1");

  const std::filesystem::path dir(f.config.out_dir);
  std::filesystem::create_directories(dir);
  const double max_rhat = write_fit_outputs(dir, fit.f);

  {
    std::vector<double> omega(sites.names.size());
    double sigma_tilde = 0.0, omega_bar = 0.0;
    check_api(hiermc_pooling(fit.f, sh.s, omega.data(), &sigma_tilde, &omega_bar),
              "pooling");
    auto out = open_out(dir / "pooling.csv");
    out << "site,sigma_hat,omega_s\n";
    for (std::size_t i = 0; i < sites.names.size(); ++i)
      out << sites.names[i] << "," << num(sites.sigma_hat[i]) << "," << num(omega[i])
          << "\n";
    out << "OVERALL," << num(sigma_tilde) << "," << num(omega_bar) << "\n";
  }

  json manifest = {{"format_version", 1},
                   {"command", "fit-model1"},
                   {"inputs", {{"sites", f.sites_path}}},
                   {"config", config_json(f.config)},
                   {"priors", pooling_priors_json(f.tau_prior_sd, f.sigma_prior_scale)},
                   {"output_dir", f.config.out_dir}};
  write_manifest(dir, manifest);
  return max_rhat > 1.01 ? 4 : 0;
}

// ---------- fit-model2 ----------

struct Model2Flags {
  std::string households_path;
  std::string sitepred_path;
  bool bis = false;
  hiermc_regression_priors priors{};
  ConfigFlags config;
};

int run_fit_model2(const Model2Flags& f) {
  const Households hh = ingest_households(f.households_path, f.bis);
  int32_t n_sites = 0, n_cols = 0;
  const std::vector<double> z = ingest_sitepred(f.sitepred_path, n_sites, n_cols);

  DataHandle data;
  check_api(hiermc_data_create(hh.site_index.data(), hh.y.data(),
                               hh.treatment.data(),
                               f.bis ? hh.baseline.data() : nullptr,
                               static_cast<int32_t>(hh.y.size()), z.data(), n_sites,
                               n_cols, f.bis ? 1 : 0, &data.d),
            "households");

  ConfigHandle ch;
  build_config(f.config, ch);
  FitHandle fit;
  const hiermc_rc rc = hiermc_fit_regression_model(data.d, ch.c, &f.priors, &fit.f);
  if (rc != HIERMC_OK) fail_api(rc, "fit-model2");

  const std::filesystem::path dir(f.config.out_dir);
  std::filesystem::create_directories(dir);
  const double max_rhat = write_fit_outputs(dir, fit.f);

  json manifest = {{"format_version", 1},
                   {"command", "fit-model2"},
                   {"inputs",
                    {{"households", f.households_path},
                     {"site_predictors", f.sitepred_path}}},
                   {"bis", f.bis},
                   {"config", config_json(f.config)},
                   {"priors",
                    {{"lkj_eta", f.priors.lkj_eta},
                     {"gamma_prior_sd", f.priors.gamma_prior_sd},
                     {"theta_cauchy_scale", f.priors.theta_cauchy_scale},
                     {"sigma_upper", f.priors.sigma_upper}}},
                   {"output_dir", f.config.out_dir}};
  write_manifest(dir, manifest);
  return max_rhat > 1.01 ? 4 : 0;
}

// ---------- simulate ----------

struct ScenarioSpec {
  std::string label;
  double tau_factor = 1.0;
  double sigma_factor = 1.0;
  std::string equalize;  // empty: none
};

// One scenario = whitespace-separated tokens tau*C | sigma*C | equalize=SITE.
// Factors compose multiplicatively; the last equalize wins.
ScenarioSpec parse_scenario(const std::string& spec) {
  ScenarioSpec s;
  s.label = spec;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    while (pos < spec.size() && std::isspace(static_cast<unsigned char>(spec[pos])))
      ++pos;
    if (pos >= spec.size()) break;
    std::size_t end = pos;
    while (end < spec.size() && !std::isspace(static_cast<unsigned char>(spec[end])))
      ++end;
    const std::string tok = spec.substr(pos, end - pos);
    pos = end;
    if (tok.rfind("tau*", 0) == 0) {
      s.tau_factor *= parse_double(tok.substr(4), "scenario '" + spec + "'");
    } else if (tok.rfind("sigma*", 0) == 0) {
      s.sigma_factor *= parse_double(tok.substr(6), "scenario '" + spec + "'");
    } else if (tok.rfind("equalize=", 0) == 0) {
      s.equalize = tok.substr(9);
      if (s.equalize.empty()) fail(2, "scenario '" + spec + "': empty site name");
    } else {
      fail(2, "scenario '" + spec + "': unknown token '" + tok +
                  "' (expected tau*C, sigma*C, or equalize=SITE)");
    }
  }
  if (s.label.empty()) fail(2, "empty scenario spec");
  return s;
}

std::vector<ScenarioSpec> default_scenarios(const std::string& first_site) {
  return {{"baseline", 1.0, 1.0, ""},   {"tau*10", 10.0, 1.0, ""},
          {"tau*0.1", 0.1, 1.0, ""},    {"sigma*10", 1.0, 10.0, ""},
          {"sigma*0.1", 1.0, 0.1, ""},
          {"equalize=" + first_site, 1.0, 1.0, first_site}};
}

struct SimulateFlags {
  std::string sites_path;
  std::vector<std::string> scenario_specs;
  double tau_prior_sd = 0.0;
  double sigma_prior_scale = 0.0;
  ConfigFlags config;
};

int run_simulate(const SimulateFlags& f) {
  const Sites sites = ingest_sites(f.sites_path);
  std::vector<ScenarioSpec> scenarios;
  if (f.scenario_specs.empty()) {
    scenarios = default_scenarios(sites.names.front());
  } else {
    for (const auto& spec : f.scenario_specs) scenarios.push_back(parse_scenario(spec));
  }

  SitesHandle sh = make_sites(sites);
  ConfigHandle ch;
  build_config(f.config, ch);

  const int32_t n = static_cast<int32_t>(scenarios.size());
  std::vector<hiermc_scenario> rows(n);
  for (int32_t i = 0; i < n; ++i)
    rows[i] = {scenarios[i].label.c_str(), scenarios[i].tau_factor,
               scenarios[i].sigma_factor,
               scenarios[i].equalize.empty() ? nullptr : scenarios[i].equalize.c_str()};
  std::vector<double> sigma_tilde(n), omega_bar(n);
  std::vector<int32_t> ok(n);
  check_api(hiermc_sensitivity(sh.s, ch.c, f.tau_prior_sd, f.sigma_prior_scale,
                               rows.data(), n, sigma_tilde.data(), omega_bar.data(),
                               ok.data()),
            "simulate");

  const std::filesystem::path dir(f.config.out_dir);
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "sensitivity.csv");
    out << "scenario,sigma_tilde,omega_bar\n";
    for (int32_t i = 0; i < n; ++i)
      out << scenarios[i].label << "," << num(sigma_tilde[i]) << ","
          << num(omega_bar[i]) << "\n";
  }

  json scenario_list = json::array();
  for (const auto& s : scenarios) scenario_list.push_back(s.label);
  json manifest = {{"format_version", 1},
                   {"command", "simulate"},
                   {"inputs", {{"sites", f.sites_path}}},
                   {"scenarios", scenario_list},
                   {"config", config_json(f.config)},
                   {"priors", pooling_priors_json(f.tau_prior_sd, f.sigma_prior_scale)},
                   {"output_dir", f.config.out_dir}};
  write_manifest(dir, manifest);

  for (int32_t i = 0; i < n; ++i)
    if (!ok[i]) {
      std::fprintf(stderr, "error: scenario '%s' failed to fit\n",
                   scenarios[i].label.c_str());
      return 3;
    }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical Bayesian meta-analysis of multi-site trials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hiermc_version());

  Model1Flags m1;
  CLI::App* fit1 = app.add_subcommand(
      "fit-model1", "Fit the random-effects model to site summaries");
  fit1->add_option("sites", m1.sites_path, "CSV: site,tau_hat,sigma_hat")->required();
  fit1->add_option("--tau-prior-sd", m1.tau_prior_sd,
                   "Prior sd of the pooled effect (default sqrt(5))");
  fit1->add_option("--sigma-prior-scale", m1.sigma_prior_scale,
                   "Half-Cauchy scale of the heterogeneity prior (default 5)");
  add_config_flags(fit1, m1.config);

  Model2Flags m2;
  hiermc_regression_priors_default(&m2.priors);
  CLI::App* fit2 = app.add_subcommand(
      "fit-model2", "Fit the varying-slopes regression to household data");
  fit2->add_option("households", m2.households_path,
                   "CSV: site_index,y,treatment[,y_baseline]")
      ->required();
  fit2->add_option("sitepred", m2.sitepred_path, "CSV: site_index,<predictors...>")
      ->required();
  fit2->add_flag("--bis", m2.bis, "Adjust for the baseline outcome (model 2bis)");
  fit2->add_option("--lkj-eta", m2.priors.lkj_eta, "LKJ concentration");
  fit2->add_option("--gamma-prior-sd", m2.priors.gamma_prior_sd,
                   "Prior sd of site-predictor coefficients");
  fit2->add_option("--theta-cauchy-scale", m2.priors.theta_cauchy_scale,
                   "Half-Cauchy scale of the coefficient sds");
  fit2->add_option("--sigma-upper", m2.priors.sigma_upper,
                   "Upper bound of the noise-sd prior");
  add_config_flags(fit2, m2.config);

  SimulateFlags sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Refit the random-effects model under perturbed inputs");
  simulate->add_option("sites", sim.sites_path, "CSV: site,tau_hat,sigma_hat")
      ->required();
  simulate->add_option("--scenarios", sim.scenario_specs,
                       "Scenario specs (tokens tau*C sigma*C equalize=SITE); "
                       "default: baseline, tau*10, tau*0.1, sigma*10, sigma*0.1, "
                       "equalize=<first site>");
  simulate->add_option("--tau-prior-sd", sim.tau_prior_sd,
                       "Prior sd of the pooled effect (default sqrt(5))");
  simulate->add_option("--sigma-prior-scale", sim.sigma_prior_scale,
                       "Half-Cauchy scale of the heterogeneity prior (default 5)");
  add_config_flags(simulate, sim.config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (fit1->parsed()) return run_fit_model1(m1);
    if (fit2->parsed()) return run_fit_model2(m2);
    return run_simulate(sim);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
