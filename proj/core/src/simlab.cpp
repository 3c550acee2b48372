#include "hrstat/simlab.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "hrstat/io.hpp"
#include "hrstat/parallel.hpp"
#include "json.hpp"

namespace hrstat {

DistSpec normal_spec() { return {Family::Normal, 1.0}; }
DistSpec t3_spec() { return {Family::StudentT3, std::sqrt(3.0)}; }
DistSpec mixture_spec(bool compat_scale) {
  return {Family::MixtureNormal, compat_scale ? std::sqrt(22.8) : std::sqrt(20.8)};
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Normal: return "normal";
    case Family::StudentT3: return "t3";
    case Family::MixtureNormal: return "mixture";
  }
  throw ContractViolation("family_name: invalid family");
}

DistSpec make_dist(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "normal") return normal_spec();
  if (s == "t3") return t3_spec();
  if (s == "mixture") return mixture_spec(false);
  if (s == "mixture-compat") return mixture_spec(true);
  throw ContractViolation("unknown distribution: " + name);
}

std::string cov_model_name(CovModelId id) {
  switch (id) {
    case CovModelId::I: return "I";
    case CovModelId::II: return "II";
    case CovModelId::III: return "III";
    case CovModelId::IV: return "IV";
    case CovModelId::QI: return "QI";
    case CovModelId::QII: return "QII";
    case CovModelId::QIII: return "QIII";
  }
  throw ContractViolation("cov_model_name: invalid id");
}

CovModelId parse_cov_model(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (s == "I") return CovModelId::I;
  if (s == "II") return CovModelId::II;
  if (s == "III") return CovModelId::III;
  if (s == "IV") return CovModelId::IV;
  if (s == "QI") return CovModelId::QI;
  if (s == "QII") return CovModelId::QII;
  if (s == "QIII") return CovModelId::QIII;
  throw ContractViolation("unknown covariance model: " + name);
}

namespace {

Matrix ar_matrix(Index p, double rho) {
  Matrix m(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      m(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
    }
  }
  return m;
}

Matrix equicorr_matrix(Index p) {
  Matrix m = Matrix::Constant(p, p, 0.5);
  m.diagonal().setConstant(1.0);
  return m;
}

Matrix banded_omega(Index p) {
  const double off[5] = {2.0, 0.8, 0.4, 0.4, 0.2};
  Matrix m = Matrix::Zero(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index k = 0; k < 5 && i + k < p; ++k) {
      m(i, i + k) = off[k];
      m(i + k, i) = off[k];
    }
  }
  return m;
}

}  // namespace

CovPair make_cov(const CovModel& model) {
  if (model.p < 2) throw ModelError("make_cov: p must be >= 2");
  switch (model.id) {
    case CovModelId::I: {
      SpdMatrix sigma(ar_matrix(model.p, 0.6));
      return {sigma, sigma.powered_spd(-1.0)};
    }
    case CovModelId::II: {
      SpdMatrix sigma(equicorr_matrix(model.p));
      return {sigma, sigma.powered_spd(-1.0)};
    }
    case CovModelId::III: {
      SpdMatrix omega(ar_matrix(model.p, 0.6));
      return {omega.powered_spd(-1.0), omega};
    }
    case CovModelId::IV: {
      if (model.p < 6) throw ModelError("make_cov: model IV needs p >= 6");
      try {
        SpdMatrix omega(banded_omega(model.p));
        return {omega.powered_spd(-1.0), omega};
      } catch (const SingularMatrixError& e) {
        throw ModelError(std::string("make_cov: model IV is not positive definite: ") + e.what());
      }
    }
    default:
      throw ModelError("make_cov: " + cov_model_name(model.id) +
                       " is a two-class model; use qda_model_cov");
  }
}

QdaCov qda_model_cov(CovModelId id, Index p) {
  if (p < 2) throw ModelError("qda_model_cov: p must be >= 2");
  switch (id) {
    case CovModelId::QI: {
      SpdMatrix s1(ar_matrix(p, 0.6));
      SpdMatrix s2 = SpdMatrix::from_diagonal(Vector::Ones(p));
      return {{s1, s1.powered_spd(-1.0)}, {s2, s2}};
    }
    case CovModelId::QII: {
      SpdMatrix s1(ar_matrix(p, 0.6));
      SpdMatrix s2(equicorr_matrix(p));
      return {{s1, s1.powered_spd(-1.0)}, {s2, s2.powered_spd(-1.0)}};
    }
    case CovModelId::QIII: {
      SpdMatrix omega1(ar_matrix(p, 0.6));
      SpdMatrix sigma1 = omega1.powered_spd(-1.0);
      // Σ₂ = Ω₁, so the pairs swap roles.
      return {{sigma1, omega1}, {omega1, sigma1}};
    }
    default:
      throw ModelError("qda_model_cov: " + cov_model_name(id) +
                       " is a one-class model; use make_cov");
  }
}

Matrix gen_elliptical_sqrt(const DistSpec& spec, const Vector& mu,
                           const Matrix& sigma_sqrt, Index n, Rng& rng) {
  if (n < 1) throw ContractViolation("gen_elliptical: need n >= 1");
  const Index p = sigma_sqrt.rows();
  if (sigma_sqrt.cols() != p || mu.size() != p) {
    throw DimensionError("gen_elliptical: dimension mismatch");
  }
  if (!(spec.scale_norm > 0)) {
    throw ContractViolation("gen_elliptical: scale_norm must be positive");
  }
  Matrix X(n, p);
  Vector z(p);
  for (Index i = 0; i < n; ++i) {
    double factor = 1.0;
    switch (spec.family) {
      case Family::Normal:
        break;
      case Family::StudentT3:
        factor = 1.0 / std::sqrt(rng.chisq(3) / 3.0);
        break;
      case Family::MixtureNormal:
        factor = rng.uniform() < 0.8 ? 1.0 : 10.0;
        break;
    }
    for (Index j = 0; j < p; ++j) z[j] = rng.normal();
    X.row(i) = (mu + (factor / spec.scale_norm) * (sigma_sqrt * z)).transpose();
  }
  return X;
}

Matrix gen_elliptical(const DistSpec& spec, const Vector& mu,
                      const SpdMatrix& sigma, Index n, std::uint64_t seed) {
  Rng rng(seed);
  return gen_elliptical_sqrt(spec, mu, sigma.sqrt(), n, rng);
}

Vector alt_mean(double kappa, Index s, Index n, Index p,
                const Matrix& sigma_sqrt) {
  if (p < 2) throw ContractViolation("alt_mean: need p >= 2");
  if (s < 1 || s > p) throw ContractViolation("alt_mean: s out of range");
  if (kappa < 0) throw ContractViolation("alt_mean: kappa must be nonnegative");
  if (n < 1) throw ContractViolation("alt_mean: need n >= 1");
  if (sigma_sqrt.rows() != p || sigma_sqrt.cols() != p) {
    throw DimensionError("alt_mean: sigma_sqrt dimension mismatch");
  }
  Vector ind = Vector::Zero(p);
  ind.head(s).setOnes();
  const double scale =
      kappa * std::sqrt(std::log(static_cast<double>(p)) /
                        (static_cast<double>(n) * static_cast<double>(s)));
  return scale * (sigma_sqrt * ind);
}

std::vector<Method> default_methods() {
  return {Method::MAX,  Method::SUM, Method::MAX2, Method::SUM2,
          Method::CC1, Method::CC2, Method::CC3};
}

namespace {

std::string join_methods(const std::vector<Method>& methods) {
  std::string out;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i) out.push_back(',');
    out += method_name(methods[i]);
  }
  return out;
}

std::uint64_t rep_seed(std::uint64_t master, std::uint64_t purpose,
                       std::uint64_t r, std::uint64_t attempt) {
  return derive_seed(derive_seed(master, purpose, r), 0x72747279ULL, attempt);
}

void echo_test_config(SimReport& rep, const TestConfig& tc) {
  rep.config.emplace_back("calibration", calibration_name(tc.calibration));
  if (tc.calibration == Calibration::Bootstrap) {
    rep.config.emplace_back("boot_m", std::to_string(tc.boot_m));
  }
  rep.config.emplace_back("bandwidth", std::to_string(tc.hr.bandwidth));
  if (tc.hr.lambda >= 0) {
    rep.config.emplace_back("lambda", format_double(tc.hr.lambda));
  } else {
    rep.config.emplace_back("lambda_c1", format_double(tc.hr.lambda_c1));
    rep.config.emplace_back("lambda_c2", format_double(tc.hr.lambda_c2));
  }
  rep.config.emplace_back("tol", format_double(tc.hr.tol));
}

double binomial_se(double rate, int n) {
  return n > 0 ? std::sqrt(rate * (1.0 - rate) / static_cast<double>(n)) : 0.0;
}

}  // namespace

SimReport size_experiment(const SizeExperimentConfig& cfg) {
  if (cfg.n_reps < 100) {
    throw ContractViolation("size_experiment: need n_reps >= 100");
  }
  if (cfg.methods.empty()) {
    throw ContractViolation("size_experiment: no methods requested");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) {
    throw ContractViolation("size_experiment: alpha must be in (0, 1]");
  }
  const CovPair cov = make_cov(cfg.cov_model);
  const Matrix sqrtS = cov.sigma.sqrt();
  const Index p = cfg.cov_model.p;
  const Vector mu0 = Vector::Zero(p);
  const std::size_t R = static_cast<std::size_t>(cfg.n_reps);
  const std::size_t M = cfg.methods.size();

  std::vector<char> ok(R, 0);
  std::vector<std::vector<char>> rejects(R);
  parallel_for(R, cfg.threads, [&](std::size_t r) {
    for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
      try {
        const std::uint64_t data_seed = rep_seed(cfg.seed, 0, r, attempt);
        Rng rng(data_seed);
        Matrix X = gen_elliptical_sqrt(cfg.dist, mu0, sqrtS, cfg.n, rng);
        TestConfig tc = cfg.test;
        tc.alpha = cfg.alpha;
        tc.seed = derive_seed(data_seed, 0x62ULL, 0);
        auto reports = multi_test(X, cfg.methods, tc);
        std::vector<char> rej(M);
        for (std::size_t m = 0; m < M; ++m) rej[m] = *reports[m].alpha_reject;
        rejects[r] = std::move(rej);
        ok[r] = 1;
        return;
      } catch (const ContractViolation&) {
        throw;
      } catch (const Error&) {
        // estimation failure: one redraw, then exclusion
      }
    }
  });

  int n_used = 0;
  for (std::size_t r = 0; r < R; ++r) n_used += ok[r];
  const int n_failed = cfg.n_reps - n_used;
  const bool valid = n_failed <= static_cast<int>(0.05 * static_cast<double>(cfg.n_reps));

  SimReport rep;
  rep.config.emplace_back("experiment", "size");
  rep.config.emplace_back("model", cov_model_name(cfg.cov_model.id));
  rep.config.emplace_back("dist", family_name(cfg.dist.family));
  rep.config.emplace_back("scale_norm", format_double(cfg.dist.scale_norm));
  rep.config.emplace_back("n", std::to_string(cfg.n));
  rep.config.emplace_back("p", std::to_string(p));
  rep.config.emplace_back("alpha", format_double(cfg.alpha));
  rep.config.emplace_back("reps", std::to_string(cfg.n_reps));
  rep.config.emplace_back("methods", join_methods(cfg.methods));
  echo_test_config(rep, cfg.test);
  rep.config.emplace_back("seed", std::to_string(cfg.seed));

  for (std::size_t m = 0; m < M; ++m) {
    int count = 0;
    for (std::size_t r = 0; r < R; ++r) {
      if (ok[r] && rejects[r][m]) ++count;
    }
    SimCell cell;
    cell.model = cov_model_name(cfg.cov_model.id);
    cell.dist = family_name(cfg.dist.family);
    cell.n = cfg.n;
    cell.p = p;
    cell.method = method_name(cfg.methods[m]);
    cell.rate = n_used > 0 ? static_cast<double>(count) / n_used : 0.0;
    cell.mc_se = binomial_se(cell.rate, n_used);
    cell.n_reps = n_used;
    cell.n_failed = n_failed;
    cell.valid = valid && n_used > 0;
    rep.cells.push_back(std::move(cell));
  }
  return rep;
}

namespace {

// One statistic per requested method; the replicate fails when estimation
// throws (after one redraw) so the caller can exclude it.
struct StatRep {
  std::vector<double> stats;
  bool ok = false;
};

StatRep power_replicate(const PowerExperimentConfig& cfg, const Matrix& sqrtS,
                        const Vector& mu, std::uint64_t purpose,
                        std::size_t r) {
  StatRep out;
  for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
    try {
      const std::uint64_t data_seed = rep_seed(cfg.seed, purpose, r, attempt);
      Rng rng(data_seed);
      Matrix X = gen_elliptical_sqrt(cfg.dist, mu, sqrtS, cfg.n, rng);
      TestConfig tc = cfg.test;
      tc.alpha = cfg.alpha;
      tc.seed = derive_seed(data_seed, 0x62ULL, 0);
      auto reports = multi_test(X, cfg.methods, tc);
      out.stats.resize(reports.size());
      for (std::size_t m = 0; m < reports.size(); ++m) {
        out.stats[m] = reports[m].statistic;
      }
      out.ok = true;
      return out;
    } catch (const ContractViolation&) {
      throw;
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace

SimReport power_experiment(const PowerExperimentConfig& cfg) {
  if (cfg.n_null < 500) {
    throw ContractViolation("power_experiment: need n_null >= 500");
  }
  if (cfg.n_reps < 1) {
    throw ContractViolation("power_experiment: need n_reps >= 1");
  }
  if (cfg.methods.empty()) {
    throw ContractViolation("power_experiment: no methods requested");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw ContractViolation("power_experiment: alpha must be in (0, 1)");
  }
  if (cfg.s_grid.empty()) {
    throw ContractViolation("power_experiment: empty s grid");
  }
  if (cfg.kappa < 0) {
    throw ContractViolation("power_experiment: kappa must be nonnegative");
  }
  const CovPair cov = make_cov(cfg.cov_model);
  const Matrix sqrtS = cov.sigma.sqrt();
  const Index p = cfg.cov_model.p;
  for (Index s : cfg.s_grid) {
    if (s < 1 || s > p) throw ContractViolation("power_experiment: s out of range");
  }
  const std::size_t M = cfg.methods.size();

  // Null pass: empirical critical values per method.
  const std::size_t R0 = static_cast<std::size_t>(cfg.n_null);
  std::vector<StatRep> null_reps(R0);
  const Vector mu0 = Vector::Zero(p);
  parallel_for(R0, cfg.threads, [&](std::size_t r) {
    null_reps[r] = power_replicate(cfg, sqrtS, mu0, 0, r);
  });
  std::vector<std::vector<double>> null_stats(M);
  for (const StatRep& sr : null_reps) {
    if (!sr.ok) continue;
    for (std::size_t m = 0; m < M; ++m) null_stats[m].push_back(sr.stats[m]);
  }
  const int n_null_used = static_cast<int>(null_stats.empty() ? 0 : null_stats[0].size());
  const int n_null_failed = cfg.n_null - n_null_used;
  if (n_null_used < 1) {
    throw CalibrationError("power_experiment: every null replicate failed");
  }
  const bool null_valid =
      n_null_failed <= static_cast<int>(0.05 * static_cast<double>(cfg.n_null));
  std::vector<double> critical(M);
  {
    long k = static_cast<long>(std::floor((1.0 - cfg.alpha) * n_null_used));
    k = std::max(1L, std::min<long>(k, n_null_used));
    for (std::size_t m = 0; m < M; ++m) {
      std::sort(null_stats[m].begin(), null_stats[m].end());
      critical[m] = null_stats[m][static_cast<std::size_t>(k - 1)];
    }
  }

  SimReport rep;
  rep.config.emplace_back("experiment", "power");
  rep.config.emplace_back("model", cov_model_name(cfg.cov_model.id));
  rep.config.emplace_back("dist", family_name(cfg.dist.family));
  rep.config.emplace_back("scale_norm", format_double(cfg.dist.scale_norm));
  rep.config.emplace_back("n", std::to_string(cfg.n));
  rep.config.emplace_back("p", std::to_string(p));
  rep.config.emplace_back("alpha", format_double(cfg.alpha));
  rep.config.emplace_back("kappa", format_double(cfg.kappa));
  {
    std::string sg;
    for (std::size_t i = 0; i < cfg.s_grid.size(); ++i) {
      if (i) sg.push_back(',');
      sg += std::to_string(cfg.s_grid[i]);
    }
    rep.config.emplace_back("s_grid", sg);
  }
  rep.config.emplace_back("reps", std::to_string(cfg.n_reps));
  rep.config.emplace_back("n_null", std::to_string(cfg.n_null));
  rep.config.emplace_back("methods", join_methods(cfg.methods));
  echo_test_config(rep, cfg.test);
  rep.config.emplace_back("seed", std::to_string(cfg.seed));
  rep.info.emplace_back("n_null_used", std::to_string(n_null_used));
  rep.info.emplace_back("n_null_failed", std::to_string(n_null_failed));

  // Alternative passes, one per sparsity level.
  const std::size_t R = static_cast<std::size_t>(cfg.n_reps);
  for (std::size_t si = 0; si < cfg.s_grid.size(); ++si) {
    const Index s = cfg.s_grid[si];
    const Vector mu = alt_mean(cfg.kappa, s, cfg.n, p, sqrtS);
    std::vector<StatRep> alt_reps(R);
    parallel_for(R, cfg.threads, [&](std::size_t r) {
      alt_reps[r] = power_replicate(cfg, sqrtS, mu, 1 + si, r);
    });
    int n_used = 0;
    for (const StatRep& sr : alt_reps) n_used += sr.ok ? 1 : 0;
    const int n_failed = cfg.n_reps - n_used;
    const bool alt_valid =
        n_failed <= static_cast<int>(0.05 * static_cast<double>(cfg.n_reps));
    for (std::size_t m = 0; m < M; ++m) {
      int count = 0;
      for (const StatRep& sr : alt_reps) {
        if (sr.ok && sr.stats[m] > critical[m]) ++count;
      }
      SimCell cell;
      cell.model = cov_model_name(cfg.cov_model.id);
      cell.dist = family_name(cfg.dist.family);
      cell.n = cfg.n;
      cell.p = p;
      cell.method = method_name(cfg.methods[m]);
      cell.rate = n_used > 0 ? static_cast<double>(count) / n_used : 0.0;
      cell.mc_se = binomial_se(cell.rate, n_used);
      cell.n_reps = n_used;
      cell.n_failed = n_failed;
      cell.s = s;
      cell.kappa = cfg.kappa;
      cell.valid = null_valid && alt_valid && n_used > 0;
      rep.cells.push_back(std::move(cell));
    }
  }
  return rep;
}

SimReport qda_experiment(const QdaExperimentConfig& cfg) {
  if (cfg.n_reps < 1) {
    throw ContractViolation("qda_experiment: need n_reps >= 1");
  }
  if (cfg.n1 < 3 || cfg.n2 < 3) {
    throw ContractViolation("qda_experiment: need n >= 3 per class");
  }
  const QdaCov qc = qda_model_cov(cfg.model, cfg.p);
  const Matrix sqrt1 = qc.class1.sigma.sqrt();
  const Matrix sqrt2 = qc.class2.sigma.sqrt();
  const Vector mu1 = cfg.mu1.size() ? cfg.mu1 : Vector(Vector::Zero(cfg.p));
  const Vector mu2 =
      cfg.mu2.size() ? cfg.mu2 : Vector(Vector::Constant(cfg.p, 0.1));
  if (mu1.size() != cfg.p || mu2.size() != cfg.p) {
    throw DimensionError("qda_experiment: mean dimension mismatch");
  }

  const std::size_t R = static_cast<std::size_t>(cfg.n_reps);
  std::vector<double> acc(R, 0.0);
  std::vector<char> ok(R, 0);
  parallel_for(R, cfg.threads, [&](std::size_t r) {
    for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
      try {
        // Draw order: train class 1, train class 2, test class 1, test
        // class 2, all from one replicate stream.
        Rng rng(rep_seed(cfg.seed, 0, r, attempt));
        Matrix tr1 = gen_elliptical_sqrt(cfg.dist, mu1, sqrt1, cfg.n1, rng);
        Matrix tr2 = gen_elliptical_sqrt(cfg.dist, mu2, sqrt2, cfg.n2, rng);
        Matrix te1 = gen_elliptical_sqrt(cfg.dist, mu1, sqrt1, cfg.n1, rng);
        Matrix te2 = gen_elliptical_sqrt(cfg.dist, mu2, sqrt2, cfg.n2, rng);
        QdaModel model = hrqda_train(tr1, tr2, cfg.qda);
        int right1 = 0, right2 = 0;
        for (Index i = 0; i < te1.rows(); ++i) {
          right1 += classify_label(model, te1.row(i).transpose()) == 1;
        }
        for (Index i = 0; i < te2.rows(); ++i) {
          right2 += classify_label(model, te2.row(i).transpose()) == 2;
        }
        acc[r] = 0.5 * (static_cast<double>(right1) / te1.rows() +
                        static_cast<double>(right2) / te2.rows());
        ok[r] = 1;
        return;
      } catch (const ContractViolation&) {
        throw;
      } catch (const Error&) {
      }
    }
  });

  int n_used = 0;
  double sum = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    if (ok[r]) {
      ++n_used;
      sum += acc[r];
    }
  }
  const int n_failed = cfg.n_reps - n_used;
  const double mean = n_used > 0 ? sum / n_used : 0.0;
  double sd = 0.0;
  if (n_used > 1) {
    double ss = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      if (ok[r]) ss += (acc[r] - mean) * (acc[r] - mean);
    }
    sd = std::sqrt(ss / (n_used - 1));
  }

  SimReport rep;
  rep.config.emplace_back("experiment", "qda");
  rep.config.emplace_back("model", cov_model_name(cfg.model));
  rep.config.emplace_back("dist", family_name(cfg.dist.family));
  rep.config.emplace_back("scale_norm", format_double(cfg.dist.scale_norm));
  rep.config.emplace_back("n1", std::to_string(cfg.n1));
  rep.config.emplace_back("n2", std::to_string(cfg.n2));
  rep.config.emplace_back("p", std::to_string(cfg.p));
  rep.config.emplace_back("reps", std::to_string(cfg.n_reps));
  rep.config.emplace_back("cv_folds", std::to_string(cfg.qda.cv_folds));
  rep.config.emplace_back("bandwidth", std::to_string(cfg.qda.hr.bandwidth));
  if (cfg.qda.hr.lambda >= 0) {
    rep.config.emplace_back("lambda", format_double(cfg.qda.hr.lambda));
  } else {
    rep.config.emplace_back("lambda_c1", format_double(cfg.qda.hr.lambda_c1));
    rep.config.emplace_back("lambda_c2", format_double(cfg.qda.hr.lambda_c2));
  }
  rep.config.emplace_back("seed", std::to_string(cfg.seed));

  SimCell cell;
  cell.model = cov_model_name(cfg.model);
  cell.dist = family_name(cfg.dist.family);
  cell.n = cfg.n1;
  cell.p = cfg.p;
  cell.method = "hrqda";
  cell.rate = mean;
  cell.mc_se = n_used > 0 ? sd / std::sqrt(static_cast<double>(n_used)) : 0.0;
  cell.n_reps = n_used;
  cell.n_failed = n_failed;
  cell.valid = n_used > 0 &&
               n_failed <= static_cast<int>(0.05 * static_cast<double>(cfg.n_reps));
  rep.cells.push_back(std::move(cell));
  return rep;
}

std::string report_to_csv(const SimReport& report) {
  std::string out;
  for (const auto& [k, v] : report.config) {
    out += "# " + k + " = " + v + "\n";
  }
  for (const auto& [k, v] : report.info) {
    out += "# " + k + " = " + v + "\n";
  }
  bool power = false;
  for (const SimCell& c : report.cells) power = power || c.s.has_value();
  out += power ? "model,dist,n,p,s,kappa,method,rate,mc_se,n_reps,n_failed\n"
               : "model,dist,n,p,method,rate,mc_se,n_reps,n_failed\n";
  for (const SimCell& c : report.cells) {
    out += c.model + "," + c.dist + "," + std::to_string(c.n) + "," +
           std::to_string(c.p) + ",";
    if (power) {
      out += (c.s ? std::to_string(*c.s) : "") + ",";
      out += (c.kappa ? format_double(*c.kappa) : "") + ",";
    }
    out += c.method + "," + format_double(c.rate) + "," +
           format_double(c.mc_se) + "," + std::to_string(c.n_reps) + "," +
           std::to_string(c.n_failed) + "\n";
  }
  return out;
}

std::string report_to_json(const SimReport& report) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.config) cfg[k] = v;
  j["config"] = std::move(cfg);
  nlohmann::ordered_json info = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.info) info[k] = v;
  j["info"] = std::move(info);
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const SimCell& c : report.cells) {
    nlohmann::ordered_json jc;
    jc["model"] = c.model;
    jc["dist"] = c.dist;
    jc["n"] = c.n;
    jc["p"] = c.p;
    if (c.s) jc["s"] = *c.s;
    if (c.kappa) jc["kappa"] = *c.kappa;
    jc["method"] = c.method;
    jc["rate"] = c.rate;
    jc["mc_se"] = c.mc_se;
    jc["n_reps"] = c.n_reps;
    jc["n_failed"] = c.n_failed;
    jc["valid"] = c.valid;
    cells.push_back(std::move(jc));
  }
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

}  // namespace hrstat
