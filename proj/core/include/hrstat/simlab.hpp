#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hrstat/location_test.hpp"
#include "hrstat/matrix.hpp"
#include "hrstat/qda.hpp"
#include "hrstat/rng.hpp"

namespace hrstat {

enum class Family { Normal, StudentT3, MixtureNormal };

// scale_norm divides the stochastic part of every draw; the location is
// never scaled. The t3 convention is √3; the mixture default is √20.8
// (the variance of 0.8·N(0,Σ) + 0.2·N(0,100Σ)), with √22.8 available for
// compatibility with sources that use that constant.
struct DistSpec {
  Family family = Family::Normal;
  double scale_norm = 1.0;
};

DistSpec normal_spec();
DistSpec t3_spec();
DistSpec mixture_spec(bool compat_scale = false);

std::string family_name(Family f);
// Accepts "normal", "t3", "mixture", "mixture-compat".
DistSpec make_dist(const std::string& name);

enum class CovModelId { I, II, III, IV, QI, QII, QIII };

std::string cov_model_name(CovModelId id);
CovModelId parse_cov_model(const std::string& name);

struct CovModel {
  CovModelId id = CovModelId::I;
  Index p = 2;
};

struct CovPair {
  SpdMatrix sigma;
  SpdMatrix omega;
};

// Single-population scatter models:
//   I   Σ = (0.6^{|i−j|})
//   II  Σ = 0.5·I + 0.5·11ᵀ
//   III Ω = (0.6^{|i−j|}), Σ = Ω⁻¹
//   IV  Ω banded: diag 2, offsets 1..4 → 0.8, 0.4, 0.4, 0.2 (needs p ≥ 6)
// The two-class QDA models are built by qda_model_cov.
CovPair make_cov(const CovModel& model);

struct QdaCov {
  CovPair class1;
  CovPair class2;
};

// Two-class scatter models:
//   QI   Σ₁ = (0.6^{|i−j|}),      Σ₂ = I
//   QII  Σ₁ = (0.6^{|i−j|}),      Σ₂ = 0.5·I + 0.5·11ᵀ
//   QIII Ω₁ = (0.6^{|i−j|}), Σ₁ = Ω₁⁻¹, Σ₂ = Ω₁
QdaCov qda_model_cov(CovModelId id, Index p);

// One elliptical sample: X = μ + stochastic/scale_norm, with the stochastic
// part Σ^{1/2}Z (Normal), Σ^{1/2}Z/√(W/3) with W ~ χ²₃ (StudentT3), or
// κ_row·Σ^{1/2}Z with κ_row ∈ {1, 10} w.p. 0.8/0.2 (MixtureNormal).
// Per-row draw order: t3 draws W before Z; the mixture draws its uniform
// before Z; rows are generated top to bottom.
Matrix gen_elliptical(const DistSpec& spec, const Vector& mu,
                      const SpdMatrix& sigma, Index n, std::uint64_t seed);
Matrix gen_elliptical_sqrt(const DistSpec& spec, const Vector& mu,
                           const Matrix& sigma_sqrt, Index n, Rng& rng);

// μ = κ·√(log p/(n·s))·Σ^{1/2}·(1_s, 0_{p−s})ᵀ.
Vector alt_mean(double kappa, Index s, Index n, Index p,
                const Matrix& sigma_sqrt);

struct SimCell {
  std::string model;
  std::string dist;
  Index n = 0;
  Index p = 0;
  std::string method;
  double rate = 0.0;  // rejection rate, power, or mean accuracy
  double mc_se = 0.0;
  int n_reps = 0;    // replicates the cell is based on
  int n_failed = 0;  // replicates excluded after one retry
  std::optional<Index> s;      // power cells
  std::optional<double> kappa;  // power cells
  bool valid = true;  // false when exclusions exceed 5% of the request
};

struct SimReport {
  std::vector<std::pair<std::string, std::string>> config;  // resolved echo
  std::vector<std::pair<std::string, std::string>> info;    // run statistics
  std::vector<SimCell> cells;
};

// CSV: "# key = value" prologue (config then info), then a header row and
// one line per cell. Power reports add s and kappa columns before method.
std::string report_to_csv(const SimReport& report);
std::string report_to_json(const SimReport& report);

std::vector<Method> default_methods();  // all seven tests

struct SizeExperimentConfig {
  DistSpec dist;
  CovModel cov_model;
  Index n = 100;
  double alpha = 0.05;
  int n_reps = 1000;
  std::vector<Method> methods = default_methods();
  std::uint64_t seed = 20240501;
  int threads = 0;  // 0: resolve via HRSTAT_THREADS, else 1
  TestConfig test;  // calibration, boot_m, estimator knobs
};

// Null rejection rate per method with binomial MC standard errors.
SimReport size_experiment(const SizeExperimentConfig& config);

inline TestConfig asymptotic_test_config() {
  TestConfig t;
  t.calibration = Calibration::Asymptotic;
  return t;
}

struct PowerExperimentConfig {
  DistSpec dist;
  CovModel cov_model;
  Index n = 100;
  double alpha = 0.05;
  double kappa = 1.5;
  std::vector<Index> s_grid = {1};
  int n_reps = 300;    // alternative replicates per s
  int n_null = 2000;   // null replicates for the empirical critical values
  std::vector<Method> methods = default_methods();
  std::uint64_t seed = 20240501;
  int threads = 0;
  // Size-corrected power compares statistics against empirical null
  // quantiles, so the default skips bootstrap calibration entirely.
  TestConfig test = asymptotic_test_config();
};

// Size-corrected power: per method, the critical value is the
// floor((1−α)·n_null)-th smallest null statistic; power is the fraction of
// alternative statistics strictly above it.
SimReport power_experiment(const PowerExperimentConfig& config);

struct QdaExperimentConfig {
  DistSpec dist;
  CovModelId model = CovModelId::QI;
  Index p = 120;
  Index n1 = 100;
  Index n2 = 100;
  Vector mu1;  // empty → 0
  Vector mu2;  // empty → 0.1·1
  int n_reps = 50;
  std::uint64_t seed = 20240501;
  int threads = 0;
  QdaConfig qda;
};

// Train/test replications; the cell rate is the mean test accuracy
// (unweighted average of the class accuracies) and mc_se its standard
// error across replicates.
SimReport qda_experiment(const QdaExperimentConfig& config);

}  // namespace hrstat
