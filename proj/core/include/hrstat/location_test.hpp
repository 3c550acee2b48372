#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hrstat/hr.hpp"
#include "hrstat/matrix.hpp"
#include "hrstat/spatial.hpp"

namespace hrstat {

enum class Method { MAX, SUM, MAX2, SUM2, CC1, CC2, CC3 };
enum class Calibration { Asymptotic, Bootstrap };

std::string method_name(Method m);
Method parse_method(const std::string& name);
std::string calibration_name(Calibration c);

// Limit law of the max statistic: F(x) = exp(−e^{−x/2}/√π).
struct GumbelParams {
  double mu0;        // mean: −log π + 2γ
  double sigma0_sq;  // variance: 2π²/3
};
GumbelParams gumbel_params();

double gumbel_cdf(double x);
double gumbel_sf(double x);  // 1 − cdf, accurate in the upper tail
double gumbel_quantile(double q);

// T_MAX = n‖Ω̂^{1/2}μ̂‖²_∞ ζ̂₁² p − 2 log p + log log p. Needs p ≥ 3.
double t_max(const Vector& mu_hat, const Matrix& omega_sqrt, double zeta1,
             Index n, Index p);

// T_SUM = (√(2p)/2)(n ζ̂₁² μ̂ᵀΩ̂μ̂ − 1).
double t_sum(const Vector& mu_hat, const Matrix& omega, double zeta1, Index n,
             Index p);

// T_SUM2 = (2/(n(n−1))) Σ_{i<j} U(D̃^{−1/2}X_i)ᵀU(D̃^{−1/2}X_j), D̃ from
// diagonal_hr on the full sample (signs of the uncentered scaled rows).
// The leave-two-out variant re-estimates D̃ without rows i and j; it costs
// O(n²) scale fits and is allowed only for n ≤ 60.
double t_sum2(const Matrix& X);
double t_sum2(const Matrix& X, const LocationScale& ls,
              bool leave_two_out = false, double diag_tol = 1e-6,
              int diag_max_iter = 200);

// T_MAX2 = n ζ̂₁² p ‖D̃^{−1/2}μ̃‖²_∞ (1 − n^{−1/2}).
double t_max2(const Matrix& X, double zeta1);
double t_max2(const LocationScale& ls, double zeta1, Index n);

// Plug-in SD for the normal limit of T_SUM2: the squared trace of the sign
// covariance is estimated by the U-statistic mean of (ŨᵢᵀŨⱼ)² over pairs,
// with Ũ the centered whitened signs.
double sum2_sd_hat(const Matrix& X, const LocationScale& ls);

struct BootstrapMoments {
  double mu_sum = 0.0, sd_sum = 0.0;
  double mu_max = 0.0, sd_max = 0.0;
  bool has_hr = false;
  // Moments of the diagonal-method statistics; the max2 ones refer to the
  // Gumbel-centered form T_MAX2 − 2 log p + log log p.
  double mu_sum2 = 0.0, sd_sum2 = 0.0;
  double mu_max2c = 0.0, sd_max2c = 0.0;
  bool has_diag = false;
  int n_failed = 0;
};

struct BootstrapOptions {
  HrConfig hr;
  bool want_hr = true;
  bool want_diag = false;
  double diag_tol = 1e-6;
  int diag_max_iter = 200;
};

// M replicates of n rows from N(0, Ω̂⁻¹); each runs the same estimation
// pipeline as the real data and contributes its statistics. A replicate
// that throws or fails to converge is retried once on a fresh substream,
// then skipped; fewer than 0.8·M successes is a CalibrationError.
BootstrapMoments bootstrap_calibrate(const SpdMatrix& omega_hat, Index n,
                                     int M, std::uint64_t seed);
BootstrapMoments bootstrap_calibrate(const SpdMatrix& omega_hat, Index n,
                                     int M, std::uint64_t seed,
                                     const BootstrapOptions& options);

// p_SUM = 1 − Φ((T − μ*)/σ*); p_MAX = 1 − F(σ₀(T − μ*)/σ* + μ₀).
double p_value_sum(double t, double boot_mean, double boot_sd);
double p_value_max(double t, double boot_mean, double boot_sd);

// p = 1 − G(Σ w_k tan{(0.5 − p_k)π}), G standard Cauchy. Inputs are clamped
// to [1e-15, 1 − 1e-15]; *clamp_count (if given) receives the number of
// clamped entries. Terms are summed in sorted order so any permutation of
// the (p, w) pairs yields a bit-identical result.
double cauchy_combine(const std::vector<double>& p_values,
                      const std::vector<double>& weights,
                      int* clamp_count = nullptr);

struct TestConfig {
  Calibration calibration = Calibration::Bootstrap;
  int boot_m = 50;
  double alpha = 0.05;
  std::uint64_t seed = 20240501;
  HrConfig hr;
  double diag_tol = 1e-6;
  int diag_max_iter = 200;
  bool sum2_leave_two_out = false;
};

struct TestReport {
  Method method = Method::MAX;
  double statistic = 0.0;
  double p_value = 1.0;
  // Combination rows are tagged asymptotic: the Cauchy map itself is
  // analytic even when the component p-values were bootstrap-calibrated.
  Calibration calibration = Calibration::Asymptotic;
  std::optional<double> boot_mean;
  std::optional<double> boot_sd;
  std::optional<bool> alpha_reject;
  int clamp_warnings = 0;
};

// Shares one estimation pass (and one bootstrap) across all requested
// methods; reports come back in request order.
std::vector<TestReport> multi_test(const Matrix& X,
                                   const std::vector<Method>& methods,
                                   const TestConfig& config);

// Single-method convenience wrapper. M == 0 selects asymptotic calibration.
TestReport one_sample_test(const Matrix& X, Method method, double alpha = 0.05,
                           int M = 50, std::uint64_t seed = 20240501);

}  // namespace hrstat
