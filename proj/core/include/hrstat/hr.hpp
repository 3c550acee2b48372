#pragma once

#include <vector>

#include "hrstat/matrix.hpp"
#include "hrstat/sglasso.hpp"

namespace hrstat {

struct HrConfig {
  int bandwidth = 3;
  double tol = 1e-4;
  int max_iter = 100;
  double lambda = -1.0;  // < 0 means lambda_default(n, p, lambda_c1, lambda_c2)
  double lambda_c1 = 1.0;
  double lambda_c2 = 0.5;
  double eps_pd = -1.0;  // < 0 means the relative default
  double median_tol = 1e-6;
  int median_max_iter = 200;
  SglassoConfig sglasso;
};

struct HrDiagnostics {
  std::vector<double> mean_sign_norms;  // ‖n⁻¹ Σ U(ε̂)‖ per iteration
  int psd_projections = 0;              // banded sign-cov repairs
  double final_rel_dmu = 0.0;
  double final_rel_dsigma = 0.0;
  double sglasso_kkt = 0.0;
  int sglasso_sweeps = 0;
};

struct HrEstimate {
  Vector mu;
  SpdMatrix sigma;       // trace p
  SpdMatrix omega;       // sigma⁻¹
  SpdMatrix omega_sqrt;  // sigma^{-1/2}
  int iterations = 0;
  bool converged = false;
  int bandwidth = 0;
  HrDiagnostics diag;
};

// Low-dimensional alternating location/scatter fixed point (full sign
// covariance, no banding). Requires n > p. The scatter is renormalized to
// trace p each iteration so results are comparable with hr_estimate.
HrEstimate hr_classic(const Matrix& X, double tol = 1e-4, int max_iter = 100);

// High-dimensional variant: spatial-median / sglasso-inverse start, banded
// sign covariance with SPD repair, trace-p renormalization per iteration.
HrEstimate hr_estimate(const Matrix& X, const HrConfig& config = {});

// ‖Ω̂^{1/2}(X_i − μ̂)‖ per row.
Vector whitened_radii(const Matrix& X, const HrEstimate& est);

}  // namespace hrstat
