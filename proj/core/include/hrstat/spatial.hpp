#pragma once

#include "hrstat/matrix.hpp"

namespace hrstat {

// U(x) = x/‖x‖, zero vector when ‖x‖ < tol_zero.
Vector spatial_sign(const Vector& x, double tol_zero = 0.0);

struct SpatialMedianResult {
  Vector mu;
  int iterations = 0;
  bool converged = false;
  double mean_sign_norm = 0.0;  // ‖n⁻¹ Σ U(X_i − μ)‖ at exit
};

// Minimizer of Σ_i ‖X_i − μ‖ via the modified Weiszfeld fixed point
// μ ← μ + (Σ U(X_i − μ)) / (Σ ‖X_i − μ‖⁻¹). Rows within tol_zero of the
// iterate contribute zero to both sums; if the iterate lands on a data
// point without being stationary it is nudged off by a fixed coordinate
// perturbation. Stops when ‖n⁻¹ Σ U‖ ≤ tol.
SpatialMedianResult spatial_median(const Matrix& X, double tol = 1e-6,
                                   int max_iter = 200);

// n⁻¹ Σ U(X_i − mu) U(X_i − mu)ᵀ. Centered rows with norm < tol_zero
// contribute a zero outer product; all rows degenerate is an error.
Matrix sign_cov(const Matrix& X, const Vector& mu);

struct ZetaEstimates {
  double zeta1_hat = 0.0;  // n⁻¹ Σ 1/‖omega_sqrt·(X_i − mu)‖
  int n_used = 0;
};

ZetaEstimates zeta1_hat(const Matrix& X, const Vector& mu,
                        const Matrix& omega_sqrt);

struct LocationScale {
  Vector mu;      // μ̃
  Vector d_diag;  // diagonal of D̃, rescaled so the entries sum to p
  int iterations = 0;
  bool converged = false;
};

// Location/scale fixed point with diagonal scatter: whiten by D̃^{-1/2},
// take a sign-based location step, refresh D̃ from the squared signs, then
// rescale D̃ to total p (the iteration is otherwise scale-indeterminate).
LocationScale diagonal_hr(const Matrix& X, double tol = 1e-6,
                          int max_iter = 200);

}  // namespace hrstat
