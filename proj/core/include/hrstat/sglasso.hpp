#pragma once

#include <vector>

#include "hrstat/matrix.hpp"

namespace hrstat {

struct SglassoConfig {
  double theta_tol = 1e-6;   // max elementwise change of Θ per sweep
  double kkt_tol = 1e-5;     // max stationarity residual
  int max_sweeps = 200;
  bool penalize_diagonal = true;
  bool record_objective = false;  // keep per-sweep objective values
};

struct PrecisionEstimate {
  SpdMatrix omega;
  double lambda = 0.0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;  // completed sweeps
  std::vector<double> objective_trace;
};

// Thrown when the solver exhausts max_sweeps; carries the best iterate so
// callers can decide whether it is usable.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& msg, PrecisionEstimate best)
      : Error(msg), best_(std::move(best)) {}
  const PrecisionEstimate& best() const { return best_; }

 private:
  PrecisionEstimate best_;
};

// λ = c1·√(log p / n) + c2/√p.
double lambda_default(Index n, Index p, double c1 = 1.0, double c2 = 0.5);

// Minimizes tr(p·Θ·s_hat) − log|Θ| + λ·pen(Θ) over SPD Θ, where pen is the
// elementwise l1 norm (off-diagonal only when penalize_diagonal is false).
// Block coordinate descent over columns, each column solved by a cyclic
// coordinate-descent lasso; the objective is non-increasing across sweeps.
PrecisionEstimate sglasso(const Matrix& s_hat, Index p, double lambda,
                          const SglassoConfig& config = {});

// K-fold selection of λ from a grid by out-of-fold negative log-likelihood
// tr(p·Ŝ_val·Θ̂) − log|Θ̂|. Folds are assigned round-robin by row index, so
// the result is deterministic. Ties prefer the larger (sparser) λ.
double sglasso_select_lambda(const Matrix& X, const Vector& mu,
                             const std::vector<double>& lambda_grid,
                             int k_folds = 5, const SglassoConfig& config = {});

}  // namespace hrstat
