#include "hrstat/sglasso.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "hrstat/spatial.hpp"

namespace hrstat {

double lambda_default(Index n, Index p, double c1, double c2) {
  if (n < 2 || p < 2) throw ContractViolation("lambda_default: need n >= 2, p >= 2");
  if (c1 < 0 || c2 < 0) throw ContractViolation("lambda_default: c1, c2 must be >= 0");
  return c1 * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n)) +
         c2 / std::sqrt(static_cast<double>(p));
}

namespace {

double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

// Copies m with row/column j removed into out ((p-1)×(p-1)).
void drop_row_col(const Matrix& m, Index j, Matrix& out) {
  const Index p = m.rows();
  out.topLeftCorner(j, j) = m.topLeftCorner(j, j);
  out.topRightCorner(j, p - j - 1) = m.topRightCorner(j, p - j - 1);
  out.bottomLeftCorner(p - j - 1, j) = m.bottomLeftCorner(p - j - 1, j);
  out.bottomRightCorner(p - j - 1, p - j - 1) = m.bottomRightCorner(p - j - 1, p - j - 1);
}

void drop_entry(const Matrix& m, Index col, Index skip, Vector& out) {
  const Index p = m.rows();
  out.head(skip) = m.col(col).head(skip);
  out.tail(p - skip - 1) = m.col(col).tail(p - skip - 1);
}

struct Workspace {
  Matrix S;      // p·s_hat
  Matrix theta;  // current iterate
  Matrix W;      // inverse of theta, maintained incrementally
  double lambda = 0.0;
  double dpen = 0.0;  // diagonal penalty (lambda or 0)
};

double objective(const Workspace& ws, bool penalize_diagonal) {
  const Matrix& theta = ws.theta;
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("sglasso: iterate lost positive definiteness");
  }
  double logdet = 0.0;
  for (Index i = 0; i < theta.rows(); ++i) logdet += std::log(llt.matrixL()(i, i));
  logdet *= 2.0;
  double pen = theta.cwiseAbs().sum();
  if (!penalize_diagonal) pen -= theta.diagonal().cwiseAbs().sum();
  return (ws.S.array() * theta.array()).sum() - logdet + ws.lambda * pen;
}

void refresh_inverse(Workspace& ws) {
  Eigen::LLT<Matrix> llt(ws.theta);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("sglasso: iterate lost positive definiteness");
  }
  ws.W = llt.solve(Matrix::Identity(ws.theta.rows(), ws.theta.cols()));
  ws.W = 0.5 * (ws.W + ws.W.transpose());
}

double kkt_residual(const Workspace& ws) {
  const Index p = ws.theta.rows();
  double worst = 0.0;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double grad = ws.S(i, j) - ws.W(i, j);
      double res;
      if (i == j) {
        res = ws.dpen > 0.0 ? std::abs(grad + ws.lambda) : std::abs(grad);
      } else if (ws.theta(i, j) != 0.0) {
        res = std::abs(grad + ws.lambda * (ws.theta(i, j) > 0 ? 1.0 : -1.0));
      } else {
        res = std::max(0.0, std::abs(grad) - ws.lambda);
      }
      worst = std::max(worst, res);
    }
  }
  return worst;
}

}  // namespace

PrecisionEstimate sglasso(const Matrix& s_hat, Index p, double lambda,
                          const SglassoConfig& config) {
  if (s_hat.rows() != p || s_hat.cols() != p) {
    throw DimensionError("sglasso: p does not match s_hat");
  }
  require_symmetric(s_hat, "sglasso");
  if (lambda < 0) throw ContractViolation("sglasso: lambda must be >= 0");
  if (p < 1) throw ContractViolation("sglasso: empty input");

  Workspace ws;
  ws.S = static_cast<double>(p) * s_hat;
  ws.lambda = lambda;
  ws.dpen = config.penalize_diagonal ? lambda : 0.0;

  ws.theta = Matrix::Zero(p, p);
  ws.W = Matrix::Zero(p, p);
  for (Index j = 0; j < p; ++j) {
    const double c = ws.S(j, j) + ws.dpen;
    if (c <= 0.0) {
      throw SingularMatrixError("sglasso: nonpositive penalized diagonal at " +
                                std::to_string(j + 1));
    }
    ws.theta(j, j) = 1.0 / c;
    ws.W(j, j) = c;
  }

  PrecisionEstimate result;
  result.lambda = lambda;
  if (config.record_objective) {
    result.objective_trace.push_back(objective(ws, config.penalize_diagonal));
  }

  const double inner_tol = 0.1 * config.theta_tol;
  const Index m = p - 1;
  Matrix Q(m, m);
  Vector s12(m), alpha(m), r(m), w12(m);

  double best_kkt = std::numeric_limits<double>::infinity();
  Matrix best_theta = ws.theta;
  bool converged = false;
  int sweeps = 0;

  while (sweeps < config.max_sweeps && !converged) {
    double max_change = 0.0;
    for (Index j = 0; j < p && p > 1; ++j) {
      const double c = ws.S(j, j) + ws.dpen;
      drop_entry(ws.S, j, j, s12);
      drop_entry(ws.theta, j, j, alpha);
      drop_entry(ws.W, j, j, w12);
      const double w22 = ws.W(j, j);
      const bool alpha_zero = (alpha.array() == 0.0).all();

      if (alpha_zero && s12.cwiseAbs().maxCoeff() <= lambda) {
        // Column stays zero; only the diagonal and the inverse need fixing.
        const double theta_jj = 1.0 / c;
        max_change = std::max(max_change, std::abs(theta_jj - ws.theta(j, j)));
        ws.theta(j, j) = theta_jj;
        if ((w12.array() != 0.0).any()) {
          drop_row_col(ws.W, j, Q);
          Q.noalias() -= (w12 / w22) * w12.transpose();
          ws.W.topLeftCorner(j, j) = Q.topLeftCorner(j, j);
          ws.W.topRightCorner(j, p - j - 1) = Q.topRightCorner(j, m - j);
          ws.W.bottomLeftCorner(p - j - 1, j) = Q.bottomLeftCorner(m - j, j);
          ws.W.bottomRightCorner(p - j - 1, p - j - 1) = Q.bottomRightCorner(m - j, m - j);
          ws.W.row(j).setZero();
          ws.W.col(j).setZero();
        }
        ws.W(j, j) = c;
        continue;
      }

      // Q = inverse of theta with row/col j removed, from the maintained W.
      drop_row_col(ws.W, j, Q);
      Q.noalias() -= (w12 / w22) * w12.transpose();
      r.noalias() = Q * alpha;

      // Cyclic coordinate descent on
      //   c·αᵀQα + 2·s12ᵀα + 2λ‖α‖₁.
      for (int pass = 0; pass < 1000; ++pass) {
        double max_delta = 0.0;
        for (Index k = 0; k < m; ++k) {
          const double qkk = Q(k, k);
          const double z = c * (qkk * alpha[k] - r[k]) - s12[k];
          const double next = soft_threshold(z, lambda) / (c * qkk);
          const double delta = next - alpha[k];
          if (delta != 0.0) {
            r.noalias() += Q.col(k) * delta;
            alpha[k] = next;
            max_delta = std::max(max_delta, std::abs(delta));
          }
        }
        if (max_delta < inner_tol) break;
      }

      const double gamma = 1.0 / c;
      const double theta_jj = gamma + alpha.dot(r);

      // Write the solved column back and track the largest change.
      max_change = std::max(max_change, std::abs(theta_jj - ws.theta(j, j)));
      for (Index k = 0, src = 0; k < p; ++k) {
        if (k == j) continue;
        const double v = alpha[src];
        max_change = std::max(max_change, std::abs(v - ws.theta(k, j)));
        ws.theta(k, j) = v;
        ws.theta(j, k) = v;
        ++src;
      }
      ws.theta(j, j) = theta_jj;

      // W blocks: W11 = Q + (Qα)(Qα)ᵀ/γ, w12 = −Qα/γ, w22 = 1/γ.
      Q.noalias() += (r * c) * r.transpose();
      ws.W.topLeftCorner(j, j) = Q.topLeftCorner(j, j);
      ws.W.topRightCorner(j, p - j - 1) = Q.topRightCorner(j, m - j);
      ws.W.bottomLeftCorner(p - j - 1, j) = Q.bottomLeftCorner(m - j, j);
      ws.W.bottomRightCorner(p - j - 1, p - j - 1) = Q.bottomRightCorner(m - j, m - j);
      w12 = -c * r;
      for (Index k = 0, src = 0; k < p; ++k) {
        if (k == j) continue;
        ws.W(k, j) = w12[src];
        ws.W(j, k) = w12[src];
        ++src;
      }
      ws.W(j, j) = c;
    }
    ++sweeps;

    if (config.record_objective) {
      refresh_inverse(ws);
      result.objective_trace.push_back(objective(ws, config.penalize_diagonal));
    } else if (sweeps % 8 == 0) {
      refresh_inverse(ws);  // shed accumulated rank-1 rounding drift
    }

    if (max_change < config.theta_tol || p == 1) {
      refresh_inverse(ws);
      const double kkt = kkt_residual(ws);
      if (kkt < best_kkt) {
        best_kkt = kkt;
        best_theta = ws.theta;
      }
      if (kkt <= config.kkt_tol) {
        converged = true;
      }
    }
  }

  if (!converged) {
    refresh_inverse(ws);
    const double kkt = kkt_residual(ws);
    if (kkt <= config.kkt_tol) {
      converged = true;
    } else if (kkt < best_kkt) {
      best_kkt = kkt;
      best_theta = ws.theta;
    }
  }

  if (!converged) {
    ws.theta = best_theta;
    refresh_inverse(ws);
    PrecisionEstimate best;
    best.lambda = lambda;
    best.iterations = sweeps;
    best.kkt_residual = best_kkt;
    best.objective = objective(ws, config.penalize_diagonal);
    best.objective_trace = std::move(result.objective_trace);
    best.omega = SpdMatrix(ws.theta);
    throw NoConvergenceError(
        "sglasso: no convergence after " + std::to_string(sweeps) +
            " sweeps (kkt residual " + std::to_string(best_kkt) + ")",
        std::move(best));
  }

  result.iterations = sweeps;
  result.kkt_residual = kkt_residual(ws);
  result.objective = objective(ws, config.penalize_diagonal);
  result.omega = SpdMatrix(ws.theta);
  return result;
}

double sglasso_select_lambda(const Matrix& X, const Vector& mu,
                             const std::vector<double>& lambda_grid,
                             int k_folds, const SglassoConfig& config) {
  if (lambda_grid.empty()) throw ContractViolation("sglasso_select_lambda: empty grid");
  if (k_folds < 2) throw ContractViolation("sglasso_select_lambda: need k >= 2");
  const Index n = X.rows();
  const Index p = X.cols();
  if (n < k_folds) throw ContractViolation("sglasso_select_lambda: n < k_folds");

  std::vector<Matrix> train_cov(k_folds), val_cov(k_folds);
  for (int f = 0; f < k_folds; ++f) {
    Index n_val = 0, n_train = 0;
    for (Index i = 0; i < n; ++i) (i % k_folds == f ? n_val : n_train)++;
    Matrix train(n_train, p), val(n_val, p);
    Index it = 0, iv = 0;
    for (Index i = 0; i < n; ++i) {
      if (i % k_folds == f) {
        val.row(iv++) = X.row(i);
      } else {
        train.row(it++) = X.row(i);
      }
    }
    train_cov[f] = sign_cov(train, mu);
    val_cov[f] = sign_cov(val, mu);
  }

  double best_lambda = lambda_grid.front();
  double best_loss = std::numeric_limits<double>::infinity();
  for (double lambda : lambda_grid) {
    double loss = 0.0;
    bool ok = true;
    for (int f = 0; f < k_folds && ok; ++f) {
      try {
        PrecisionEstimate fit = sglasso(train_cov[f], p, lambda, config);
        const Matrix& theta = fit.omega.mat();
        loss += static_cast<double>(p) * (val_cov[f].array() * theta.array()).sum() -
                fit.omega.log_det();
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) continue;
    loss /= static_cast<double>(k_folds);
    if (loss < best_loss - 1e-12 ||
        (std::abs(loss - best_loss) <= 1e-12 && lambda > best_lambda)) {
      best_loss = loss;
      best_lambda = lambda;
    }
  }
  if (!std::isfinite(best_loss)) {
    throw CalibrationError("sglasso_select_lambda: every candidate failed");
  }
  return best_lambda;
}

}  // namespace hrstat
