#include "hrstat/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hrstat {

namespace {

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
  return 0.5 * (v[mid - 1] + hi);
}

Vector coordinatewise_median(const Matrix& X) {
  const Index p = X.cols();
  Vector m(p);
  std::vector<double> col(static_cast<std::size_t>(X.rows()));
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < X.rows(); ++i) col[static_cast<std::size_t>(i)] = X(i, j);
    m[j] = median_of(col);
  }
  return m;
}

// Data-scale zero threshold: tiny relative to the median row norm.
double row_scale(const Matrix& X) {
  std::vector<double> norms(static_cast<std::size_t>(X.rows()));
  for (Index i = 0; i < X.rows(); ++i) norms[static_cast<std::size_t>(i)] = X.row(i).norm();
  const double med = median_of(std::move(norms));
  return std::max(med, 1.0);
}

}  // namespace

Vector spatial_sign(const Vector& x, double tol_zero) {
  const double norm = x.norm();
  if (norm <= tol_zero || norm == 0.0) return Vector::Zero(x.size());
  return x / norm;
}

SpatialMedianResult spatial_median(const Matrix& X, double tol, int max_iter) {
  if (X.rows() < 1) throw ContractViolation("spatial_median: empty sample");
  if (tol <= 0) throw ContractViolation("spatial_median: tol must be positive");
  const Index n = X.rows();
  const Index p = X.cols();
  const double tol_zero = 1e-12 * row_scale(X);

  SpatialMedianResult res;
  res.mu = n == 1 ? Vector(X.row(0)) : coordinatewise_median(X);
  if (n == 1) {
    res.converged = true;
    return res;
  }

  Vector sum_sign(p);
  for (int iter = 0; iter < max_iter; ++iter) {
    sum_sign.setZero();
    double sum_inv = 0.0;
    Index n_coincident = 0;
    for (Index i = 0; i < n; ++i) {
      Vector d = X.row(i).transpose() - res.mu;
      const double norm = d.norm();
      if (norm <= tol_zero) {
        ++n_coincident;
        continue;
      }
      sum_sign += d / norm;
      sum_inv += 1.0 / norm;
    }
    res.iterations = iter + 1;
    // Stationarity at a data point with multiplicity k only needs the pull
    // of the remaining points to be at most k (Vardi-Zhang), so the
    // reported residual subtracts the coincident mass.
    const double pull = sum_sign.norm();
    const double resid =
        std::max(0.0, pull - static_cast<double>(n_coincident));
    res.mean_sign_norm = resid / static_cast<double>(n);
    if (res.mean_sign_norm <= tol) {
      res.converged = true;
      return res;
    }
    // resid > 0 here, so pull > n_coincident >= 0 and sum_inv > 0.
    const Vector step = sum_sign / sum_inv;
    if (n_coincident == 0) {
      res.mu += step;
    } else {
      const double shrink = std::min(1.0, static_cast<double>(n_coincident) / pull);
      res.mu += (1.0 - shrink) * step;
    }
  }

  // One final stationarity measurement for the last iterate.
  sum_sign.setZero();
  for (Index i = 0; i < n; ++i) {
    Vector d = X.row(i).transpose() - res.mu;
    const double norm = d.norm();
    if (norm > tol_zero) sum_sign += d / norm;
  }
  res.mean_sign_norm = sum_sign.norm() / static_cast<double>(n);
  res.converged = res.mean_sign_norm <= tol;
  return res;
}

Matrix sign_cov(const Matrix& X, const Vector& mu) {
  if (X.rows() < 1) throw ContractViolation("sign_cov: empty sample");
  if (X.cols() != mu.size()) throw DimensionError("sign_cov: mu length mismatch");
  const Index n = X.rows();
  const Index p = X.cols();
  const double tol_zero = 1e-12 * row_scale(X);
  Matrix out = Matrix::Zero(p, p);
  Index used = 0;
  for (Index i = 0; i < n; ++i) {
    Vector d = X.row(i).transpose() - mu;
    const double norm = d.norm();
    if (norm <= tol_zero) continue;
    d /= norm;
    out.selfadjointView<Eigen::Lower>().rankUpdate(d, 1.0);
    ++used;
  }
  if (used == 0) {
    throw DegenerateDataError("sign_cov: all centered rows are zero");
  }
  out = out.selfadjointView<Eigen::Lower>();
  out /= static_cast<double>(n);
  return out;
}

ZetaEstimates zeta1_hat(const Matrix& X, const Vector& mu,
                        const Matrix& omega_sqrt) {
  if (X.cols() != mu.size() || omega_sqrt.rows() != X.cols()) {
    throw DimensionError("zeta1_hat: dimension mismatch");
  }
  const Index n = X.rows();
  Matrix whitened = (X.rowwise() - mu.transpose()) * omega_sqrt;
  ZetaEstimates out;
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double r = whitened.row(i).norm();
    if (r < 1e-150) {
      throw DegenerateDataError("zeta1_hat: whitened radius is zero at row " +
                                std::to_string(i + 1));
    }
    sum += 1.0 / r;
  }
  out.zeta1_hat = sum / static_cast<double>(n);
  out.n_used = static_cast<int>(n);
  return out;
}

LocationScale diagonal_hr(const Matrix& X, double tol, int max_iter) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (n < 2) throw ContractViolation("diagonal_hr: need n >= 2");
  for (Index j = 0; j < p; ++j) {
    if (X.col(j).maxCoeff() == X.col(j).minCoeff()) {
      throw DegenerateDataError("diagonal_hr: column " + std::to_string(j + 1) +
                                " is constant");
    }
  }
  const double scale = row_scale(X);
  const double tol_zero = 1e-12 * scale;
  const double mu_scale = scale / std::sqrt(static_cast<double>(p));

  LocationScale res;
  res.mu = coordinatewise_median(X);
  res.d_diag = Vector::Ones(p);

  Vector sum_sign(p), sumsq(p), d_sqrt(p), d_inv_sqrt(p);
  for (int iter = 0; iter < max_iter; ++iter) {
    d_sqrt = res.d_diag.cwiseSqrt();
    d_inv_sqrt = d_sqrt.cwiseInverse();
    sum_sign.setZero();
    sumsq.setZero();
    double sum_inv = 0.0;
    for (Index i = 0; i < n; ++i) {
      Vector eps = (X.row(i).transpose() - res.mu).cwiseProduct(d_inv_sqrt);
      const double norm = eps.norm();
      if (norm <= tol_zero) continue;
      eps /= norm;
      sum_sign += eps;
      sum_inv += 1.0 / norm;
      sumsq += eps.cwiseAbs2();
    }
    if (sum_inv <= 0.0) {
      throw DegenerateDataError("diagonal_hr: all whitened rows are zero");
    }
    Vector mu_new = res.mu + d_sqrt.cwiseProduct(sum_sign) / sum_inv;
    Vector d_new = static_cast<double>(p) * res.d_diag.cwiseProduct(sumsq) /
                   static_cast<double>(n);
    if (d_new.maxCoeff() <= 0.0) {
      throw DegenerateDataError("diagonal_hr: scale update collapsed to zero");
    }
    d_new = d_new.cwiseMax(1e-12 * d_new.maxCoeff());
    d_new *= static_cast<double>(p) / d_new.sum();

    const double rel_mu = (mu_new - res.mu).cwiseAbs().maxCoeff() /
                          (mu_scale + mu_new.cwiseAbs().maxCoeff());
    const double rel_d = ((d_new - res.d_diag).cwiseAbs().cwiseQuotient(d_new)).maxCoeff();
    res.mu = std::move(mu_new);
    res.d_diag = std::move(d_new);
    res.iterations = iter + 1;
    if (std::max(rel_mu, rel_d) < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace hrstat
