#include "hrstat/hr.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "hrstat/spatial.hpp"

namespace hrstat {

namespace {

double median_row_norm(const Matrix& X) {
  std::vector<double> norms(static_cast<std::size_t>(X.rows()));
  for (Index i = 0; i < X.rows(); ++i) norms[static_cast<std::size_t>(i)] = X.row(i).norm();
  const std::size_t mid = norms.size() / 2;
  std::nth_element(norms.begin(), norms.begin() + mid, norms.end());
  return norms[mid];
}

// SpdMatrix for eig^alpha without re-solving; alpha < 0 flips the order so
// the descending-eigenvalue invariant is kept.
SpdMatrix powered_from(const SymEigen& eig, double alpha) {
  const Index p = eig.values.size();
  SymEigen out;
  out.values.resize(p);
  out.vectors.resize(p, p);
  if (alpha >= 0) {
    out.values = eig.values.array().pow(alpha);
    out.vectors = eig.vectors;
  } else {
    for (Index j = 0; j < p; ++j) {
      out.values[j] = std::pow(eig.values[p - 1 - j], alpha);
      out.vectors.col(j) = eig.vectors.col(p - 1 - j);
    }
  }
  return SpdMatrix::from_eigen(std::move(out));
}

Matrix scaled_form(const SymEigen& eig, double alpha) {
  return eig.vectors * eig.values.array().pow(alpha).matrix().asDiagonal() *
         eig.vectors.transpose();
}

HrEstimate run_iterations(const Matrix& X, Vector mu, Matrix sigma, int h,
                          double tol, int max_iter, double eps_pd_cfg,
                          bool classic_rule) {
  const Index n = X.rows();
  const Index p = X.cols();
  const double np = static_cast<double>(n);
  const double mu_scale = median_row_norm(X) / std::sqrt(static_cast<double>(p));

  HrEstimate est;
  est.bandwidth = h >= 0 ? h : static_cast<int>(p) - 1;

  Matrix E(n, p), A(p, p);
  Vector norms(n), g(p);
  SymEigen eig;

  for (int iter = 1; iter <= max_iter; ++iter) {
    eig = sym_eigen(sigma);
    const double eps_pd = eps_pd_cfg >= 0 ? eps_pd_cfg : default_eps_pd(sigma);
    if (eig.values.minCoeff() < eps_pd) {
      eig.values = eig.values.cwiseMax(eps_pd);
      ++est.diag.psd_projections;
    }
    const Matrix sqrt_sigma = scaled_form(eig, 0.5);
    const Matrix inv_sqrt_sigma = scaled_form(eig, -0.5);

    E.noalias() = (X.rowwise() - mu.transpose()) * inv_sqrt_sigma;
    for (Index i = 0; i < n; ++i) norms[i] = E.row(i).norm();
    std::vector<double> sorted(norms.data(), norms.data() + n);
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
    const double tol_zero = 1e-12 * sorted[mid];

    g.setZero();
    double inv_sum = 0.0;
    Index used = 0;
    for (Index i = 0; i < n; ++i) {
      if (norms[i] <= tol_zero) {
        E.row(i).setZero();
        continue;
      }
      E.row(i) /= norms[i];
      g += E.row(i);
      inv_sum += 1.0 / norms[i];
      ++used;
    }
    if (used == 0) {
      throw DegenerateDataError("hr: all whitened residuals are zero");
    }
    g /= np;
    inv_sum /= np;
    const double mean_sign_norm = g.norm();
    est.diag.mean_sign_norms.push_back(mean_sign_norm);
    est.iterations = iter;

    A.setZero();
    A.selfadjointView<Eigen::Lower>().rankUpdate(E.transpose(), 1.0 / np);
    A = A.selfadjointView<Eigen::Lower>();

    if (classic_rule) {
      const double scatter_gap =
          (static_cast<double>(p) * A - Matrix::Identity(p, p)).norm();
      if (mean_sign_norm <= tol && scatter_gap <= static_cast<double>(p) * tol) {
        est.converged = true;
        break;
      }
    }

    Vector mu_new = mu + sqrt_sigma * g / inv_sum;

    if (h >= 0 && h < p - 1) A = band(A, h);
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success) {
      // Floor the repair relative to the top of the spectrum. A near-zero
      // floor leaves dead directions that the multiplicative sigma update
      // cannot revive, and the iteration stalls in a repair cycle.
      SymEigen ae = sym_eigen(A);
      const double floor = 1e-4 * std::max(ae.values.maxCoeff(), 1e-300);
      A = psd_project(A, floor);
      ++est.diag.psd_projections;
    }
    Matrix sigma_new = static_cast<double>(p) * sqrt_sigma * A * sqrt_sigma;
    sigma_new = 0.5 * (sigma_new + sigma_new.transpose());
    sigma_new *= static_cast<double>(p) / sigma_new.trace();

    const double rel_dmu = (mu_new - mu).cwiseAbs().maxCoeff() /
                           std::max(mu_scale + mu_new.cwiseAbs().maxCoeff(), 1e-300);
    const double rel_dsigma = (sigma_new - sigma).norm() / sigma_new.norm();
    est.diag.final_rel_dmu = rel_dmu;
    est.diag.final_rel_dsigma = rel_dsigma;

    mu = std::move(mu_new);
    sigma = std::move(sigma_new);

    if (!classic_rule && rel_dmu < tol && rel_dsigma < tol &&
        mean_sign_norm <= tol) {
      est.converged = true;
      break;
    }
  }

  est.mu = std::move(mu);
  SymEigen final_eig = sym_eigen(sigma);
  const double eps_pd = eps_pd_cfg >= 0 ? eps_pd_cfg : default_eps_pd(sigma);
  if (final_eig.values.minCoeff() < eps_pd) {
    final_eig.values = final_eig.values.cwiseMax(eps_pd);
    ++est.diag.psd_projections;
  }
  est.sigma = SpdMatrix::from_eigen(final_eig);
  est.omega = powered_from(final_eig, -1.0);
  est.omega_sqrt = powered_from(final_eig, -0.5);
  return est;
}

}  // namespace

HrEstimate hr_classic(const Matrix& X, double tol, int max_iter) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (n < 3) throw ContractViolation("hr_classic: need n >= 3");
  if (n <= p) {
    throw DimensionError(
        "hr_classic: requires n > p (sample sign covariance must be "
        "invertible); use hr_estimate for high-dimensional data");
  }
  SpatialMedianResult med = spatial_median(X);
  return run_iterations(X, med.mu, Matrix::Identity(p, p), -1, tol, max_iter,
                        -1.0, true);
}

HrEstimate hr_estimate(const Matrix& X, const HrConfig& config) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (n < 3) throw ContractViolation("hr_estimate: need n >= 3");
  if (p < 2) throw ContractViolation("hr_estimate: need p >= 2");
  if (config.bandwidth < 0) throw ContractViolation("hr_estimate: bandwidth must be >= 0");
  if (config.tol <= 0) throw ContractViolation("hr_estimate: tol must be positive");

  SpatialMedianResult med =
      spatial_median(X, config.median_tol, config.median_max_iter);
  Matrix s0 = sign_cov(X, med.mu);
  const double lambda = config.lambda >= 0
                            ? config.lambda
                            : lambda_default(n, p, config.lambda_c1, config.lambda_c2);
  PrecisionEstimate prec = sglasso(s0, p, lambda, config.sglasso);
  Matrix sigma0 = prec.omega.inverse();

  HrEstimate est = run_iterations(X, med.mu, std::move(sigma0), config.bandwidth,
                                  config.tol, config.max_iter, config.eps_pd,
                                  false);
  est.diag.sglasso_kkt = prec.kkt_residual;
  est.diag.sglasso_sweeps = prec.iterations;
  return est;
}

Vector whitened_radii(const Matrix& X, const HrEstimate& est) {
  if (X.cols() != est.mu.size()) {
    throw DimensionError("whitened_radii: dimension mismatch");
  }
  Matrix whitened = (X.rowwise() - est.mu.transpose()) * est.omega_sqrt.mat();
  Vector radii(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    radii[i] = whitened.row(i).norm();
    if (radii[i] < 1e-150) {
      throw DegenerateDataError("whitened_radii: zero radius at row " +
                                std::to_string(i + 1));
    }
  }
  return radii;
}

}  // namespace hrstat
