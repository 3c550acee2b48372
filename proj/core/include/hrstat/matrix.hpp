#pragma once

#include <Eigen/Dense>
#include <utility>

#include "hrstat/errors.hpp"

namespace hrstat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Relative floor under which an eigenvalue is treated as zero. Scales with
// the mean eigenvalue so the same tolerance works for matrices of any size.
inline double default_eps_pd(const Matrix& m) {
  return 1e-8 * (m.trace() / static_cast<double>(m.rows()));
}

bool is_symmetric(const Matrix& m, double tol = 1e-10);
void require_symmetric(const Matrix& m, const char* what);

struct SymEigen {
  Vector values;   // descending
  Matrix vectors;  // columns match values
};

// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.
SymEigen sym_eigen(const Matrix& m);

// Symmetric square root. Throws SingularMatrixError if any eigenvalue is
// below eps_pd (default: default_eps_pd(m)).
Matrix sym_sqrt(const Matrix& m, double eps_pd = -1.0);

// Zeroes entries with |i - j| > h. h < 0 is a contract violation; h >= p-1
// returns m unchanged.
Matrix band(const Matrix& m, Index h);

// Nearest valid covariance: clamps eigenvalues below eps_pd up to eps_pd.
Matrix psd_project(const Matrix& m, double eps_pd = -1.0);

double log_det(const Matrix& m, double eps_pd = -1.0);

// Symmetric positive definite matrix bundled with its eigendecomposition so
// matrix powers (inverse, square roots, log-determinant) are one-liners.
// Construction validates symmetry and positive definiteness.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(Matrix m, double eps_pd = -1.0);

  static SpdMatrix from_diagonal(const Vector& d);
  // For callers that already hold the decomposition (skips re-solving).
  static SpdMatrix from_eigen(SymEigen eig);

  Index dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }
  const SymEigen& eigen() const { return eig_; }

  Matrix inverse() const { return powered(-1.0); }
  Matrix sqrt() const { return powered(0.5); }
  Matrix inv_sqrt() const { return powered(-0.5); }
  double log_det() const { return eig_.values.array().log().sum(); }

  Matrix powered(double alpha) const;
  // Same power with its decomposition attached (descending order kept).
  SpdMatrix powered_spd(double alpha) const;

 private:
  Matrix mat_;
  SymEigen eig_;
};

}  // namespace hrstat
