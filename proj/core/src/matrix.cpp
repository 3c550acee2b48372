#include "hrstat/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace hrstat {

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

void require_symmetric(const Matrix& m, const char* what) {
  if (!is_symmetric(m)) {
    throw ContractViolation(std::string(what) + ": matrix is not symmetric");
  }
}

SymEigen sym_eigen(const Matrix& m) {
  require_symmetric(m, "sym_eigen");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw SingularMatrixError("sym_eigen: eigendecomposition failed");
  }
  // SelfAdjointEigenSolver sorts ascending; flip to descending.
  const Index p = m.rows();
  SymEigen out;
  out.values = es.eigenvalues().reverse();
  out.vectors.resize(p, p);
  for (Index j = 0; j < p; ++j) out.vectors.col(j) = es.eigenvectors().col(p - 1 - j);
  return out;
}

Matrix sym_sqrt(const Matrix& m, double eps_pd) {
  if (eps_pd < 0) eps_pd = default_eps_pd(m);
  SymEigen eig = sym_eigen(m);
  if (eig.values.minCoeff() < eps_pd || eig.values.minCoeff() <= 0.0) {
    throw SingularMatrixError("sym_sqrt: eigenvalue " +
                              std::to_string(eig.values.minCoeff()) +
                              " below positive-definite floor " +
                              std::to_string(eps_pd));
  }
  return eig.vectors * eig.values.array().sqrt().matrix().asDiagonal() *
         eig.vectors.transpose();
}

Matrix band(const Matrix& m, Index h) {
  if (m.rows() != m.cols()) throw DimensionError("band: matrix must be square");
  if (h < 0) throw ContractViolation("band: bandwidth must be >= 0");
  const Index p = m.rows();
  if (h >= p - 1) return m;
  Matrix out = Matrix::Zero(p, p);
  for (Index j = 0; j < p; ++j) {
    const Index lo = std::max<Index>(0, j - h);
    const Index hi = std::min<Index>(p - 1, j + h);
    out.col(j).segment(lo, hi - lo + 1) = m.col(j).segment(lo, hi - lo + 1);
  }
  return out;
}

Matrix psd_project(const Matrix& m, double eps_pd) {
  if (eps_pd < 0) eps_pd = default_eps_pd(m);
  SymEigen eig = sym_eigen(m);
  if (eig.values.minCoeff() >= eps_pd) return m;
  Vector clamped = eig.values.cwiseMax(eps_pd);
  return eig.vectors * clamped.asDiagonal() * eig.vectors.transpose();
}

double log_det(const Matrix& m, double eps_pd) {
  if (eps_pd < 0) eps_pd = default_eps_pd(m);
  SymEigen eig = sym_eigen(m);
  // The second clause matters when the relative floor degenerates to zero
  // (for example a zero-trace matrix): log of a non-positive eigenvalue is
  // a singularity either way.
  if (eig.values.minCoeff() < eps_pd || eig.values.minCoeff() <= 0.0) {
    throw SingularMatrixError("log_det: matrix is not positive definite");
  }
  return eig.values.array().log().sum();
}

SpdMatrix::SpdMatrix(Matrix m, double eps_pd) {
  require_symmetric(m, "SpdMatrix");
  if (eps_pd < 0) eps_pd = default_eps_pd(m);
  mat_ = std::move(m);
  eig_ = sym_eigen(mat_);
  if (eig_.values.minCoeff() < eps_pd || eig_.values.minCoeff() <= 0.0) {
    throw SingularMatrixError("SpdMatrix: eigenvalue " +
                              std::to_string(eig_.values.minCoeff()) +
                              " below positive-definite floor " +
                              std::to_string(eps_pd));
  }
}

SpdMatrix SpdMatrix::from_diagonal(const Vector& d) {
  if (d.size() == 0) throw DimensionError("SpdMatrix::from_diagonal: empty diagonal");
  if (d.minCoeff() <= 0) {
    throw SingularMatrixError("SpdMatrix::from_diagonal: non-positive entry");
  }
  SpdMatrix out;
  out.mat_ = d.asDiagonal();
  const Index p = d.size();
  // Sort the diagonal to keep the descending-eigenvalue invariant.
  std::vector<Index> order(p);
  for (Index i = 0; i < p; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return d[a] > d[b]; });
  out.eig_.values.resize(p);
  out.eig_.vectors = Matrix::Zero(p, p);
  for (Index j = 0; j < p; ++j) {
    out.eig_.values[j] = d[order[j]];
    out.eig_.vectors(order[j], j) = 1.0;
  }
  return out;
}

SpdMatrix SpdMatrix::from_eigen(SymEigen eig) {
  if (eig.values.size() == 0) throw DimensionError("SpdMatrix::from_eigen: empty");
  if (eig.values.minCoeff() <= 0) {
    throw SingularMatrixError("SpdMatrix::from_eigen: non-positive eigenvalue");
  }
  SpdMatrix out;
  out.mat_ = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
  out.eig_ = std::move(eig);
  return out;
}

Matrix SpdMatrix::powered(double alpha) const {
  return eig_.vectors * eig_.values.array().pow(alpha).matrix().asDiagonal() *
         eig_.vectors.transpose();
}

SpdMatrix SpdMatrix::powered_spd(double alpha) const {
  SymEigen eig;
  eig.values = eig_.values.array().pow(alpha).matrix();
  eig.vectors = eig_.vectors;
  if (alpha < 0) {  // negative powers flip the order
    eig.values.reverseInPlace();
    eig.vectors = eig_.vectors.rowwise().reverse();
  }
  return from_eigen(std::move(eig));
}

}  // namespace hrstat
