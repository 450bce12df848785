#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "blab/numerics.hpp"

namespace blab {

DenseMatrix::DenseMatrix(CMatrix m, SpaceTag rows, SpaceTag cols)
    : entries(std::move(m)), row_space(std::move(rows)), col_space(std::move(cols)) {
  if (row_space.dim != entries.rows() || col_space.dim != entries.cols()) {
    throw InvalidArgument("DenseMatrix: space tags " + row_space.name + " x " +
                          col_space.name + " do not match matrix shape");
  }
}

DenseMatrix::DenseMatrix(CMatrix m)
    : entries(std::move(m)),
      row_space{"anon", static_cast<int>(entries.rows())},
      col_space{"anon", static_cast<int>(entries.cols())} {}

double hermiticity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianEigen hermitian_eigen(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw InvalidArgument("hermitian_eigen: matrix is not square");
  const double scale = std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
  if (hermiticity_defect(m) > tol * scale) {
    throw InvalidArgument("hermitian_eigen: input is not Hermitian within tolerance");
  }
  if (m.size() == 0) return {};
  const CMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  if (es.info() != Eigen::Success) throw Error("hermitian_eigen: solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

HermitianEigen hermitian_eigen(const DenseMatrix& m, double tol) {
  return hermitian_eigen(m.entries, tol);
}

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double operator_norm(const DenseMatrix& m) { return operator_norm(m.entries); }

double smallest_singular_value(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (m.rows() != m.cols()) return 0.0;
  return sv(sv.size() - 1);
}

CMatrix orthonormal_column_basis(const CMatrix& m, double rel_tol) {
  if (m.cols() == 0) return CMatrix(m.rows(), 0);
  Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cut = rel_tol * std::max(sv.size() ? sv(0) : 0.0, 1e-300);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("linear_fit: need at least two paired samples");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw InvalidArgument("linear_fit: degenerate abscissae");
  const double c1 = sxy / sxx;
  return {my - c1 * mx, c1};
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0) throw InvalidArgument("loglog_slope: data must be positive");
    lx[i] = std::log(x[i]);
  }
  for (std::size_t i = 0; i < y.size(); ++i) ly[i] = std::log(y[i]);
  return linear_fit(lx, ly).second;
}

}  // namespace blab
