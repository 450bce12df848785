#pragma once

// Numerical kernels shared by every other module: sphere quadrature, dense
// Hermitian eigendecomposition, operator norms, exact Wigner 3j symbols and
// spin-weighted harmonics.
//
// Angular-momentum labels are carried as "twice" integers throughout
// (j2 = 2j, m2 = 2m, s2 = 2s) so that half-integer spins need no special
// casing.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blab/error.hpp"

namespace blab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Quadrature

/// Tensor-product Gauss-Legendre (in cos theta) x uniform (in phi) grid.
/// Nodes are stored theta-major: node (a, b) has index a * n_phi + b.
struct QuadratureGrid {
  std::vector<double> theta;    // n_theta polar nodes
  std::vector<double> phi;      // n_phi azimuthal nodes
  std::vector<double> weights;  // n_theta * n_phi, sum = area
  int exactness_degree = 0;     // max harmonic degree integrated exactly

  int n_theta() const { return static_cast<int>(theta.size()); }
  int n_phi() const { return static_cast<int>(phi.size()); }
  std::size_t size() const { return weights.size(); }
  double total_weight() const;
};

/// Gauss-Legendre x uniform-phi quadrature with weights summing to `area`.
QuadratureGrid gauss_legendre_sphere(int n_theta, int n_phi, double area = 2.0 * kPi);

/// Smallest Gauss-Legendre grid integrating products of total degree
/// `degree` exactly.
QuadratureGrid quadrature_for_degree(int degree, double area = 2.0 * kPi);

/// Equiangular evaluation grid including both poles; used for sup norms.
struct EvaluationGrid {
  std::vector<double> theta;
  std::vector<double> phi;
  double resolution = 0.0;  // largest node spacing, radians
};

EvaluationGrid equiangular_grid(int n_theta, int n_phi);

// ---------------------------------------------------------------------------
// Dense matrices with space tags

/// Label of the Hilbert space a matrix index runs over, e.g. "H_8" or
/// "E_8[O(1)]". The dimension is part of the tag and checked on construction.
struct SpaceTag {
  std::string name;
  int dim = 0;
  bool operator==(const SpaceTag&) const = default;
};

struct DenseMatrix {
  CMatrix entries;
  SpaceTag row_space;
  SpaceTag col_space;

  DenseMatrix() = default;
  DenseMatrix(CMatrix m, SpaceTag rows, SpaceTag cols);
  /// Untagged convenience constructor; tags become "anon".
  explicit DenseMatrix(CMatrix m);

  int rows() const { return static_cast<int>(entries.rows()); }
  int cols() const { return static_cast<int>(entries.cols()); }
};

struct HermitianEigen {
  RVector eigenvalues;  // ascending
  CMatrix eigenvectors; // unitary, columns match eigenvalues
};

/// Eigendecomposition of a Hermitian matrix. Throws InvalidArgument when
/// the input deviates from Hermitian by more than `tol` (relative).
HermitianEigen hermitian_eigen(const CMatrix& m, double tol = 1e-10);
HermitianEigen hermitian_eigen(const DenseMatrix& m, double tol = 1e-10);

/// Largest singular value.
double operator_norm(const CMatrix& m);
double operator_norm(const DenseMatrix& m);

/// Smallest singular value (0 for empty or non-square-rank-deficient input).
double smallest_singular_value(const CMatrix& m);

/// Orthonormal basis of the column span, via SVD with a relative rank
/// tolerance.
CMatrix orthonormal_column_basis(const CMatrix& m, double rel_tol = 1e-8);

double hermiticity_defect(const CMatrix& m);

// ---------------------------------------------------------------------------
// Angular momentum

/// A half-integer stored as twice its value.
struct HalfInt {
  int twice = 0;
  static HalfInt from_double(double v);  // throws on non half-integers
  double value() const { return 0.5 * twice; }
  bool operator==(const HalfInt&) const = default;
};

/// Wigner 3j symbol from the Racah formula, evaluated with exact
/// prime-factorized rationals and rounded once at the end.
double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);

/// Same, with all labels as twice-integers. Memoized per thread.
double wigner3j_twice(int j1, int j2, int j3, int m1, int m2, int m3);

/// Wigner small-d function d^j_{m,m'}(theta), labels as twice-integers.
double wigner_small_d(int j2, int m2, int mp2, double theta);

/// Spin-weighted spherical harmonic
///   sY_{jm}(theta, phi) = sqrt((2j+1)/4pi) d^j_{-s,m}(theta) exp(i m phi).
/// For s = 0 this drops the Condon-Shortley sign: Y_11 = +sqrt(3/8pi) sin e^{i phi}.
/// With this phase, the raising operator satisfies
///   edth sY_{jm} = +sqrt((j-s)(j+s+1)) (s+1)Y_{jm},
///   conj(sY_{jm}) = (-1)^{m+s} (-s)Y_{j,-m}.
cplx spin_harmonic(int s2, int j2, int m2, double theta, double phi);

/// Integral over the unit sphere of conj(Y_out) * Y_field * Y_in, where each
/// label triple is (s2, j2, m2). Zero unless spins and m's add up.
double spin_triple_integral(int so2, int jo2, int mo2,
                            int sf2, int jf2, int mf2,
                            int si2, int ji2, int mi2);

// ---------------------------------------------------------------------------
// Fits

/// Least-squares slope of log(y) against log(x). Requires positive data.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Least-squares fit y ~ c0 + c1 x; returns {c0, c1}.
std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace blab
