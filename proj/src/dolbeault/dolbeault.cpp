#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "blab/dolbeault.hpp"

namespace blab {

namespace {

SpaceTag degree_tag(const AmbientSpace& amb, int degree) {
  SpaceTag t = amb.tag();
  t.name = (degree == 0 ? "E0" : "E1") + t.name.substr(3);
  t.dim = degree == 0 ? amb.n_degree0() : amb.n_degree1();
  return t;
}

}  // namespace

CMatrix DolbeaultOperator::full() const {
  const int n0 = ambient.n_degree0(), n1 = ambient.n_degree1();
  CMatrix D = CMatrix::Zero(n0 + n1, n0 + n1);
  D.bottomLeftCorner(n1, n0) = block01.entries;
  D.topRightCorner(n0, n1) = block10.entries;
  return D;
}

CMatrix DolbeaultOperator::square_degree0() const {
  if (self_adjoint) return block01.entries.adjoint() * block01.entries;
  return block10.entries * block01.entries;
}

CMatrix DolbeaultOperator::square_degree1() const {
  if (self_adjoint) return block01.entries * block01.entries.adjoint();
  return block01.entries * block10.entries;
}

DolbeaultOperator build_dolbeault(const BundleSpec& V, int N, int lmax, const KahlerModel& model) {
  V.validate();
  if (N < 1) throw InvalidArgument("build_dolbeault: N must be positive");
  if (lmax < 0) throw InvalidArgument("build_dolbeault: lmax must be nonnegative");
  int spin2 = 0;
  for (int p : V.degrees) spin2 = std::max({spin2, std::abs(N - p), std::abs(N - p + 2)});
  if (2 * lmax + 1 < spin2) {
    throw InvalidArgument("build_dolbeault: lmax " + std::to_string(lmax) + " cannot hold spin " +
                          std::to_string(spin2) + "/2; need lmax >= " + std::to_string(spin2 / 2));
  }
  DolbeaultOperator D;
  D.bundle = V;
  D.N = N;
  D.lmax = lmax;
  D.ambient = AmbientSpace(V.degrees, N, lmax);
  D.self_adjoint = V.self_adjoint();
  const AmbientSpace& amb = D.ambient;
  const int n0 = amb.n_degree0(), n1 = amb.n_degree1(), r = amb.rank();
  const double kappa = model.kappa();

  const int want = recommended_lmax(V, N);
  if (lmax < want) {
    D.warnings.push_back("lmax " + std::to_string(lmax) + " below recommended " +
                         std::to_string(want) + "; spectrum near the cutoff may be truncated");
  }

  CMatrix round01 = CMatrix::Zero(n1, n0);
  for (int i = 0; i < r; ++i) {
    const SpinBlock& b0 = amb.block(0, i);
    const int off0 = amb.offset(0, i);
    b0.for_each([&](int k, int j2, int m2) {
      const int row = amb.index(1, i, j2, m2) - n0;
      if (row < 0) return;
      const double c = 0.5 * std::sqrt(double(j2 - b0.s2) * (j2 + b0.s2 + 2));
      round01(row, off0 + k) = kappa * c;
    });
  }

  CMatrix pot01 = CMatrix::Zero(n1, n0);
  CMatrix pot10 = CMatrix::Zero(n0, n1);
  if (!V.holomorphic_round()) {
    for (int to = 0; to < r; ++to) {
      for (int from = 0; from < r; ++from) {
        const SpinField a = V.alpha(to, from);
        if (a.band2() >= 0 && amb.block(1, to).size() > 0 && amb.block(0, from).size() > 0) {
          pot01.block(amb.offset(1, to) - n0, amb.offset(0, from), amb.block(1, to).size(),
                      amb.block(0, from).size()) = a.matrix(amb.block(1, to), amb.block(0, from));
        }
      }
    }
    if (D.self_adjoint) {
      pot10 = pot01.adjoint();
    } else {
      for (int to = 0; to < r; ++to) {
        for (int from = 0; from < r; ++from) {
          const SpinField b = V.beta(to, from);
          if (b.band2() >= 0 && amb.block(0, to).size() > 0 && amb.block(1, from).size() > 0) {
            pot10.block(amb.offset(0, to), amb.offset(1, from) - n0, amb.block(0, to).size(),
                        amb.block(1, from).size()) = b.matrix(amb.block(0, to), amb.block(1, from));
          }
        }
      }
    }
  }

  const SpaceTag t0 = degree_tag(amb, 0), t1 = degree_tag(amb, 1);
  CMatrix full01 = round01 + pot01;
  CMatrix full10 = D.self_adjoint ? CMatrix(full01.adjoint()) : CMatrix(round01.adjoint() + pot10);
  D.block01 = DenseMatrix(std::move(full01), t1, t0);
  D.block10 = DenseMatrix(std::move(full10), t0, t1);
  D.potential_part = DenseMatrix(std::move(pot01), t1, t0);
  D.potential_part10 = DenseMatrix(std::move(pot10), t0, t1);
  D.grading.assign(n0, 0);
  D.grading.insert(D.grading.end(), n1, 1);
  return D;
}

D2Spectrum spectrum_d2(const DolbeaultOperator& D) {
  D2Spectrum s;
  auto collect = [&](const CMatrix& H, std::vector<double>& out) {
    if (H.size() == 0) return;
    if (D.self_adjoint) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
      for (int i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
    } else {
      Eigen::ComplexEigenSolver<CMatrix> es(H, false);
      for (int i = 0; i < es.eigenvalues().size(); ++i) {
        out.push_back(es.eigenvalues()(i).real());
        s.max_imag = std::max(s.max_imag, std::abs(es.eigenvalues()(i).imag()));
      }
    }
    std::sort(out.begin(), out.end());
  };
  collect(D.square_degree0(), s.degree0);
  collect(D.square_degree1(), s.degree1);
  s.real = D.self_adjoint;
  s.values = s.degree0;
  s.values.insert(s.values.end(), s.degree1.begin(), s.degree1.end());
  std::sort(s.values.begin(), s.values.end());
  return s;
}

double spectral_gap(const D2Spectrum& s, double floor) {
  for (double v : s.values)
    if (v > floor) return v;
  return std::numeric_limits<double>::infinity();
}

namespace {

using FieldMatrix = std::vector<std::vector<SpinField>>;

// Compatible part a = (alpha + beta^dagger)/2 of the (0,1) potential.
FieldMatrix compatible_alpha(const BundleSpec& V) {
  const int r = V.rank();
  FieldMatrix a(r, std::vector<SpinField>(r));
  for (int to = 0; to < r; ++to) {
    for (int from = 0; from < r; ++from) {
      const SpinField al = V.alpha(to, from);
      if (V.self_adjoint()) {
        a[to][from] = al;
      } else {
        const SpinField bd = V.beta(from, to).conj();
        a[to][from] = (SpinField(al.spin2()) + al + bd) * 0.5;
      }
    }
  }
  return a;
}

}  // namespace

double weitzenbock_constant(const BundleSpec& V, const KahlerModel& model) {
  V.validate();
  const int r = V.rank();
  const double kappa = model.kappa();
  const FieldMatrix a = compatible_alpha(V);
  FieldMatrix b(r, std::vector<SpinField>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) b[i][j] = a[j][i].conj();

  FieldMatrix K(r, std::vector<SpinField>(r));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      SpinField k(V.degrees[j] - V.degrees[i]);
      if (i == j && V.degrees[i] != 0)
        k += SpinField::constant(-kappa * kappa * V.degrees[i]);
      if (a[i][j].band2() >= 0) k += a[i][j].edth_bar() * kappa;
      if (b[i][j].band2() >= 0) k += b[i][j].edth() * kappa;
      for (int m = 0; m < r; ++m) {
        if (a[i][m].band2() >= 0 && b[m][j].band2() >= 0) k += a[i][m].multiply(b[m][j]);
        if (b[i][m].band2() >= 0 && a[m][j].band2() >= 0) k += b[i][m].multiply(a[m][j]) * -1.0;
      }
      K[i][j] = k.pruned(1e-15);
    }
  }
  return matrix_field_sup_norm(K).value;
}

double skew_part_norm(const BundleSpec& V) {
  if (V.self_adjoint()) return 0.0;
  const int r = V.rank();
  FieldMatrix x(r, std::vector<SpinField>(r));
  for (int to = 0; to < r; ++to)
    for (int from = 0; from < r; ++from) {
      const SpinField al = V.alpha(to, from);
      x[to][from] = ((SpinField(al.spin2()) + al - V.beta(from, to).conj()) * 0.5).pruned(1e-15);
    }
  return matrix_field_sup_norm(x).value;
}

namespace {

std::string nearest_report(const std::vector<double>& mods, double thr) {
  std::vector<double> v = mods;
  std::sort(v.begin(), v.end(),
            [&](double x, double y) { return std::abs(x - thr) < std::abs(y - thr); });
  std::ostringstream os;
  os << "nearest |eigenvalues| to threshold " << thr << ":";
  for (std::size_t i = 0; i < std::min<std::size_t>(3, v.size()); ++i) os << " " << v[i];
  return os.str();
}

struct BlockProjection {
  CMatrix P;
  CMatrix range;  // orthonormal basis of the image
  int count = 0;
  double below = 0.0;
  double above = std::numeric_limits<double>::infinity();
};

void check_gap(const std::vector<double>& mods, double thr, double scale, int N,
               BlockProjection& bp) {
  const double acc = 1e-9 * std::max(1.0, scale);
  for (double m : mods) {
    if (m < thr) bp.below = std::max(bp.below, m);
    else bp.above = std::min(bp.above, m);
    if (std::abs(m - thr) < 10.0 * acc) {
      throw RegimeError("kernel_projector: ambiguous kernel, " + nearest_report(mods, thr), N);
    }
  }
}

BlockProjection hermitian_block(const CMatrix& H, double thr, int N) {
  BlockProjection bp;
  const int n = static_cast<int>(H.rows());
  bp.P = CMatrix::Zero(n, n);
  bp.range = CMatrix(n, 0);
  if (n == 0) return bp;
  const HermitianEigen es = hermitian_eigen(H, 1e-8);
  std::vector<double> mods(es.eigenvalues.data(), es.eigenvalues.data() + n);
  for (double& m : mods) m = std::abs(m);
  check_gap(mods, thr, es.eigenvalues.cwiseAbs().maxCoeff(), N, bp);
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (mods[i] < thr) keep.push_back(i);
  CMatrix U(n, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) U.col(c) = es.eigenvectors.col(keep[c]);
  bp.P = U * U.adjoint();
  bp.range = std::move(U);
  bp.count = static_cast<int>(keep.size());
  return bp;
}

// Leading `k` left singular vectors of a thin matrix.
CMatrix leading_basis(const CMatrix& Y, int k) {
  Eigen::BDCSVD<CMatrix> svd(Y, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(k);
}

BlockProjection riesz_block(const CMatrix& H, double thr, int nodes, int N) {
  BlockProjection bp;
  const int n = static_cast<int>(H.rows());
  bp.P = CMatrix::Zero(n, n);
  bp.range = CMatrix(n, 0);
  if (n == 0) return bp;
  // One Schur form H = Q T Q^*; every resolvent is then a triangular solve.
  const Eigen::ComplexSchur<CMatrix> schur(H);
  const CMatrix& T = schur.matrixT();
  const CMatrix& Q = schur.matrixU();
  std::vector<double> mods(n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    mods[i] = std::abs(T(i, i));
    scale = std::max(scale, mods[i]);
  }
  check_gap(mods, thr, scale, N, bp);
  for (double m : mods)
    if (m < thr) ++bp.count;
  if (bp.count == 0) return bp;

  // P = (1/2 pi i) contour integral of (z - H)^{-1} over |z| = thr,
  // trapezoid rule: P = (1/M) sum_k z_k (z_k - H)^{-1}. P has low rank, so
  // it is applied to a fixed Gaussian sketch (and P^* likewise) to recover
  // its right and left images, then P = R (L^* R)^{-1} L^*.
  const int q = std::min(n, bp.count + 8);
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> g;
  CMatrix Omega(n, q);
  for (int c = 0; c < q; ++c)
    for (int r = 0; r < n; ++r) Omega(r, c) = cplx(g(rng), g(rng));
  CMatrix Y = CMatrix::Zero(n, q), Z = CMatrix::Zero(n, q);
  const CMatrix I = CMatrix::Identity(n, n);
  for (int k = 0; k < nodes; ++k) {
    const cplx z = std::polar(thr, 2.0 * kPi * (k + 0.5) / nodes);
    const CMatrix R = z * I - T;
    Y += z * R.triangularView<Eigen::Upper>().solve(Omega);
    Z += std::conj(z) * R.adjoint().triangularView<Eigen::Lower>().solve(Omega);
  }
  const CMatrix Rb = leading_basis(Y, bp.count);
  const CMatrix Lb = leading_basis(Z, bp.count);
  const CMatrix M = Lb.adjoint() * Rb;
  Eigen::FullPivLU<CMatrix> lu(M);
  if (!lu.isInvertible()) {
    throw RegimeError("kernel_projector: left and right invariant subspaces are degenerate", N);
  }
  // Both images must be invariant under T (resp. T^*).
  const double inv_r = (T * Rb - Rb * (Rb.adjoint() * T * Rb)).norm();
  const double inv_l = (T.adjoint() * Lb - Lb * (Lb.adjoint() * T.adjoint() * Lb)).norm();
  if (std::max(inv_r, inv_l) > 1e-8 * std::max(1.0, scale)) {
    throw RegimeError("kernel_projector: contour quadrature did not resolve the invariant "
                      "subspace", N);
  }
  const CMatrix QR = Q * Rb;
  bp.P = QR * lu.solve(Lb.adjoint() * Q.adjoint());
  bp.range = QR;
  return bp;
}

}  // namespace

SpectralProjector kernel_projector(const DolbeaultOperator& D, std::optional<double> threshold,
                                   int contour_nodes) {
  // The round spectrum is integral (kappa = 1), so 1/2 separates it at every N.
  const double thr = threshold.value_or(D.bundle.holomorphic_round() ? 0.5 : 0.5 * D.N);
  if (!(thr > 0.0)) throw InvalidArgument("kernel_projector: threshold must be positive");
  if (contour_nodes < 8) throw InvalidArgument("kernel_projector: need at least 8 contour nodes");
  const int n0 = D.ambient.n_degree0(), n1 = D.ambient.n_degree1();
  BlockProjection b0, b1;
  if (D.self_adjoint) {
    b0 = hermitian_block(D.square_degree0(), thr, D.N);
    b1 = hermitian_block(D.square_degree1(), thr, D.N);
  } else {
    b0 = riesz_block(D.square_degree0(), thr, contour_nodes, D.N);
    b1 = riesz_block(D.square_degree1(), thr, contour_nodes, D.N);
  }
  CMatrix P = CMatrix::Zero(n0 + n1, n0 + n1);
  P.topLeftCorner(n0, n0) = b0.P;
  P.bottomRightCorner(n1, n1) = b1.P;
  SpectralProjector sp;
  const SpaceTag tag = D.ambient.tag();
  sp.rank = b0.count + b1.count;
  const double tr = P.trace().real();
  if (std::abs(tr - sp.rank) > 1e-6) {
    throw RegimeError("kernel_projector: trace " + std::to_string(tr) +
                      " disagrees with eigenvalue count " + std::to_string(sp.rank), D.N);
  }
  sp.matrix = DenseMatrix(std::move(P), tag, tag);
  sp.orthogonal = D.self_adjoint;
  sp.threshold = thr;
  sp.below = std::max(b0.below, b1.below);
  sp.above = std::min(b0.above, b1.above);
  sp.range = CMatrix::Zero(n0 + n1, b0.range.cols() + b1.range.cols());
  sp.range.topLeftCorner(n0, b0.range.cols()) = b0.range;
  sp.range.bottomRightCorner(n1, b1.range.cols()) = b1.range;
  sp.range_degree0 = static_cast<int>(b0.range.cols());
  return sp;
}

KernelSplit kernel_degree_split(const DolbeaultOperator& D) {
  KernelSplit ks;
  ks.C = weitzenbock_constant(D.bundle);
  ks.B_norm = skew_part_norm(D.bundle);
  ks.in_regime = D.N > ks.C + ks.B_norm * ks.B_norm;
  if (!ks.in_regime) ks.flag = "outside guaranteed regime";
  const SpectralProjector P = kernel_projector(D);
  const int n0 = D.ambient.n_degree0(), n1 = D.ambient.n_degree1();
  ks.dim_degree0 =
      static_cast<int>(std::lround(P.matrix.entries.topLeftCorner(n0, n0).trace().real()));
  ks.dim_degree1 =
      static_cast<int>(std::lround(P.matrix.entries.bottomRightCorner(n1, n1).trace().real()));
  const CMatrix& K = P.range;
  if (K.cols() == 0) {
    ks.min_psi0 = 0.0;
    return ks;
  }
  // Smallest |psi_0| over unit vectors psi in the kernel.
  const CMatrix top = K.topRows(n0);
  if (top.rows() < top.cols()) {
    ks.min_psi0 = 0.0;
  } else {
    Eigen::BDCSVD<CMatrix> svd(top);
    ks.min_psi0 = svd.singularValues()(svd.singularValues().size() - 1);
  }
  return ks;
}

ProjectorDistance projector_distance(const BundleSpec& V, const BundleSpec& W, int N, int lmax) {
  if (V.degrees != W.degrees) throw InvalidArgument("projector_distance: degrees differ");
  if (!W.self_adjoint()) throw InvalidArgument("projector_distance: reference W must be self-adjoint");
  if (lmax < 0) lmax = std::max(recommended_lmax(V, N), recommended_lmax(W, N));
  const SpectralProjector PV = kernel_projector(build_dolbeault(V, N, lmax));
  const SpectralProjector PW = kernel_projector(build_dolbeault(W, N, lmax));
  ProjectorDistance d;
  d.measured = operator_norm(PV.matrix.entries - PW.matrix.entries);
  d.C = weitzenbock_constant(W);
  d.A_norm = potential_difference_sup_norm(V, W);
  d.applicable = N > d.C + 4.0 * d.A_norm * d.A_norm;
  if (d.applicable) {
    const double root = std::sqrt(N - d.C);
    const double rho = 0.5 * root;
    d.bound = 2.0 * d.A_norm / root / (rho - d.A_norm);
    d.contour_bound = d.A_norm / (rho - d.A_norm);
  } else {
    d.bound = d.contour_bound = std::numeric_limits<double>::infinity();
  }
  return d;
}

}  // namespace blab
