#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "blab/modules_k.hpp"

namespace blab {

RankPolynomial rank_polynomial(int r, int d) {
  if (r < 0) throw InvalidArgument("rank_polynomial: negative rank");
  return {static_cast<long long>(r) - d, r, r, d};
}

namespace {

std::optional<int> threshold_from(const std::vector<int>& Ns,
                                  const std::map<int, long long>& deviations) {
  std::optional<int> n_star;
  for (auto it = Ns.rbegin(); it != Ns.rend(); ++it) {
    if (deviations.count(*it)) break;
    n_star = *it;
  }
  return n_star;
}

std::vector<int> sorted_unique(std::vector<int> Ns) {
  std::sort(Ns.begin(), Ns.end());
  Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());
  return Ns;
}

}  // namespace

QuantizedModule rank_sequence(const BundleSpec& V, std::vector<int> Ns, bool numerical) {
  V.validate();
  QuantizedModule q;
  q.bundle = V;
  q.Ns = sorted_unique(std::move(Ns));
  if (q.Ns.empty() || q.Ns.front() < 1) throw InvalidArgument("rank_sequence: need N >= 1");
  q.poly = rank_polynomial(V.rank(), V.total_degree());
  for (int N : q.Ns) {
    int rank = 0, rank1 = 0;
    if (numerical || !V.holomorphic_round()) {
      const DolbeaultOperator D = build_dolbeault(V, N, recommended_lmax(V, N));
      const SpectralProjector P = kernel_projector(D);
      const int n1 = D.ambient.n_degree1();
      rank = P.rank;
      rank1 = static_cast<int>(
          std::lround(P.matrix.entries.bottomRightCorner(n1, n1).trace().real()));
    } else {
      rank1 = antiholomorphic_count(V.degrees, N);
      rank = holomorphic_count(V.degrees, N) + rank1;
    }
    q.ranks[N] = rank;
    q.ranks_degree1[N] = rank1;
    const long long dev = rank - q.poly(N);
    if (dev != 0) q.deviations[N] = dev;
  }
  q.n_star = threshold_from(q.Ns, q.deviations);
  return q;
}

K0Class K0Class::from_module(const QuantizedModule& m) { return {m.poly, m.deviations}; }

nlohmann::json K0Class::to_json() const {
  nlohmann::json fin = nlohmann::json::object();
  for (const auto& [N, d] : finite) fin[std::to_string(N)] = d;
  return {{"poly", {poly.c0, poly.c1}}, {"finite", fin}};
}

K0Class K0Class::from_json(const nlohmann::json& j) {
  K0Class k;
  const auto& p = j.at("poly");
  if (!p.is_array() || p.size() != 2) throw InvalidArgument("K0Class: poly must be [c0, c1]");
  k.poly.c0 = p[0].get<long long>();
  k.poly.c1 = p[1].get<long long>();
  k.poly.r = static_cast<int>(k.poly.c1);
  k.poly.d = static_cast<int>(k.poly.c1 - k.poly.c0);
  if (j.contains("finite"))
    for (const auto& [key, val] : j["finite"].items()) k.finite[std::stoi(key)] = val.get<long long>();
  return k;
}

bool k0_equal_mod_finite(const K0Class& a, const K0Class& b) { return a.poly == b.poly; }

// ---------------------------------------------------------------------------
// Morphisms

void check_covariantly_constant(const CMatrix& phi, const BundleSpec& V, const BundleSpec& W) {
  if (phi.rows() != W.rank() || phi.cols() != V.rank()) {
    throw InvalidArgument("morphism: phi must be (rank W) x (rank V)");
  }
  for (int a = 0; a < W.rank(); ++a)
    for (int b = 0; b < V.rank(); ++b)
      if (phi(a, b) != cplx{} && W.degrees[a] != V.degrees[b]) {
        throw InvalidArgument("morphism: phi couples summands of different degree, so it is "
                              "not covariantly constant");
      }
  // The pullback phi^T : E^W -> E^V must commute with D:
  // phi^T alpha_W = alpha_V phi^T, and the same for beta.
  const double tol = 1e-12;
  auto compare = [&](bool is_alpha) {
    for (int b = 0; b < V.rank(); ++b) {
      for (int c = 0; c < W.rank(); ++c) {
        const int s2 = W.degrees[c] - V.degrees[b] + (is_alpha ? 2 : -2);
        SpinField lhs(s2), rhs(s2);
        for (int a = 0; a < W.rank(); ++a) {
          if (phi(a, b) == cplx{}) continue;
          const SpinField f = is_alpha ? W.alpha(a, c) : W.beta(a, c);
          if (f.band2() >= 0) lhs += f * phi(a, b);
        }
        for (int k = 0; k < V.rank(); ++k) {
          if (phi(c, k) == cplx{}) continue;
          const SpinField f = is_alpha ? V.alpha(b, k) : V.beta(b, k);
          if (f.band2() >= 0) rhs += f * phi(c, k);
        }
        if ((lhs - rhs).pruned(tol).band2() >= 0) {
          throw InvalidArgument("morphism: phi does not intertwine the connections");
        }
      }
    }
  };
  if (!V.holomorphic_round() || !W.holomorphic_round()) {
    compare(true);
    compare(false);
  }
}

namespace {

int common_lmax(const BundleSpec& V, const BundleSpec& W, int N) {
  return std::max(recommended_lmax(V, N), recommended_lmax(W, N));
}

// Ambient map psi_W -> phi^T psi_W between the mode spaces of V and W.
CMatrix ambient_pullback(const CMatrix& phi, const AmbientSpace& av, const AmbientSpace& aw) {
  CMatrix M = CMatrix::Zero(av.size(), aw.size());
  for (int d = 0; d < 2; ++d)
    for (int a = 0; a < aw.rank(); ++a)
      for (int b = 0; b < av.rank(); ++b) {
        if (phi(a, b) == cplx{}) continue;
        const int n = av.block(d, b).size();
        M.block(av.offset(d, b), aw.offset(d, a), n, n) += phi(a, b) * CMatrix::Identity(n, n);
      }
  return M;
}

SectionOfV apply_phi(const CMatrix& phi, const SectionOfV& v, const BundleSpec& W) {
  SectionOfV w;
  for (int a = 0; a < W.rank(); ++a) {
    SpinField c(W.degrees[a]);
    for (int b = 0; b < static_cast<int>(v.components.size()); ++b)
      if (phi(a, b) != cplx{} && v.components[b].band2() >= 0) c += v.components[b] * phi(a, b);
    w.components.push_back(c);
  }
  return w;
}

}  // namespace

DenseMatrix morphism_pushforward(const CMatrix& phi, const BundleSpec& V, const BundleSpec& W,
                                 int N) {
  check_covariantly_constant(phi, V, W);
  const int lmax = common_lmax(V, W, N);
  const HilbertBasis EV = e_space(V, N, lmax);
  const HilbertBasis EW = e_space(W, N, lmax);
  const CMatrix image = ambient_pullback(phi, EV.ambient, EW.ambient) * EW.vectors;
  CMatrix F = EV.vectors.adjoint() * image;
  if ((EV.vectors * F - image).norm() > 1e-8 * std::max(1.0, image.norm())) {
    throw RegimeError("morphism_pushforward: pulled-back kernel leaves E_N^V", N);
  }
  return DenseMatrix(std::move(F), EV.tag, EW.tag);
}

double intertwining_residual(const CMatrix& phi, const SectionOfV& v, const BundleSpec& V,
                             const BundleSpec& W, int N) {
  v.check(V.degrees);
  const DenseMatrix F = morphism_pushforward(phi, V, W, N);
  const int lmax = common_lmax(V, W, N);
  const HilbertBasis EV = e_space(V, N, lmax);
  const HilbertBasis EW = e_space(W, N, lmax);
  const CMatrix lhs = toeplitz_module(apply_phi(phi, v, W), EW).matrix.entries;
  const CMatrix rhs = toeplitz_module(v, EV).matrix.entries * F.entries;
  return operator_norm(lhs - rhs);
}

Comparator comparator(const BundleSpec& V, const BundleSpec& W, int N, const SectionOfV& v,
                      double margin) {
  if (V.degrees != W.degrees) throw InvalidArgument("comparator: bundles must share degrees");
  const int lmax = common_lmax(V, W, N);
  const HilbertBasis EV = e_space(V, N, lmax);
  const HilbertBasis EW = e_space(W, N, lmax);
  const SpectralProjector PV = kernel_projector(build_dolbeault(V, N, lmax));
  const SpectralProjector PW = kernel_projector(build_dolbeault(W, N, lmax));
  Comparator c;
  CMatrix u = EV.vectors.adjoint() * PV.matrix.entries * EW.vectors;
  c.projector_distance = operator_norm(PV.matrix.entries - PW.matrix.entries);
  if (u.rows() == u.cols() && u.size() > 0) {
    Eigen::BDCSVD<CMatrix> svd(u);
    c.smallest_sv = svd.singularValues()(svd.singularValues().size() - 1);
  }
  c.bijective = u.rows() == u.cols() && c.smallest_sv > margin;
  const CMatrix tv = toeplitz_module(v, EV).matrix.entries;
  const CMatrix tw = toeplitz_module(v, EW).matrix.entries;
  c.residual = operator_norm(tv * u - tw);
  c.u = DenseMatrix(std::move(u), EV.tag, EW.tag);
  return c;
}

// ---------------------------------------------------------------------------
// Idempotents

SymbolMatrix identity_projector(int m) {
  SymbolMatrix e(m, std::vector<Symbol>(m, Symbol(0)));
  for (int i = 0; i < m; ++i) e[i][i] = Symbol::constant(1.0);
  return e;
}

SymbolMatrix bott_projector() {
  // e = (1/2) [[1 + cos, sin e^{-i phi}], [sin e^{i phi}, 1 - cos]]
  const double c10 = std::sqrt(4.0 * kPi / 3.0), c11 = std::sqrt(8.0 * kPi / 3.0);
  const Symbol one = Symbol::constant(1.0);
  const Symbol cosine = Symbol::ylm(1, 0, c10);
  SymbolMatrix e(2, std::vector<Symbol>(2));
  e[0][0] = (one + cosine) * 0.5;
  e[1][1] = (one - cosine) * 0.5;
  e[0][1] = Symbol::ylm(1, -1, 0.5 * c11);
  e[1][0] = Symbol::ylm(1, 1, -0.5 * c11);
  return e;
}

SymbolMatrix direct_sum(const SymbolMatrix& a, const SymbolMatrix& b) {
  const std::size_t m = a.size(), n = b.size();
  SymbolMatrix e(m + n, std::vector<Symbol>(m + n, Symbol(0)));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) e[i][j] = a[i][j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e[m + i][m + j] = b[i][j];
  return e;
}

namespace {

int symbol_band(const SymbolMatrix& e) {
  int b = 0;
  for (const auto& row : e)
    for (const auto& f : row) b = std::max(b, f.band());
  return b;
}

CMatrix evaluate_matrix(const SymbolMatrix& e, double theta, double phi) {
  const int m = static_cast<int>(e.size());
  CMatrix M(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) M(i, j) = e[i][j].evaluate(theta, phi);
  return M;
}

void check_square(const SymbolMatrix& e) {
  if (e.empty()) throw InvalidArgument("idempotent: empty symbol matrix");
  for (const auto& row : e)
    if (row.size() != e.size()) throw InvalidArgument("idempotent: symbol matrix must be square");
}

}  // namespace

double pointwise_idempotency_defect(const SymbolMatrix& e) {
  check_square(e);
  const EvaluationGrid g = sup_grid_for_band(symbol_band(e));
  double worst = 0.0;
  for (double t : g.theta)
    for (double p : g.phi) {
      const CMatrix M = evaluate_matrix(e, t, p);
      worst = std::max(worst, (M * M - M).cwiseAbs().maxCoeff());
    }
  return worst;
}

double chern_weil_degree(const SymbolMatrix& e) {
  check_square(e);
  const int nt = 48, np = 96;
  const QuadratureGrid gl = gauss_legendre_sphere(nt, 1, 4.0 * kPi);
  const double h = 1e-5;
  cplx total = 0.0;
  for (int a = 0; a < nt; ++a) {
    // Gauss-Legendre in theta itself: theta = pi (x + 1)/2.
    const double x = std::cos(gl.theta[a]);
    const double w = gl.weights[a] / (2.0 * kPi) * 0.5 * kPi;  // GL weight times dtheta/dx
    const double t = 0.5 * kPi * (x + 1.0);
    for (int b = 0; b < np; ++b) {
      const double p = 2.0 * kPi * b / np;
      const CMatrix E = evaluate_matrix(e, t, p);
      const CMatrix Et = (evaluate_matrix(e, t + h, p) - evaluate_matrix(e, t - h, p)) / (2 * h);
      const CMatrix Ep = (evaluate_matrix(e, t, p + h) - evaluate_matrix(e, t, p - h)) / (2 * h);
      total += w * (2.0 * kPi / np) * (E * (Et * Ep - Ep * Et)).trace();
    }
  }
  return (cplx(0.0, 1.0) / (2.0 * kPi) * total).real();
}

double symbol_rank(const SymbolMatrix& e) {
  check_square(e);
  Symbol tr(0);
  for (std::size_t i = 0; i < e.size(); ++i) tr += e[i][i];
  const KahlerModel model = KahlerModel::cp1();
  return integrate(tr, model).real() / model.area;
}

LiftedIdempotent lift_idempotent(const SymbolMatrix& e, const std::vector<int>& Ns, double gap_tol) {
  check_square(e);
  if (pointwise_idempotency_defect(e) > 1e-10) {
    throw InvalidArgument("lift_idempotent: symbol is not pointwise idempotent");
  }
  const int m = static_cast<int>(e.size());
  bool hermitian = true;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if ((e[i][j] - e[j][i].conj()).pruned(1e-14).band2() >= 0) hermitian = false;

  LiftedIdempotent L;
  L.limit_symbol = e;
  for (int N : sorted_unique(Ns)) {
    const int n = N + 1;
    CMatrix a = CMatrix::Zero(m * n, m * n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a.block(i * n, j * n, n, n) = toeplitz(e[i][j], N).matrix.entries;
    CMatrix p;
    double gap = INFINITY;
    if (hermitian) {
      const HermitianEigen es = hermitian_eigen(a, 1e-9);
      std::vector<int> keep;
      for (int k = 0; k < es.eigenvalues.size(); ++k) {
        gap = std::min(gap, std::abs(es.eigenvalues(k) - 0.5));
        if (es.eigenvalues(k) > 0.5) keep.push_back(k);
      }
      CMatrix U(m * n, keep.size());
      for (std::size_t c = 0; c < keep.size(); ++c) U.col(c) = es.eigenvectors.col(keep[c]);
      p = U * U.adjoint();
    } else {
      Eigen::ComplexEigenSolver<CMatrix> es(a);
      const CVector& lam = es.eigenvalues();
      CVector sel(lam.size());
      for (int k = 0; k < lam.size(); ++k) {
        gap = std::min(gap, std::abs(lam(k) - 0.5));
        sel(k) = lam(k).real() > 0.5 ? 1.0 : 0.0;
      }
      const CMatrix& Vm = es.eigenvectors();
      p = Vm * sel.asDiagonal() * Vm.partialPivLu().inverse();
    }
    if (gap < gap_tol) {
      throw RegimeError("lift_idempotent: eigenvalue within " + std::to_string(gap_tol) +
                        " of 1/2", N);
    }
    const SpaceTag tag{"H_" + std::to_string(N) + "^" + std::to_string(m), m * n};
    L.idempotency_defect[N] = operator_norm(p * p - p);
    L.symbol_distance[N] = operator_norm(a - p);
    L.gap[N] = gap;
    L.trace[N] = p.trace().real();
    L.per_N.emplace(N, DenseMatrix(std::move(p), tag, tag));
  }
  return L;
}

TraceCheck idempotent_trace_check(const SymbolMatrix& e, const std::vector<int>& Ns) {
  const LiftedIdempotent L = lift_idempotent(e, Ns);
  TraceCheck tc;
  tc.chern_degree = static_cast<int>(std::lround(chern_weil_degree(e)));
  const int r = static_cast<int>(std::lround(symbol_rank(e)));
  // The row module of e quantizes V = (Im e)^*, of degree -deg(Im e).
  tc.poly = rank_polynomial(r, -tc.chern_degree);
  std::map<int, long long> dev;
  std::vector<int> sorted;
  for (const auto& [N, t] : L.trace) {
    const long long pv = tc.poly(N);
    tc.rows.push_back({N, t, pv});
    sorted.push_back(N);
    if (std::abs(t - static_cast<double>(pv)) > 1e-6) dev[N] = 1;
  }
  tc.n_star = threshold_from(sorted, dev);
  return tc;
}

std::vector<SpinorRow> spinor_rank_gap(const std::vector<int>& Ns) {
  const QuantizedModule plus = rank_sequence(BundleSpec::line(-1), Ns, true);
  const QuantizedModule minus = rank_sequence(BundleSpec::line(1), Ns, true);
  std::vector<SpinorRow> rows;
  for (int N : plus.Ns) {
    const int rp = plus.ranks.at(N), rm = minus.ranks.at(N);
    rows.push_back({N, rp, rm, rp - rm, 2 * (N + 1)});
  }
  return rows;
}

}  // namespace blab
