#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "blab/quantization.hpp"

namespace blab {

namespace {

SpaceTag h_tag(int N) { return {"H_" + std::to_string(N), N + 1}; }

SpinBlock h_block(int N) { return SpinBlock{N, N, N}; }

void require_scalar(const Symbol& f, const char* who) {
  if (f.band2() >= 0 && f.spin2() != 0) {
    throw InvalidArgument(std::string(who) + ": expects a scalar symbol");
  }
}

void require_N(int N, const char* who) {
  if (N < 1) throw InvalidArgument(std::string(who) + ": N must be positive");
}

double gradient_bound(double grad, double other, int N, double C) {
  if (N <= C) return std::numeric_limits<double>::infinity();
  return std::sqrt(2.0) / std::sqrt(N - C) * grad * other;
}

}  // namespace

QuantOperator toeplitz(const Symbol& f, int N) {
  require_scalar(f, "toeplitz");
  require_N(N, "toeplitz");
  CMatrix M = f.band2() < 0 ? CMatrix::Zero(N + 1, N + 1)
                            : f.matrix(h_block(N), h_block(N));
  return {DenseMatrix(std::move(M), h_tag(N), h_tag(N)), N, Origin::toeplitz};
}

QuantOperator toeplitz_module(const SectionOfV& v, const HilbertBasis& E) {
  const int N = E.ambient.N();
  CMatrix M = contraction_matrix(v, E.ambient) * E.vectors;
  return {DenseMatrix(std::move(M), h_tag(N), E.tag), N, Origin::toeplitz};
}

QuantOperator toeplitz_module(const SectionOfV& v, const BundleSpec& V, int N) {
  require_N(N, "toeplitz_module");
  v.check(V.degrees);
  return toeplitz_module(v, e_space(V, N));
}

QuantOperator geometric(const Symbol& f, int N, GqPath path) {
  require_scalar(f, "geometric");
  require_N(N, "geometric");
  const KahlerModel model = KahlerModel::cp1();
  if (path == GqPath::tuynman) {
    QuantOperator q = toeplitz(f + laplacian(f, model) * (1.0 / (2.0 * N)), N);
    q.origin = Origin::geometric;
    return q;
  }
  // edth_bar of the basis section sY_{s,m} (s = j = N/2) is -sqrt(N) (s-1)Y_{s,m}.
  QuantOperator q = toeplitz(f, N);
  const SpinField df = f.band2() < 0 ? SpinField(2) : f.edth();
  if (df.band2() >= 0) {
    const double kappa = model.kappa();
    const CMatrix corr = df.matrix(h_block(N), SpinBlock{N - 2, N, N});
    q.matrix.entries += (kappa * kappa / N) * (-std::sqrt(double(N))) * corr;
  }
  q.origin = Origin::geometric;
  return q;
}

namespace {

SectionOfV second_derivative(const SectionOfV& v) {
  SectionOfV w;
  for (const auto& c : v.components)
    w.components.push_back(c.band2() < 0 ? SpinField(c.spin2()) : c.edth().edth_bar());
  return w;
}

}  // namespace

QuantOperator geometric_module(const SectionOfV& v, const BundleSpec& V, int N) {
  require_N(N, "geometric_module");
  if (!V.holomorphic_round()) {
    throw InvalidArgument("geometric_module: only round connections are supported");
  }
  v.check(V.degrees);
  const double k2 = std::pow(KahlerModel::cp1().kappa(), 2);
  const SectionOfV dd = second_derivative(v);
  SectionOfV w;
  for (std::size_t i = 0; i < v.components.size(); ++i) {
    SpinField c = v.components[i];
    if (dd.components[i].band2() >= 0) c = SpinField(c.spin2()) + c + dd.components[i] * (-k2 / N);
    w.components.push_back(c);
  }
  QuantOperator q = toeplitz_module(w, V, N);
  q.origin = Origin::geometric;
  return q;
}

double geometric_module_bound(const SectionOfV& v, int N) {
  require_N(N, "geometric_module_bound");
  const double k2 = std::pow(KahlerModel::cp1().kappa(), 2);
  return k2 / N * section_sup_norm(second_derivative(v)).value;
}

DefectBound multiplicativity_defect(const Symbol& f, const Symbol& g, int N) {
  require_scalar(f, "multiplicativity_defect");
  require_scalar(g, "multiplicativity_defect");
  const CMatrix lhs = toeplitz(f, N).matrix.entries * toeplitz(g, N).matrix.entries;
  const CMatrix rhs = toeplitz(f.multiply(g), N).matrix.entries;
  const double C = weitzenbock_constant(BundleSpec::line(0));
  return {operator_norm(lhs - rhs),
          gradient_bound(gradient_sup_norm(f).value, sup_norm(g).value, N, C)};
}

DefectBound module_covariance_defect(const Symbol& f, const SectionOfV& v, const BundleSpec& V,
                                     int N) {
  require_scalar(f, "module_covariance_defect");
  v.check(V.degrees);
  const HilbertBasis E = e_space(V, N);
  SectionOfV fv;
  for (const auto& c : v.components)
    fv.components.push_back(c.band2() < 0 || f.band2() < 0 ? SpinField(c.spin2()) : f.multiply(c));
  const CMatrix lhs = toeplitz(f, N).matrix.entries * toeplitz_module(v, E).matrix.entries;
  const CMatrix rhs = toeplitz_module(fv, E).matrix.entries;
  const double C = weitzenbock_constant(V);
  return {operator_norm(lhs - rhs),
          gradient_bound(gradient_sup_norm(f).value, section_sup_norm(v).value, N, C)};
}

DefectBound commutator_projector_bound(const Symbol& f, int N) {
  require_scalar(f, "commutator_projector_bound");
  require_N(N, "commutator_projector_bound");
  const SpinBlock amb{N, N, N + 2 * std::max(f.band(), 0)};
  const int n = amb.size();
  const CMatrix M = f.band2() < 0 ? CMatrix::Zero(n, n) : f.matrix(amb, amb);
  CMatrix P = CMatrix::Zero(n, n);
  P.topLeftCorner(N + 1, N + 1).setIdentity();
  const double C = weitzenbock_constant(BundleSpec::line(0));
  return {operator_norm(M * P - P * M), gradient_bound(gradient_sup_norm(f).value, 1.0, N, C)};
}

double tuynman_residual(const Symbol& f, int N) {
  return operator_norm(geometric(f, N, GqPath::definition).matrix.entries -
                       geometric(f, N, GqPath::tuynman).matrix.entries);
}

DefectBound gq_toeplitz_gap(const Symbol& f, int N) {
  require_scalar(f, "gq_toeplitz_gap");
  const KahlerModel model = KahlerModel::cp1();
  const double gap =
      operator_norm(geometric(f, N).matrix.entries - toeplitz(f, N).matrix.entries);
  // Split f by degree l >= 1 and sum the sup norms of the pieces.
  std::map<int, Symbol> parts;
  for (const auto& [k, c] : f.coeffs()) {
    if (k.first == 0) continue;
    auto [it, ins] = parts.try_emplace(k.first, Symbol(0));
    it->second.set(k.first, k.second, c);
  }
  double scale = 0.0;
  int lmax = 0;
  for (const auto& [j2, part] : parts) {
    scale += sup_norm(part).value;
    lmax = std::max(lmax, j2 / 2);
  }
  return {gap, model.laplace_eigenvalue(lmax) / (2.0 * N) * scale};
}

NormTable norm_convergence(const Symbol& f, const std::vector<int>& Ns) {
  NormTable t;
  t.sup_f = sup_norm(f).value;
  double prev = -1.0;
  for (int N : Ns) {
    const double n = operator_norm(toeplitz(f, N).matrix.entries);
    t.rows.push_back({N, n});
    if (n < prev - 1e-12) t.monotone = false;
    prev = n;
  }
  if (!t.rows.empty()) t.final_gap = std::abs(t.rows.back().norm - t.sup_f);
  return t;
}

cplx normalized_trace(const QuantOperator& op) {
  const auto& M = op.matrix.entries;
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw InvalidArgument("normalized_trace: operator must be square and nonempty");
  }
  return M.trace() / static_cast<double>(M.rows());
}

TraceFit trace_asymptotics(const Symbol& f, const std::vector<int>& Ns) {
  if (Ns.size() < 2) throw InvalidArgument("trace_asymptotics: need at least two values of N");
  std::vector<double> x, y;
  for (int N : Ns) {
    x.push_back(N);
    y.push_back(toeplitz(f, N).matrix.entries.trace().real());
  }
  const auto [c0, c1] = linear_fit(x, y);
  TraceFit fit;
  fit.intercept = c0;
  fit.leading = c1;
  fit.target = integrate(f).real() / (2.0 * kPi);
  return fit;
}

int toeplitz_image_dimension(int N) {
  require_N(N, "toeplitz_image_dimension");
  const int n = N + 1;
  CMatrix S(n * n, n * n);
  int col = 0;
  for (int l = 0; l <= N; ++l)
    for (int m = -l; m <= l; ++m) {
      const CMatrix T = toeplitz(Symbol::ylm(l, m), N).matrix.entries;
      S.col(col++) = Eigen::Map<const CVector>(T.data(), n * n);
    }
  Eigen::BDCSVD<CMatrix> svd(S);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  return rank;
}

}  // namespace blab
