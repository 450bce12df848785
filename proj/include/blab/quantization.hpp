#pragma once

// Toeplitz and geometric quantization of symbols and sections, with the
// convergence diagnostics built on them.

#include <vector>

#include "blab/bundles.hpp"
#include "blab/dolbeault.hpp"

namespace blab {

enum class Origin { toeplitz, geometric, product, lifted };

struct QuantOperator {
  DenseMatrix matrix;
  int N = 0;
  Origin origin = Origin::toeplitz;
};

/// T_N(f) = Pi_N f on H_N.
QuantOperator toeplitz(const Symbol& f, int N);

/// T_N^V(v) : E_N^V -> H_N, psi -> Pi_N (v . psi).
QuantOperator toeplitz_module(const SectionOfV& v, const HilbertBasis& E);
QuantOperator toeplitz_module(const SectionOfV& v, const BundleSpec& V, int N);

enum class GqPath { tuynman, definition };

/// Q_N(f). The Tuynman path is T_N(f + Lap f / 2N); the definition path
/// evaluates Pi_N (f - (i/N) pi(df, nabla)) on holomorphic sections, which
/// on CP^1 reads T_N(f) + (kappa^2/N) Pi_N (edth f)(edth_bar psi).
QuantOperator geometric(const Symbol& f, int N, GqPath path = GqPath::tuynman);

/// Q_N^V(v) = T_N^V(v - (kappa^2/N) edth_bar edth v) for round connections.
QuantOperator geometric_module(const SectionOfV& v, const BundleSpec& V, int N);
/// (kappa^2/N) sup |edth_bar edth v|, the bound on |Q_N^V(v) - T_N^V(v)|.
double geometric_module_bound(const SectionOfV& v, int N);

struct DefectBound {
  double defect = 0.0;
  double bound = 0.0;
};

/// |T(f)T(g) - T(fg)| against sqrt2 (N-C)^{-1/2} |grad f| |g|.
DefectBound multiplicativity_defect(const Symbol& f, const Symbol& g, int N);
/// |T(f)T^V(v) - T^V(fv)| against sqrt2 (N-C)^{-1/2} |grad f| |v|.
DefectBound module_covariance_defect(const Symbol& f, const SectionOfV& v, const BundleSpec& V,
                                     int N);
/// |[f, Pi_N]| on the truncated ambient space of spin N/2 fields.
DefectBound commutator_projector_bound(const Symbol& f, int N);

/// |Q_N(f) via definition - Q_N(f) via Tuynman|.
double tuynman_residual(const Symbol& f, int N);

/// |Q_N(f) - T_N(f)| against lambda_max(f) / (2N) * sum_l sup|f_l|.
DefectBound gq_toeplitz_gap(const Symbol& f, int N);

struct NormRow {
  int N;
  double norm;
};

struct NormTable {
  std::vector<NormRow> rows;
  double sup_f = 0.0;
  double final_gap = 0.0;
  bool monotone = true;
};

NormTable norm_convergence(const Symbol& f, const std::vector<int>& Ns);

cplx normalized_trace(const QuantOperator& op);

struct TraceFit {
  double leading = 0.0;    // fitted coefficient of N in tr T_N(f)
  double intercept = 0.0;
  double target = 0.0;     // (1/2pi) integral of f omega
};

TraceFit trace_asymptotics(const Symbol& f, const std::vector<int>& Ns);

/// Dimension of span{T_N(Y_lm) : l <= N}.
int toeplitz_image_dimension(int N);

}  // namespace blab
