#pragma once

// Quantized modules: rank bookkeeping, morphisms, the comparator between two
// connections on one bundle, idempotent lifting and K_0 classes.

#include <map>
#include <optional>
#include <vector>

#include "blab/quantization.hpp"

namespace blab {

/// c0 + c1 N, with the Chern data it came from.
struct RankPolynomial {
  long long c0 = 0;
  long long c1 = 0;
  int r = 0;  // rank of V
  int d = 0;  // total degree of V

  long long operator()(long long N) const { return c0 + c1 * N; }
  RankPolynomial operator+(const RankPolynomial& o) const {
    return {c0 + o.c0, c1 + o.c1, r + o.r, d + o.d};
  }
  bool operator==(const RankPolynomial& o) const { return c0 == o.c0 && c1 == o.c1; }
};

/// rk V_N = r (N + 1) - d: integral of ch(V*) td(TM) e^{N omega / 2 pi} with
/// the trivial bundle fixing every sign.
RankPolynomial rank_polynomial(int r, int d);

struct QuantizedModule {
  BundleSpec bundle;
  std::vector<int> Ns;
  std::map<int, int> ranks;
  std::map<int, int> ranks_degree1;
  RankPolynomial poly;
  std::optional<int> n_star;              // measured == poly for all N >= n_star
  std::map<int, long long> deviations;    // measured - poly where nonzero
};

/// Measured dim E_N^V per N. `numerical` forces the Dolbeault kernel even for
/// round connections.
QuantizedModule rank_sequence(const BundleSpec& V, std::vector<int> Ns, bool numerical = false);

struct K0Class {
  RankPolynomial poly;
  std::map<int, long long> finite;

  static K0Class from_module(const QuantizedModule& m);
  nlohmann::json to_json() const;
  static K0Class from_json(const nlohmann::json& j);
};

bool k0_equal_mod_finite(const K0Class& a, const K0Class& b);

/// phi: constant (rank W) x (rank V) matrix, a bundle map V -> W.
/// Throws InvalidArgument unless phi intertwines the connections.
void check_covariantly_constant(const CMatrix& phi, const BundleSpec& V, const BundleSpec& W);

/// Matrix of phi^* : E_N^W -> E_N^V in orthonormal kernel bases; the induced
/// module map is t -> t * phi^*.
DenseMatrix morphism_pushforward(const CMatrix& phi, const BundleSpec& V, const BundleSpec& W,
                                 int N);

/// |T^W(phi v) - T^V(v) phi^*|.
double intertwining_residual(const CMatrix& phi, const SectionOfV& v, const BundleSpec& V,
                             const BundleSpec& W, int N);

struct Comparator {
  DenseMatrix u;             // Pi^V restricted to E^W, in kernel bases
  bool bijective = false;    // square and smallest singular value > margin
  double smallest_sv = 0.0;
  double residual = 0.0;     // |T^V(v) u - T^W(v)|
  double projector_distance = 0.0;
};

Comparator comparator(const BundleSpec& V, const BundleSpec& W, int N, const SectionOfV& v,
                      double margin = 0.1);

using SymbolMatrix = std::vector<std::vector<Symbol>>;

SymbolMatrix identity_projector(int m);
/// Rank-1 projector onto the tautological line, degree 1 over S^2.
SymbolMatrix bott_projector();
SymbolMatrix direct_sum(const SymbolMatrix& a, const SymbolMatrix& b);

/// sup_x |e(x)^2 - e(x)|.
double pointwise_idempotency_defect(const SymbolMatrix& e);
/// (i/2pi) integral of tr(e de ^ de), oriented by dtheta ^ dphi; computed by
/// finite differences on a fine grid.
double chern_weil_degree(const SymbolMatrix& e);
/// Pointwise rank tr e(x), averaged over the sphere.
double symbol_rank(const SymbolMatrix& e);

struct LiftedIdempotent {
  SymbolMatrix limit_symbol;
  std::map<int, DenseMatrix> per_N;
  std::map<int, double> idempotency_defect;  // |e_N^2 - e_N|
  std::map<int, double> symbol_distance;     // |T_N(e) - e_N|
  std::map<int, double> gap;                 // min |lambda - 1/2| of T_N(e)
  std::map<int, double> trace;
};

LiftedIdempotent lift_idempotent(const SymbolMatrix& e, const std::vector<int>& Ns,
                                 double gap_tol = 1e-6);

struct TraceRow {
  int N;
  double trace;
  long long poly;
};

struct TraceCheck {
  std::vector<TraceRow> rows;
  RankPolynomial poly;
  int chern_degree = 0;  // degree of the line field Im e
  std::optional<int> n_star;
};

TraceCheck idempotent_trace_check(const SymbolMatrix& e, const std::vector<int>& Ns);

struct SpinorRow {
  int N;
  int rk_plus;
  int rk_minus;
  int gap;
  int kernel_bound;  // |chi| dim H_N
};

/// S+ = O(-1) = K^{1/2}, S- = O(1); ranks from the numerical Dolbeault kernel.
std::vector<SpinorRow> spinor_rank_gap(const std::vector<int>& Ns);

}  // namespace blab
