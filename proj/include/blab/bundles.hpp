#pragma once

// Vector bundles V = sum_i O(p_i) over CP^1, optionally with a bounded
// potential added to the round equivariant connection, and the spin-weighted
// mode spaces in which sections of V* (x) L_N and their (0,1)-forms live.
//
// Summand i of V* (x) L_N is O(N - p_i). Its degree-0 sections have spin
// (N - p_i)/2, its degree-1 forms spin (N - p_i)/2 + 1.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blab/geometry.hpp"

namespace blab {

/// Endomorphism-valued potential in the Dolbeault operator. Keys are
/// (to, from) summand indices.
///  dbar: degree-0 summand `from` -> degree-1 summand `to`,
///        spin2 = p_from - p_to + 2;
///  del:  degree-1 summand `from` -> degree-0 summand `to`,
///        spin2 = p_from - p_to - 2.
/// An absent `del` means the compatible choice del = dbar^dagger, which makes
/// the Dolbeault operator self-adjoint.
struct Potential {
  using Block = std::pair<int, int>;
  std::map<Block, SpinField> dbar;
  std::optional<std::map<Block, SpinField>> del;

  bool compatible() const { return !del.has_value(); }
  bool is_zero() const;
  int band2() const;
};

struct BundleSpec {
  std::vector<int> degrees;
  std::optional<Potential> potential;
  std::string label;

  static BundleSpec line(int p);
  static BundleSpec sum(std::vector<int> degrees);

  int rank() const { return static_cast<int>(degrees.size()); }
  int total_degree() const;
  int max_abs_degree() const;
  /// True when the connection is the round one (no or zero potential).
  bool holomorphic_round() const { return !potential || potential->is_zero(); }
  bool self_adjoint() const { return !potential || potential->compatible(); }
  /// Same bundle with the potential removed.
  BundleSpec round() const;
  std::string display_label() const;
  /// Throws InvalidArgument on empty degrees, bad indices or spin mismatch.
  void validate() const;

  /// Resolved potential entries (zero fields of the right spin when absent).
  SpinField alpha(int to, int from) const;
  SpinField beta(int to, int from) const;
};

int alpha_spin2(const std::vector<int>& degrees, int to, int from);
int beta_spin2(const std::vector<int>& degrees, int to, int from);

/// Pointwise sup of the operator norm of an r x r matrix of fields,
/// entries[to][from].
SupNorm matrix_field_sup_norm(const std::vector<std::vector<SpinField>>& entries);

/// sup_x max(|alpha(x)|, |beta(x)|).
double potential_sup_norm(const BundleSpec& V);
/// The same for the difference of two potentials on one bundle.
double potential_difference_sup_norm(const BundleSpec& V, const BundleSpec& W);

nlohmann::json to_json(const BundleSpec& V);
/// Reads {"degrees": [...], "potential": {"dbar": [[to, from, j, m, re, im]],
/// "del": [...]} | null, "label": "..."}; j, m may be half-integers.
BundleSpec bundle_from_json(const nlohmann::json& j);

/// Seeded random potential with every allowed mode up to j <= band,
/// scaled so that its coefficient norm per block equals `scale`.
/// When `compatible` is false an independent `del` part is drawn as well.
Potential random_potential(const std::vector<int>& degrees, int band, double scale,
                           unsigned seed, bool compatible = true);

// ---------------------------------------------------------------------------
// Mode spaces

struct ModeLabel {
  int degree;   // 0 or 1
  int summand;
  int s2, j2, m2;
};

/// Truncated spin-weighted mode space of degree-0 (+) degree-1 sections of
/// V* (x) L_N, cut at 2j <= 2*lmax + 1. Layout: all degree-0 blocks in
/// summand order, then all degree-1 blocks. The basis is orthonormal in the
/// model inner product.
class AmbientSpace {
 public:
  AmbientSpace() = default;
  AmbientSpace(std::vector<int> degrees, int N, int lmax);

  int N() const { return N_; }
  int lmax() const { return lmax_; }
  const std::vector<int>& degrees() const { return degrees_; }
  int rank() const { return static_cast<int>(degrees_.size()); }
  int size() const { return size_; }
  int n_degree0() const { return n0_; }
  int n_degree1() const { return size_ - n0_; }

  const SpinBlock& block(int degree, int summand) const;
  int offset(int degree, int summand) const;
  int index(int degree, int summand, int j2, int m2) const;  // -1 if absent
  ModeLabel label(int idx) const;
  SpaceTag tag() const;
  bool operator==(const AmbientSpace& o) const {
    return degrees_ == o.degrees_ && N_ == o.N_ && lmax_ == o.lmax_;
  }

 private:
  std::vector<int> degrees_;
  int N_ = 0, lmax_ = 0, size_ = 0, n0_ = 0;
  std::vector<SpinBlock> blocks_;  // [degree * rank + summand]
  std::vector<int> offsets_;
};

/// Basis of a subspace of an ambient mode space; columns of `vectors` are
/// ambient coefficient vectors.
struct HilbertBasis {
  SpaceTag tag;
  AmbientSpace ambient;
  CMatrix vectors;
  CMatrix gram;  // vectors^* vectors (ambient basis is orthonormal)
  bool orthonormal = true;
  int dim_degree0 = 0;
  int dim_degree1 = 0;

  int dim() const { return static_cast<int>(vectors.cols()); }
  double gram_condition() const;
};

/// Orthonormal basis of H_N = holomorphic sections of O(N): the j = N/2
/// multiplet of spin N/2, ordered by k = j + m = 0..N.
HilbertBasis h_space(int N);

/// Default basis cutoff for (V, N): ceil((N + max|p|)/2) + potential band + margin.
int recommended_lmax(const BundleSpec& V, int N, int margin = 4);

/// Kernel space of the twisted Dolbeault operator. Closed form for round
/// connections; numerical kernel otherwise (lmax < 0 picks the default).
HilbertBasis e_space(const BundleSpec& V, int N, int lmax = -1);

/// Holomorphic section count sum_i max(0, N - p_i + 1).
int holomorphic_count(const std::vector<int>& degrees, int N);
/// dim H^1 = sum_i max(0, p_i - N - 1): the degree-1 part of the kernel of a
/// round connection.
int antiholomorphic_count(const std::vector<int>& degrees, int N);

/// A section of V: component i has spin p_i/2.
struct SectionOfV {
  std::vector<SpinField> components;

  static SectionOfV scalar(const Symbol& f) { return {{f}}; }
  static SectionOfV random(const std::vector<int>& degrees, int band2, unsigned seed);
  void check(const std::vector<int>& degrees) const;
  int band2() const;
};

SupNorm section_sup_norm(const SectionOfV& v);

/// Degree-0 component of an ambient vector on summand i, as a field.
SpinField degree0_component(const AmbientSpace& amb, const CVector& psi, int summand);

/// Pointwise contraction v . psi_0, a section of L_N (spin N/2).
SpinField pair_section(const SectionOfV& v, const AmbientSpace& amb, const CVector& psi);

/// Matrix of psi -> Pi_N(v . psi_0) from the ambient space to H_N.
CMatrix contraction_matrix(const SectionOfV& v, const AmbientSpace& amb);

}  // namespace blab
