#pragma once

// The V* (x) L_N twisted Dolbeault operator on CP^1, assembled in the
// spin-weighted mode basis of AmbientSpace.
//
//   D01 = kappa * edth + alpha        (degree 0 -> degree 1)
//   D10 = -kappa * edth_bar + beta    (degree 1 -> degree 0)
//
// With no potential D10 = D01^dagger and D^2 acts on the multiplet j of
// summand i with eigenvalue kappa^2 (j - s)(j + s + 1), s = (N - p_i)/2.

#include <optional>
#include <string>
#include <vector>

#include "blab/bundles.hpp"

namespace blab {

struct DolbeaultOperator {
  BundleSpec bundle;
  int N = 0;
  int lmax = 0;
  AmbientSpace ambient;
  DenseMatrix block01;         // degree-0 -> degree-1, full operator
  DenseMatrix block10;         // degree-1 -> degree-0, full operator
  DenseMatrix potential_part;  // alpha contribution to block01
  DenseMatrix potential_part10;  // beta contribution to block10
  bool self_adjoint = true;
  std::vector<int> grading;    // degree of each ambient basis vector
  std::vector<std::string> warnings;

  /// The odd operator on degree-0 (+) degree-1.
  CMatrix full() const;
  /// D^2 restricted to degree 0 (D10 D01) and degree 1 (D01 D10).
  CMatrix square_degree0() const;
  CMatrix square_degree1() const;
};

DolbeaultOperator build_dolbeault(const BundleSpec& V, int N, int lmax,
                                  const KahlerModel& model = KahlerModel::cp1());

struct D2Spectrum {
  std::vector<double> values;  // ascending; real parts in the general case
  std::vector<double> degree0;
  std::vector<double> degree1;
  bool real = true;              // false when D is not self-adjoint
  double max_imag = 0.0;
};

D2Spectrum spectrum_d2(const DolbeaultOperator& D);

/// Smallest eigenvalue of D^2 above `floor` (the first nonzero one for
/// floor ~ N/2).
double spectral_gap(const D2Spectrum& s, double floor);

/// C = sup_x |K(x)| with K = -kappa^2 diag(p) + kappa (edth_bar a + edth b)
/// + (a b - b a), computed from the compatible part (a, b = a^dagger) of the
/// connection. Then the spectrum of D^2 lies in {0} u [N - C, inf) in the self-adjoint case.
double weitzenbock_constant(const BundleSpec& V, const KahlerModel& model = KahlerModel::cp1());

/// |B| = sup_x |(alpha - beta^dagger)(x)| / 2, the anti-self-adjoint part.
double skew_part_norm(const BundleSpec& V);

struct SpectralProjector {
  DenseMatrix matrix;
  std::string target = "kernel";
  int rank = 0;
  bool orthogonal = true;
  double threshold = 0.0;
  double below = 0.0;  // largest |eigenvalue| captured
  double above = 0.0;  // smallest |eigenvalue| excluded
  CMatrix range;       // orthonormal basis of the image, degree-0 columns first
  int range_degree0 = 0;
};

/// Projector onto the invariant subspace of D^2 for eigenvalues of modulus
/// below `threshold` (default N/2, or 1/2 for round connections). Orthogonal in the self-adjoint case;
/// otherwise a Riesz projector from a trapezoidal contour integral with
/// `contour_nodes` nodes. Throws RegimeError when an eigenvalue sits too
/// close to the threshold.
SpectralProjector kernel_projector(const DolbeaultOperator& D,
                                   std::optional<double> threshold = std::nullopt,
                                   int contour_nodes = 64);

struct KernelSplit {
  int dim_degree0 = 0;
  int dim_degree1 = 0;
  double min_psi0 = 0.0;  // min over kernel unit vectors of |degree-0 part|
  double C = 0.0;
  double B_norm = 0.0;
  bool in_regime = true;  // N > C + |B|^2
  std::string flag;       // "outside guaranteed regime" when not
};

KernelSplit kernel_degree_split(const DolbeaultOperator& D);

struct ProjectorDistance {
  double measured = 0.0;
  double bound = 0.0;            // 2|A| (N-C)^{-1/2} / (sqrt(N-C)/2 - |A|)
  double contour_bound = 0.0;    // |A| / (sqrt(N-C)/2 - |A|)
  bool applicable = false;       // N > C + 4 |A|^2
  double A_norm = 0.0;
  double C = 0.0;
};

/// V and W share degrees; W is the self-adjoint reference.
ProjectorDistance projector_distance(const BundleSpec& V, const BundleSpec& W, int N,
                                     int lmax = -1);

}  // namespace blab
