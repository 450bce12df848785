#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "blab/dolbeault.hpp"

using namespace blab;

namespace {

// Eigenvalues of D^2 on one spin-s block, kappa = 1, each with multiplicity
// 2j + 1, for 2|s| <= 2j <= jmax2: edth_bar edth gives (j - s)(j + s + 1) on
// degree 0, edth edth_bar gives (j + s)(j - s + 1) on degree 1.
std::vector<double> round_block_spectrum(int s2, int jmax2, bool degree1) {
  std::vector<double> v;
  for (int j2 = std::abs(s2); j2 <= jmax2; j2 += 2) {
    const double j = j2 / 2.0, s = degree1 ? -s2 / 2.0 : s2 / 2.0;
    for (int k = 0; k <= j2; ++k) v.push_back((j - s) * (j + s + 1));
  }
  std::sort(v.begin(), v.end());
  return v;
}

BundleSpec perturbed(std::vector<int> degrees, int band, double scale, unsigned seed,
                     bool compatible) {
  BundleSpec V = BundleSpec::sum(std::move(degrees));
  V.potential = random_potential(V.degrees, band, scale, seed, compatible);
  return V;
}

}  // namespace

TEST_CASE("round line bundles: D^2 spectrum in closed form") {
  for (int p : {-2, 0, 1, 3}) {
    for (int N : {2, 5}) {
      const BundleSpec V = BundleSpec::line(p);
      const int lmax = recommended_lmax(V, N);
      const DolbeaultOperator D = build_dolbeault(V, N, lmax);
      const D2Spectrum s = spectrum_d2(D);
      const std::vector<double> want0 = round_block_spectrum(N - p, 2 * lmax + 1, false);
      const std::vector<double> want1 = round_block_spectrum(N - p + 2, 2 * lmax + 1, true);
      REQUIRE(s.degree0.size() == want0.size());
      REQUIRE(s.degree1.size() == want1.size());
      for (std::size_t i = 0; i < want0.size(); ++i) CHECK(s.degree0[i] == doctest::Approx(want0[i]).epsilon(1e-10));
      for (std::size_t i = 0; i < want1.size(); ++i) CHECK(s.degree1[i] == doctest::Approx(want1[i]).epsilon(1e-10));
      CHECK(s.real);
    }
  }
}

TEST_CASE("Weitzenbock constant for round and perturbed connections") {
  CHECK(weitzenbock_constant(BundleSpec::line(0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(weitzenbock_constant(BundleSpec::sum({2, -3})) == doctest::Approx(3.0));
  CHECK(skew_part_norm(BundleSpec::line(1)) == 0.0);
  const BundleSpec V = perturbed({1, -1}, 1, 0.3, 3, true);
  CHECK(skew_part_norm(V) < 1e-12);
  CHECK(skew_part_norm(perturbed({1, -1}, 1, 0.3, 3, false)) > 0.01);
}

TEST_CASE("spectral gap is at least N - C for compatible potentials") {
  const BundleSpec V = perturbed({1, -1}, 2, 0.4, 17, true);
  const double C = weitzenbock_constant(V);
  for (int N : {4, 6, 9}) {
    const DolbeaultOperator D = build_dolbeault(V, N, recommended_lmax(V, N));
    CHECK((D.block10.entries - D.block01.entries.adjoint()).norm() < 1e-14);
    const D2Spectrum s = spectrum_d2(D);
    const SpectralProjector P = kernel_projector(D);
    CHECK(spectral_gap(s, P.threshold) >= N - C - 1e-9);
    CHECK(P.rank == holomorphic_count(V.degrees, N));
  }
}

TEST_CASE("Riesz projector of a non-self-adjoint operator") {
  const BundleSpec V = perturbed({1, -1}, 1, 0.3, 21, false);
  const int N = 6;
  const DolbeaultOperator D = build_dolbeault(V, N, recommended_lmax(V, N));
  CHECK(!D.self_adjoint);
  const SpectralProjector P = kernel_projector(D);
  const CMatrix& p = P.matrix.entries;
  const int n0 = D.ambient.n_degree0(), n1 = D.ambient.n_degree1();
  CMatrix D2 = CMatrix::Zero(n0 + n1, n0 + n1);
  D2.topLeftCorner(n0, n0) = D.square_degree0();
  D2.bottomRightCorner(n1, n1) = D.square_degree1();
  CHECK((p * p - p).norm() < 1e-9);
  CHECK((p * D2 - D2 * p).norm() < 1e-8 * D2.norm());
  CHECK(std::abs(p.trace().real() - P.rank) < 1e-9);
  CHECK(!P.orthogonal);
  // The kernel of D^2 near zero is the kernel of D: D annihilates the image.
  CHECK((D.full() * P.range).norm() < 1e-8);
  // More contour nodes do not move the projector.
  const SpectralProjector Q = kernel_projector(D, std::nullopt, 96);
  CHECK((Q.matrix.entries - p).norm() < 1e-10);
}

TEST_CASE("kernel projector refuses an eigenvalue on the threshold") {
  const int N = 4;
  const DolbeaultOperator D = build_dolbeault(BundleSpec::line(0), N, recommended_lmax(BundleSpec::line(0), N));
  // First nonzero eigenvalue of the round trivial bundle is N + 2.
  CHECK_THROWS_AS(kernel_projector(D, double(N + 2)), RegimeError);
  CHECK_THROWS_AS(kernel_projector(D, -1.0), InvalidArgument);
  CHECK_THROWS_AS(build_dolbeault(BundleSpec::line(0), 0, 3), InvalidArgument);
}

TEST_CASE("low cutoff is flagged") {
  const BundleSpec V = BundleSpec::line(0);
  REQUIRE(recommended_lmax(V, 6) > 4);
  const DolbeaultOperator D = build_dolbeault(V, 6, 4);
  CHECK(!D.warnings.empty());
  // Degree 1 of O(0) at N = 6 has spin 4: lmax 3 cannot hold it.
  CHECK_THROWS_AS(build_dolbeault(V, 6, 3), InvalidArgument);
  CHECK(build_dolbeault(V, 6, recommended_lmax(V, 6)).warnings.empty());
}

TEST_CASE("kernel degree split for a non-self-adjoint potential") {
  const BundleSpec V = perturbed({1, -1}, 1, 0.3, 8, false);
  for (int N : {4, 7}) {
    const KernelSplit k = kernel_degree_split(build_dolbeault(V, N, recommended_lmax(V, N)));
    CHECK(k.in_regime);
    CHECK(k.dim_degree1 == 0);
    CHECK(k.dim_degree0 == holomorphic_count(V.degrees, N));
    CHECK(k.min_psi0 > 1e-6);
  }
}

TEST_CASE("projector distance against the contour bound") {
  const BundleSpec W = BundleSpec::sum({1, -1});
  BundleSpec V = W;
  V.potential = random_potential(W.degrees, 1, 0.2, 4, true);
  for (int N : {8, 16}) {
    const ProjectorDistance d = projector_distance(V, W, N);
    CHECK(d.applicable);
    CHECK(d.measured > 0.0);
    CHECK(d.measured <= d.contour_bound);
    CHECK(d.bound == doctest::Approx(2.0 * d.A_norm / std::sqrt(N - d.C) /
                                     (0.5 * std::sqrt(N - d.C) - d.A_norm)));
  }
  CHECK(projector_distance(W, W, 6).measured < 1e-12);
}
