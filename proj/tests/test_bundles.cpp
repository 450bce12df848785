#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "blab/dolbeault.hpp"

using namespace blab;

TEST_CASE("bundle bookkeeping") {
  const BundleSpec V = BundleSpec::sum({2, -1, 0});
  CHECK(V.rank() == 3);
  CHECK(V.total_degree() == 1);
  CHECK(V.max_abs_degree() == 2);
  CHECK(V.holomorphic_round());
  CHECK(V.display_label() == "O(2)+O(-1)+O(0)");
  CHECK(alpha_spin2(V.degrees, 0, 1) == -1 - 2 + 2);
  CHECK(beta_spin2(V.degrees, 1, 0) == 2 + 1 - 2);
  CHECK_THROWS_AS(BundleSpec::sum({}), InvalidArgument);
}

TEST_CASE("potential validation") {
  BundleSpec V = BundleSpec::sum({1, -1});
  Potential p;
  p.dbar[{0, 1}] = SpinField::harmonic(0, 2, 0, 0.1);  // spin -1 - 1 + 2 = 0
  V.potential = p;
  CHECK_NOTHROW(V.validate());
  CHECK(V.self_adjoint());
  CHECK(!V.holomorphic_round());
  p.dbar[{1, 0}] = SpinField::harmonic(0, 2, 0, 0.1);  // needs spin 4/2
  V.potential = p;
  CHECK_THROWS_AS(V.validate(), InvalidArgument);
  p.dbar.erase({1, 0});
  p.dbar[{2, 0}] = SpinField::harmonic(0, 0, 0);
  V.potential = p;
  CHECK_THROWS_AS(V.validate(), InvalidArgument);
}

TEST_CASE("compatible potential: beta is the adjoint of alpha") {
  BundleSpec V = BundleSpec::sum({1, -1});
  V.potential = random_potential(V.degrees, 2, 0.3, 5, true);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const SpinField lhs = V.beta(a, b), rhs = V.alpha(b, a).conj();
      CHECK(lhs.spin2() == beta_spin2(V.degrees, a, b));
      CHECK((SpinField(lhs.spin2()) + lhs - rhs).coeff_norm() < 1e-15);
    }
  BundleSpec W = V;
  W.potential = random_potential(V.degrees, 2, 0.3, 5, false);
  CHECK(!W.self_adjoint());
  CHECK(potential_sup_norm(V) > 0.0);
  CHECK(potential_difference_sup_norm(V, V) == 0.0);
}

TEST_CASE("bundle json round trip, half-integer labels and errors") {
  const auto j = nlohmann::json::parse(R"({
    "degrees": [1, 0],
    "potential": {"dbar": [[0, 1, 0.5, 0.5, 0.2, 0.0]]},
    "label": "test"})");
  const BundleSpec V = bundle_from_json(j);
  CHECK(V.display_label() == "test");
  CHECK(std::abs(V.alpha(0, 1).coeff(1, 1) - cplx(0.2, 0)) < 1e-15);
  const BundleSpec W = bundle_from_json(to_json(V));
  CHECK(W.degrees == V.degrees);
  CHECK((W.alpha(0, 1) - V.alpha(0, 1)).coeff_norm() == 0.0);
  CHECK_THROWS_AS(bundle_from_json(nlohmann::json::parse(R"({"degrees": []})")), InvalidArgument);
  CHECK_THROWS_AS(bundle_from_json(nlohmann::json::parse(
                      R"({"degrees": [0], "potential": {"dbar": [[0, 0, 0.3, 0, 1, 0]]}})")),
                  InvalidArgument);
}

TEST_CASE("ambient space layout") {
  const AmbientSpace a({1, -1}, 4, 4);
  // Degree 0 spins (N - p)/2 = 3/2, 5/2; degree 1 spins 5/2, 7/2; 2j <= 9.
  CHECK(a.block(0, 0).s2 == 3);
  CHECK(a.block(1, 1).s2 == 7);
  const int n0 = (4 + 6 + 8 + 10) + (6 + 8 + 10);
  CHECK(a.n_degree0() == n0);
  CHECK(a.n_degree1() == (6 + 8 + 10) + (8 + 10));
  CHECK(a.offset(1, 0) == n0);
  const int idx = a.index(1, 1, 9, -3);
  const ModeLabel l = a.label(idx);
  CHECK(l.degree == 1);
  CHECK(l.summand == 1);
  CHECK(l.j2 == 9);
  CHECK(l.m2 == -3);
  CHECK(a.index(0, 0, 1, 1) == -1);
}

TEST_CASE("holomorphic sections: closed form and numerical kernel agree") {
  CHECK(h_space(7).dim() == 8);
  CHECK(holomorphic_count({2, -1, 5}, 3) == 2 + 5 + 0);
  CHECK(antiholomorphic_count({2, -1, 5}, 3) == 0 + 0 + 1);
  for (int N : {1, 3, 6}) {
    for (const auto& deg : std::vector<std::vector<int>>{{0}, {2}, {-1, 1}, {3}, {5, 0}}) {
      const BundleSpec V = BundleSpec::sum(deg);
      const HilbertBasis E = e_space(V, N);
      CHECK(E.dim_degree0 == holomorphic_count(deg, N));
      CHECK(E.dim_degree1 == antiholomorphic_count(deg, N));
      // The closed form agrees with the numerical kernel of D.
      const DolbeaultOperator D = build_dolbeault(V, N, recommended_lmax(V, N));
      const SpectralProjector P = kernel_projector(D);
      CHECK(P.rank == E.dim());
      CHECK(P.range_degree0 == E.dim_degree0);
      CHECK((D.full() * E.vectors).norm() < 1e-12);
      CHECK((E.gram - CMatrix::Identity(E.dim(), E.dim())).norm() < 1e-12);
    }
  }
}

TEST_CASE("contraction with the constant section is the identity on H_N") {
  const int N = 5;
  const HilbertBasis E = e_space(BundleSpec::line(0), N);
  const CMatrix M = contraction_matrix(SectionOfV::scalar(SpinField::constant(1.0)), E.ambient) * E.vectors;
  // The constant 1 in unit-sphere coefficients is sqrt(4 pi) Y_00.
  CHECK((M - CMatrix::Identity(N + 1, N + 1)).norm() < 1e-12);
}

TEST_CASE("sections of V") {
  const SectionOfV v = SectionOfV::random({2, -1}, 4, 9);
  CHECK_NOTHROW(v.check({2, -1}));
  CHECK_THROWS_AS(v.check({2, 0}), InvalidArgument);
  CHECK(v.components[0].spin2() == 2);
  CHECK(section_sup_norm(v).value > 0.0);
  const SectionOfV w = SectionOfV::random({2, -1}, 4, 9);
  CHECK(v.components[1] == w.components[1]);
}

TEST_CASE("recommended cutoff grows with N, degree and potential band") {
  BundleSpec V = BundleSpec::sum({2, -2});
  const int l0 = recommended_lmax(V, 10);
  CHECK(recommended_lmax(V, 20) > l0);
  V.potential = random_potential(V.degrees, 3, 0.1, 1, true);
  CHECK(recommended_lmax(V, 10) > l0);
  CHECK(recommended_lmax(V, 10) >= (10 + 2 + 1) / 2);
}
