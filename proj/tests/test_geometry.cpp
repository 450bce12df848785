#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "blab/geometry.hpp"

using namespace blab;

namespace {

double max_pointwise_error(const SpinField& f, const std::function<cplx(double, double)>& g) {
  double worst = 0;
  for (double t = 0.05; t < kPi; t += 0.31)
    for (double p = 0.0; p < 2 * kPi; p += 0.47) worst = std::max(worst, std::abs(f.evaluate(t, p) - g(t, p)));
  return worst;
}

}  // namespace

TEST_CASE("model constants") {
  const KahlerModel m = KahlerModel::cp1();
  CHECK(m.area == doctest::Approx(2 * kPi));
  CHECK(m.radius_squared() == doctest::Approx(0.5));
  CHECK(m.kappa() == doctest::Approx(1.0));
  CHECK(m.laplace_eigenvalue(1) == doctest::Approx(4.0));
  CHECK(m.laplace_eigenvalue(3) == doctest::Approx(24.0));
}

TEST_CASE("spin blocks") {
  const SpinBlock b = SpinBlock::up_to(3, 7);
  CHECK(b.size() == 4 + 6 + 8);
  CHECK(b.index(3, -3) == 0);
  CHECK(b.index(5, -5) == 4);
  CHECK(b.index(9, 1) == -1);
  CHECK(b.index(1, 1) == -1);
  int n = 0;
  b.for_each([&](int k, int j2, int m2) {
    CHECK(b.index(j2, m2) == k);
    ++n;
  });
  CHECK(n == b.size());
}

TEST_CASE("height and products match pointwise values") {
  const SpinField h = SpinField::height();
  CHECK(max_pointwise_error(h, [](double t, double) { return std::cos(t); }) < 1e-14);
  const SpinField f = SpinField::ylm(1, 1) + SpinField::ylm(2, -1, cplx(0.3, 0.2));
  const SpinField g = SpinField::ylm(2, 0, 0.7) + SpinField::constant(0.5);
  const SpinField fg = f.multiply(g);
  CHECK(max_pointwise_error(fg, [&](double t, double p) { return f.evaluate(t, p) * g.evaluate(t, p); }) < 1e-13);
  // Spin-weighted products: spins add.
  const SpinField a = SpinField::harmonic(1, 3, 1, 0.8), b = SpinField::harmonic(-2, 4, 2, cplx(0.1, -0.4));
  const SpinField ab = a.multiply(b);
  CHECK(ab.spin2() == -1);
  CHECK(max_pointwise_error(ab, [&](double t, double p) { return a.evaluate(t, p) * b.evaluate(t, p); }) < 1e-13);
  CHECK(max_pointwise_error(f.conj(), [&](double t, double p) { return std::conj(f.evaluate(t, p)); }) < 1e-14);
}

TEST_CASE("edth_bar edth is minus l(l+1) on scalars") {
  const SpinField f = SpinField::ylm(3, -2, 1.5);
  const SpinField g = f.edth().edth_bar();
  CHECK(std::abs(g.coeff(6, -4) - (-12.0 * 1.5)) < 1e-13);
  CHECK(std::abs(laplacian(f).coeff(6, -4) - 24.0 * 1.5) < 1e-12);
  CHECK_THROWS_AS(laplacian(SpinField::harmonic(2, 2, 0)), InvalidArgument);
}

TEST_CASE("sup norms and gradients against closed forms") {
  const SupNorm s = sup_norm(SpinField::height());
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-12));
  // |grad cos|^2 = sin^2 / r^2 with r^2 = 1/2.
  CHECK(gradient_sup_norm(SpinField::height()).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
  // sup |Y_22| = sqrt(15/32 pi) at the equator.
  CHECK(sup_norm(SpinField::ylm(2, 2)).value == doctest::Approx(std::sqrt(15.0 / (32 * kPi))).epsilon(1e-6));
}

TEST_CASE("integration in the model measure") {
  CHECK(std::abs(integrate(SpinField::constant(1.0)) - 2 * kPi) < 1e-13);
  CHECK(std::abs(integrate(SpinField::height())) < 1e-14);
  const SpinField h2 = SpinField::height().multiply(SpinField::height());
  CHECK(std::abs(integrate(h2) - 2 * kPi / 3) < 1e-13);
  const QuadratureGrid tiny = gauss_legendre_sphere(2, 4);
  CHECK_THROWS_AS(integrate(SpinField::ylm(8, 0), tiny), InvalidArgument);
}

TEST_CASE("multiplication matrices are quadrature matrix elements") {
  const SpinField f = SpinField::ylm(2, 1, 0.4) + SpinField::ylm(1, 0, cplx(0, 1));
  const SpinBlock in = SpinBlock::up_to(2, 6), out = SpinBlock::up_to(2, 8);
  const CMatrix M = f.matrix(out, in);
  const QuadratureGrid g = gauss_legendre_sphere(16, 32, 4 * kPi);
  out.for_each([&](int a, int ja, int ma) {
    in.for_each([&](int b, int jb, int mb) {
      cplx s = 0;
      for (int i = 0; i < g.n_theta(); ++i)
        for (int k = 0; k < g.n_phi(); ++k) {
          const double t = g.theta[i], p = g.phi[k];
          s += g.weights[i * g.n_phi() + k] * std::conj(spin_harmonic(2, ja, ma, t, p)) *
               f.evaluate(t, p) * spin_harmonic(2, jb, mb, t, p);
        }
      CHECK(std::abs(M(a, b) - s) < 1e-12);
    });
  });
}

TEST_CASE("analysis inverts synthesis") {
  const SpinField f = SpinField::random(1, 7, 42);
  const QuadratureGrid g = quadrature_for_degree(16);
  const SpinField back = SpinField::analyze(f.evaluate_on(g.theta, g.phi), g, 1, 7);
  CHECK((back - f).coeff_norm() < 1e-12);
}

TEST_CASE("random fields are seeded and respect the band") {
  const SpinField a = SpinField::random(0, 6, 7, true), b = SpinField::random(0, 6, 7, true);
  CHECK(a == b);
  CHECK(a.band2() <= 6);
  CHECK(!(a == SpinField::random(0, 6, 8, true)));
  CHECK(max_pointwise_error(a, [&](double t, double p) { return cplx(a.evaluate(t, p).real(), 0); }) < 1e-13);
}

TEST_CASE("symbol json round trip and errors") {
  const SpinField f = SpinField::ylm(2, 1, cplx(1, -2)) + SpinField::constant(3);
  const SpinField g = symbol_from_json(to_json(f));
  CHECK((g - f).coeff_norm() < 1e-15);
  CHECK_THROWS_AS(symbol_from_json(nlohmann::json::parse(R"({"coeffs": [[1, 2, 0, 0]]})")), InvalidArgument);
  CHECK_THROWS_AS(symbol_from_json(nlohmann::json::parse(R"([1, 2])")), InvalidArgument);
}
