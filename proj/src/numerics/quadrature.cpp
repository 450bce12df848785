#include <algorithm>
#include <cmath>
#include <numeric>

#include "blab/numerics.hpp"

namespace blab {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

double QuadratureGrid::total_weight() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

QuadratureGrid gauss_legendre_sphere(int n_theta, int n_phi, double area) {
  if (n_theta < 1 || n_phi < 1) {
    throw InvalidArgument("gauss_legendre_sphere: grid sizes must be positive");
  }
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  QuadratureGrid g;
  g.theta.resize(n_theta);
  for (int a = 0; a < n_theta; ++a) g.theta[a] = std::acos(x[a]);
  g.phi.resize(n_phi);
  for (int b = 0; b < n_phi; ++b) g.phi[b] = 2.0 * kPi * b / n_phi;
  // The unit-sphere weights sum to 4 pi; rescale to the requested area.
  const double scale = (2.0 * kPi / n_phi) * (area / (4.0 * kPi));
  g.weights.resize(static_cast<std::size_t>(n_theta) * n_phi);
  for (int a = 0; a < n_theta; ++a)
    for (int b = 0; b < n_phi; ++b) g.weights[a * n_phi + b] = w[a] * scale;
  g.exactness_degree = std::min(2 * n_theta - 1, n_phi - 1);
  return g;
}

QuadratureGrid quadrature_for_degree(int degree, double area) {
  degree = std::max(degree, 0);
  return gauss_legendre_sphere((degree + 2) / 2, degree + 1, area);
}

EvaluationGrid equiangular_grid(int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 1) {
    throw InvalidArgument("equiangular_grid: need n_theta >= 2 and n_phi >= 1");
  }
  EvaluationGrid g;
  g.theta.resize(n_theta);
  for (int a = 0; a < n_theta; ++a) g.theta[a] = kPi * a / (n_theta - 1);
  g.phi.resize(n_phi);
  for (int b = 0; b < n_phi; ++b) g.phi[b] = 2.0 * kPi * b / n_phi;
  g.resolution = std::max(kPi / (n_theta - 1), 2.0 * kPi / n_phi);
  return g;
}

}  // namespace blab
