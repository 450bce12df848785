#include <cmath>

#include "blab/numerics.hpp"

namespace blab {

namespace {

// Jacobi polynomial P_n^{(a,b)}(x) by the standard three-term recurrence.
double jacobi(int n, double a, double b, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = 0.5 * (a - b + (a + b + 2.0) * x);
  for (int k = 2; k <= n; ++k) {
    const double c = 2.0 * k + a + b;
    const double a1 = 2.0 * k * (k + a + b) * (c - 2.0);
    const double a2 = (c - 1.0) * (a * a - b * b);
    const double a3 = (c - 2.0) * (c - 1.0) * c;
    const double a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
    const double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

// Jacobi form with m the column index and mp the row index: d^j_{mp,m}.
double wigner_small_d(int j2, int mp2, int m2, double theta) {
  if (j2 < 0 || std::abs(m2) > j2 || std::abs(mp2) > j2 || ((j2 - m2) & 1) || ((j2 - mp2) & 1)) {
    throw InvalidArgument("wigner_small_d: invalid labels");
  }
  const int jm = (j2 + m2) / 2, j_m = (j2 - m2) / 2;
  const int jmp = (j2 + mp2) / 2, j_mp = (j2 - mp2) / 2;
  const int k = std::min({jm, j_m, jmp, j_mp});
  int a = 0, lam = 0;
  if (k == jm) {
    a = (mp2 - m2) / 2;
    lam = a;
  } else if (k == j_m) {
    a = (m2 - mp2) / 2;
  } else if (k == jmp) {
    a = (m2 - mp2) / 2;
  } else {
    a = (mp2 - m2) / 2;
    lam = a;
  }
  const int b = j2 - 2 * k - a;
  const double log_norm = 0.5 * (log_binomial(j2 - k, k + a) - log_binomial(k + b, b));
  const double s = std::sin(0.5 * theta), c = std::cos(0.5 * theta);
  const double val = std::exp(log_norm) * std::pow(s, a) * std::pow(c, b) *
                     jacobi(k, a, b, std::cos(theta));
  return (lam & 1) ? -val : val;
}

cplx spin_harmonic(int s2, int j2, int m2, double theta, double phi) {
  if (std::abs(s2) > j2 || ((j2 - s2) & 1)) throw InvalidArgument("spin_harmonic: |s| > j");
  const double norm = std::sqrt((j2 + 1.0) / (4.0 * kPi));
  const double d = wigner_small_d(j2, -s2, m2, theta);
  return norm * d * std::polar(1.0, 0.5 * m2 * phi);
}

double spin_triple_integral(int so2, int jo2, int mo2, int sf2, int jf2, int mf2,
                            int si2, int ji2, int mi2) {
  if (so2 != sf2 + si2 || mo2 != mf2 + mi2) return 0.0;
  if (std::abs(so2) > jo2 || std::abs(sf2) > jf2 || std::abs(si2) > ji2) return 0.0;
  const double w1 = wigner3j_twice(ji2, jf2, jo2, mi2, mf2, -mo2);
  if (w1 == 0.0) return 0.0;
  const double w2 = wigner3j_twice(ji2, jf2, jo2, -si2, -sf2, so2);
  const double pre = std::sqrt((ji2 + 1.0) * (jf2 + 1.0) * (jo2 + 1.0) / (4.0 * kPi));
  const int phase = (mo2 + so2) / 2;
  return ((phase & 1) ? -1.0 : 1.0) * pre * w1 * w2;
}

}  // namespace blab
