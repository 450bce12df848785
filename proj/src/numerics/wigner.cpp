#include <cmath>
#include <cstdint>
#include <unordered_map>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "blab/numerics.hpp"

namespace blab {

namespace {

using boost::multiprecision::cpp_int;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

const std::vector<int>& primes_up_to(int n) {
  thread_local std::vector<int> primes;
  thread_local int limit = 1;
  if (n > limit) {
    limit = std::max(n, 2 * limit);
    std::vector<bool> sieve(limit + 1, true);
    primes.clear();
    for (int p = 2; p <= limit; ++p) {
      if (!sieve[p]) continue;
      primes.push_back(p);
      for (long q = static_cast<long>(p) * p; q <= limit; q += p) sieve[q] = false;
    }
  }
  return primes;
}

// Exponent vector of a product/quotient of factorials over a fixed prime list.
struct PrimeExponents {
  std::vector<int> e;
  explicit PrimeExponents(std::size_t n) : e(n, 0) {}

  void add_factorial(int n, const std::vector<int>& primes, int sign = 1) {
    for (std::size_t i = 0; i < primes.size() && primes[i] <= n; ++i) {
      int count = 0;
      for (long pk = primes[i]; pk <= n; pk *= primes[i]) count += static_cast<int>(n / pk);
      e[i] += sign * count;
    }
  }
};

cpp_int prime_power_product(const std::vector<int>& primes, const std::vector<int>& e) {
  cpp_int r = 1;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] > 0) r *= boost::multiprecision::pow(cpp_int(primes[i]), e[i]);
  }
  return r;
}

bool same_parity(int a, int b) { return ((a - b) & 1) == 0; }

double racah_exact(int j1, int j2, int j3, int m1, int m2, int m3) {
  // All arguments are twice the physical values.
  if (m1 + m2 + m3 != 0) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  if (!same_parity(j1, m1) || !same_parity(j2, m2) || !same_parity(j3, m3)) return 0.0;
  if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;
  if (((j1 + j2 + j3) & 1) != 0) return 0.0;

  auto h = [](int twice) { return twice / 2; };  // exact: arguments are even
  const int a1 = h(j1 + j2 - j3), a2 = h(j1 - j2 + j3), a3 = h(-j1 + j2 + j3);
  const int big = h(j1 + j2 + j3) + 1;
  const int kmin = std::max({0, h(j2 - j3 - m1), h(j1 - j3 + m2)});
  const int kmax = std::min({a1, h(j1 - m1), h(j2 + m2)});
  if (kmin > kmax) return 0.0;

  const auto& primes = primes_up_to(std::max(big, 2));
  const std::size_t np = primes.size();

  // Prefactor: triangle coefficient times the m-dependent factorials.
  PrimeExponents pre(np);
  for (int n : {a1, a2, a3, h(j1 + m1), h(j1 - m1), h(j2 + m2), h(j2 - m2), h(j3 + m3), h(j3 - m3)})
    pre.add_factorial(n, primes);
  pre.add_factorial(big, primes, -1);

  // Denominators of the alternating sum, and their least common multiple.
  std::vector<PrimeExponents> dens;
  PrimeExponents lcm(np);
  for (int k = kmin; k <= kmax; ++k) {
    PrimeExponents d(np);
    for (int n : {k, h(j3 - j2 + m1) + k, h(j3 - j1 - m2) + k, a1 - k, h(j1 - m1) - k, h(j2 + m2) - k})
      d.add_factorial(n, primes);
    for (std::size_t i = 0; i < np; ++i) lcm.e[i] = std::max(lcm.e[i], d.e[i]);
    dens.push_back(std::move(d));
  }
  cpp_int sum = 0;
  for (int k = kmin; k <= kmax; ++k) {
    std::vector<int> diff(np);
    const auto& d = dens[k - kmin];
    for (std::size_t i = 0; i < np; ++i) diff[i] = lcm.e[i] - d.e[i];
    const cpp_int term = prime_power_product(primes, diff);
    if ((k & 1) != 0) sum -= term;
    else sum += term;
  }
  if (sum == 0) return 0.0;

  // value^2 = prefactor * sum^2 / lcm^2
  std::vector<int> num(np), den(np);
  for (std::size_t i = 0; i < np; ++i) {
    const int e = pre.e[i] - 2 * lcm.e[i];
    num[i] = std::max(e, 0);
    den[i] = std::max(-e, 0);
  }
  const cpp_int A = prime_power_product(primes, num) * sum * sum;
  const cpp_int B = prime_power_product(primes, den);
  const BigFloat mag = boost::multiprecision::sqrt(BigFloat(A) / BigFloat(B));

  int sign = (sum < 0) ? -1 : 1;
  const int phase = h(j1 - j2 - m3);
  if ((phase & 1) != 0) sign = -sign;
  return sign * static_cast<double>(mag);
}

std::uint64_t pack_key(int a, int b, int c, int d, int e, int f) {
  auto u = [](int v) { return static_cast<std::uint64_t>(v + 512) & 0x3FF; };
  return u(a) | (u(b) << 10) | (u(c) << 20) | (u(d) << 30) | (u(e) << 40) | (u(f) << 50);
}

}  // namespace

HalfInt HalfInt::from_double(double v) {
  const double t = 2.0 * v;
  const double r = std::round(t);
  if (std::abs(t - r) > 1e-9) {
    throw InvalidArgument("HalfInt: " + std::to_string(v) + " is not a half-integer");
  }
  return HalfInt{static_cast<int>(r)};
}

double wigner3j_twice(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (j1 < 0 || j2 < 0 || j3 < 0) throw InvalidArgument("wigner3j: negative angular momentum");
  const bool cacheable = std::max({j1, j2, j3}) < 500;
  if (!cacheable) return racah_exact(j1, j2, j3, m1, m2, m3);
  thread_local std::unordered_map<std::uint64_t, double> memo;
  const auto key = pack_key(j1, j2, j3, m1, m2, m3);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const double v = racah_exact(j1, j2, j3, m1, m2, m3);
  memo.emplace(key, v);
  return v;
}

double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
  return wigner3j_twice(j1.twice, j2.twice, j3.twice, m1.twice, m2.twice, m3.twice);
}

}  // namespace blab
