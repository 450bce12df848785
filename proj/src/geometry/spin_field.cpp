#include <cmath>
#include <random>

#include "blab/geometry.hpp"

namespace blab {

SpinBlock SpinBlock::up_to(int s2, int jmax2) {
  SpinBlock b{s2, std::abs(s2), jmax2};
  if (((b.jmax2 - s2) & 1) != 0) --b.jmax2;
  return b;
}

int SpinBlock::size() const {
  if (jmax2 < jmin2) return 0;
  const int c = (jmax2 - jmin2) / 2 + 1;
  return c * (jmin2 + c);
}

int SpinBlock::index(int j2, int m2) const {
  if (j2 < jmin2 || j2 > jmax2 || ((j2 - jmin2) & 1) != 0) return -1;
  if (std::abs(m2) > j2 || ((j2 - m2) & 1) != 0) return -1;
  const int c = (j2 - jmin2) / 2;
  return c * (jmin2 + c) + (m2 + j2) / 2;
}

SpinField SpinField::harmonic(int s2, int j2, int m2, cplx c) {
  if (std::abs(s2) > j2 || std::abs(m2) > j2 || ((j2 - s2) & 1) || ((j2 - m2) & 1)) {
    throw InvalidArgument("SpinField::harmonic: invalid labels");
  }
  SpinField f(s2);
  f.set(j2, m2, c);
  return f;
}

SpinField SpinField::constant(cplx c) { return harmonic(0, 0, 0, c * std::sqrt(4.0 * kPi)); }

SpinField SpinField::height() { return ylm(1, 0, std::sqrt(4.0 * kPi / 3.0)); }

SpinField SpinField::random(int s2, int band2, unsigned seed, bool real_valued) {
  if (real_valued && s2 != 0) throw InvalidArgument("SpinField::random: real fields have spin 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  SpinField f(s2);
  for (int j2 = std::abs(s2); j2 <= band2; j2 += 2) {
    for (int m2 = -j2; m2 <= j2; m2 += 2) {
      const double re = g(rng), im = g(rng);
      if (!real_valued) {
        f.set(j2, m2, {re, im});
      } else if (m2 > 0) {
        const cplx c{re, im};
        f.set(j2, m2, c);
        f.set(j2, -m2, ((m2 / 2) & 1 ? -1.0 : 1.0) * std::conj(c));
      } else if (m2 == 0) {
        f.set(j2, 0, re);
      }
    }
  }
  return f;
}

cplx SpinField::coeff(int j2, int m2) const {
  auto it = c_.find({j2, m2});
  return it == c_.end() ? cplx{} : it->second;
}

void SpinField::set(int j2, int m2, cplx c) {
  if (std::abs(s2_) > j2 || std::abs(m2) > j2 || ((j2 - s2_) & 1) || ((j2 - m2) & 1)) {
    throw InvalidArgument("SpinField: mode (" + std::to_string(j2) + "/2, " +
                          std::to_string(m2) + "/2) invalid for spin " + std::to_string(s2_) + "/2");
  }
  c_[{j2, m2}] = c;
}

void SpinField::add(int j2, int m2, cplx c) {
  auto it = c_.find({j2, m2});
  if (it == c_.end()) set(j2, m2, c);
  else it->second += c;
}

int SpinField::band2() const {
  int b = -1;
  for (const auto& [k, v] : c_)
    if (v != cplx{}) b = std::max(b, k.first);
  return b;
}

cplx SpinField::evaluate(double theta, double phi) const {
  cplx sum = 0.0;
  for (const auto& [k, c] : c_) sum += c * spin_harmonic(s2_, k.first, k.second, theta, phi);
  return sum;
}

std::vector<cplx> SpinField::evaluate_on(const std::vector<double>& theta,
                                         const std::vector<double>& phi) const {
  const std::size_t nt = theta.size(), np = phi.size();
  std::vector<cplx> out(nt * np, cplx{});
  if (c_.empty()) return out;
  // Group by m: g_m(theta) = sum_j c_jm N_j d^j_{-s,m}(theta).
  std::map<int, std::vector<cplx>> by_m;
  for (const auto& [k, c] : c_) {
    auto& g = by_m[k.second];
    if (g.empty()) g.assign(nt, cplx{});
    const double norm = std::sqrt((k.first + 1.0) / (4.0 * kPi));
    for (std::size_t a = 0; a < nt; ++a)
      g[a] += c * norm * wigner_small_d(k.first, -s2_, k.second, theta[a]);
  }
  for (const auto& [m2, g] : by_m) {
    std::vector<cplx> ph(np);
    for (std::size_t b = 0; b < np; ++b) ph[b] = std::polar(1.0, 0.5 * m2 * phi[b]);
    for (std::size_t a = 0; a < nt; ++a)
      for (std::size_t b = 0; b < np; ++b) out[a * np + b] += g[a] * ph[b];
  }
  return out;
}

SpinField SpinField::operator+(const SpinField& o) const {
  SpinField r = *this;
  r += o;
  return r;
}

SpinField& SpinField::operator+=(const SpinField& o) {
  if (o.c_.empty()) return *this;
  if (c_.empty()) s2_ = o.s2_;
  if (o.s2_ != s2_) throw InvalidArgument("SpinField: adding fields of different spin");
  for (const auto& [k, c] : o.c_) add(k.first, k.second, c);
  return *this;
}

SpinField SpinField::operator-(const SpinField& o) const { return *this + o * -1.0; }

SpinField SpinField::operator*(cplx a) const {
  SpinField r = *this;
  for (auto& [k, c] : r.c_) c *= a;
  return r;
}

SpinField SpinField::multiply(const SpinField& o) const {
  const int s2 = s2_ + o.s2_;
  SpinField r(s2);
  for (const auto& [ka, a] : c_) {
    for (const auto& [kb, b] : o.c_) {
      const int M = ka.second + kb.second;
      const int jlo = std::max({std::abs(s2), std::abs(M), std::abs(ka.first - kb.first)});
      for (int J = jlo; J <= ka.first + kb.first; J += 2) {
        if (((J - s2) & 1) != 0) continue;
        const double t = spin_triple_integral(s2, J, M, s2_, ka.first, ka.second, o.s2_,
                                              kb.first, kb.second);
        if (t != 0.0) r.add(J, M, a * b * t);
      }
    }
  }
  return r.pruned(0.0);
}

SpinField SpinField::conj() const {
  SpinField r(-s2_);
  for (const auto& [k, c] : c_) {
    const int phase = (k.second + s2_) / 2;
    r.set(k.first, -k.second, ((phase & 1) ? -1.0 : 1.0) * std::conj(c));
  }
  return r;
}

SpinField SpinField::edth() const {
  SpinField r(s2_ + 2);
  for (const auto& [k, c] : c_) {
    const double f = 0.5 * std::sqrt(double(k.first - s2_) * (k.first + s2_ + 2));
    if (f != 0.0) r.set(k.first, k.second, f * c);
  }
  return r;
}

SpinField SpinField::edth_bar() const {
  SpinField r(s2_ - 2);
  for (const auto& [k, c] : c_) {
    const double f = 0.5 * std::sqrt(double(k.first + s2_) * (k.first - s2_ + 2));
    if (f != 0.0) r.set(k.first, k.second, -f * c);
  }
  return r;
}

SpinField SpinField::pruned(double tol) const {
  SpinField r(s2_);
  for (const auto& [k, c] : c_)
    if (std::abs(c) > tol) r.c_.emplace(k, c);
  return r;
}

double SpinField::coeff_norm() const {
  double s = 0.0;
  for (const auto& [k, c] : c_) s += std::norm(c);
  return std::sqrt(s);
}

CMatrix SpinField::matrix(const SpinBlock& out, const SpinBlock& in) const {
  CMatrix M = CMatrix::Zero(out.size(), in.size());
  if (c_.empty()) return M;
  if (out.s2 != in.s2 + s2_) {
    throw InvalidArgument("SpinField::matrix: spin mismatch between blocks and field");
  }
  in.for_each([&](int col, int j2, int m2) {
    for (const auto& [k, c] : c_) {
      const int mo = m2 + k.second;
      int lo = std::max({out.jmin2, std::abs(j2 - k.first), std::abs(mo)});
      if (((lo - out.s2) & 1) != 0) ++lo;
      const int hi = std::min(out.jmax2, j2 + k.first);
      for (int jo = lo; jo <= hi; jo += 2) {
        const int row = out.index(jo, mo);
        if (row < 0) continue;
        const double t = spin_triple_integral(out.s2, jo, mo, s2_, k.first, k.second, in.s2, j2, m2);
        if (t != 0.0) M(row, col) += c * t;
      }
    }
  });
  return M;
}

SpinField SpinField::analyze(const std::vector<cplx>& samples, const QuadratureGrid& grid,
                             int s2, int band2) {
  if (samples.size() != grid.size()) throw InvalidArgument("SpinField::analyze: sample count");
  const double to_unit = 4.0 * kPi / grid.total_weight();
  const int nt = grid.n_theta(), np = grid.n_phi();
  SpinField f(s2);
  for (int j2 = std::abs(s2); j2 <= band2; j2 += 2) {
    const double norm = std::sqrt((j2 + 1.0) / (4.0 * kPi));
    for (int m2 = -j2; m2 <= j2; m2 += 2) {
      cplx acc = 0.0;
      for (int a = 0; a < nt; ++a) {
        const double d = norm * wigner_small_d(j2, -s2, m2, grid.theta[a]);
        cplx row = 0.0;
        for (int b = 0; b < np; ++b)
          row += grid.weights[a * np + b] * samples[a * np + b] *
                 std::polar(1.0, -0.5 * m2 * grid.phi[b]);
        acc += d * row;
      }
      f.set(j2, m2, acc * to_unit);
    }
  }
  return f;
}

}  // namespace blab
