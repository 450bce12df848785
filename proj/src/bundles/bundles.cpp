#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "blab/bundles.hpp"
#include "blab/dolbeault.hpp"

namespace blab {

// ---------------------------------------------------------------------------
// Potential and BundleSpec

bool Potential::is_zero() const {
  auto zero = [](const std::map<Block, SpinField>& m) {
    return std::all_of(m.begin(), m.end(), [](const auto& kv) { return kv.second.band2() < 0; });
  };
  return zero(dbar) && (!del || zero(*del));
}

int Potential::band2() const {
  int b = -1;
  for (const auto& [k, f] : dbar) b = std::max(b, f.band2());
  if (del)
    for (const auto& [k, f] : *del) b = std::max(b, f.band2());
  return b;
}

BundleSpec BundleSpec::line(int p) { return sum({p}); }

BundleSpec BundleSpec::sum(std::vector<int> degrees) {
  BundleSpec V;
  V.degrees = std::move(degrees);
  V.validate();
  return V;
}

int BundleSpec::total_degree() const {
  int d = 0;
  for (int p : degrees) d += p;
  return d;
}

int BundleSpec::max_abs_degree() const {
  int m = 0;
  for (int p : degrees) m = std::max(m, std::abs(p));
  return m;
}

BundleSpec BundleSpec::round() const {
  BundleSpec r = *this;
  r.potential.reset();
  return r;
}

std::string BundleSpec::display_label() const {
  if (!label.empty()) return label;
  std::string s;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (i) s += "+";
    s += "O(" + std::to_string(degrees[i]) + ")";
  }
  if (!holomorphic_round()) s += self_adjoint() ? "[A]" : "[A,nsa]";
  return s;
}

int alpha_spin2(const std::vector<int>& degrees, int to, int from) {
  return degrees.at(from) - degrees.at(to) + 2;
}

int beta_spin2(const std::vector<int>& degrees, int to, int from) {
  return degrees.at(from) - degrees.at(to) - 2;
}

void BundleSpec::validate() const {
  if (degrees.empty()) throw InvalidArgument("bundle: degrees must be nonempty");
  if (!potential) return;
  const int r = rank();
  auto check = [&](const std::map<Potential::Block, SpinField>& m, bool is_alpha) {
    for (const auto& [k, f] : m) {
      if (k.first < 0 || k.first >= r || k.second < 0 || k.second >= r) {
        throw InvalidArgument("bundle: potential block index out of range");
      }
      const int want = is_alpha ? alpha_spin2(degrees, k.first, k.second)
                                : beta_spin2(degrees, k.first, k.second);
      if (f.band2() >= 0 && f.spin2() != want) {
        throw InvalidArgument("bundle: potential block (" + std::to_string(k.first) + "," +
                              std::to_string(k.second) + ") has spin2 " +
                              std::to_string(f.spin2()) + ", expected " + std::to_string(want));
      }
    }
  };
  check(potential->dbar, true);
  if (potential->del) check(*potential->del, false);
}

SpinField BundleSpec::alpha(int to, int from) const {
  const int s2 = alpha_spin2(degrees, to, from);
  if (!potential) return SpinField(s2);
  auto it = potential->dbar.find({to, from});
  return it == potential->dbar.end() || it->second.band2() < 0 ? SpinField(s2) : it->second;
}

SpinField BundleSpec::beta(int to, int from) const {
  const int s2 = beta_spin2(degrees, to, from);
  if (!potential) return SpinField(s2);
  if (potential->compatible()) {
    const SpinField a = alpha(from, to);
    return a.band2() < 0 ? SpinField(s2) : a.conj();
  }
  auto it = potential->del->find({to, from});
  return it == potential->del->end() || it->second.band2() < 0 ? SpinField(s2) : it->second;
}

SupNorm matrix_field_sup_norm(const std::vector<std::vector<SpinField>>& entries) {
  const int r = static_cast<int>(entries.size());
  int band = 0;
  for (const auto& row : entries)
    for (const auto& f : row) band = std::max(band, f.band());
  const EvaluationGrid grid = sup_grid_for_band(band);
  const std::size_t npts = grid.theta.size() * grid.phi.size();
  std::vector<std::vector<std::vector<cplx>>> vals(r, std::vector<std::vector<cplx>>(r));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      vals[a][b] = entries[a][b].band2() < 0 ? std::vector<cplx>(npts, cplx{})
                                             : entries[a][b].evaluate_on(grid.theta, grid.phi);
  double best = 0.0;
  CMatrix M(r, r);
  for (std::size_t x = 0; x < npts; ++x) {
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) M(a, b) = vals[a][b][x];
    best = std::max(best, r == 1 ? std::abs(M(0, 0)) : operator_norm(M));
  }
  return {best, grid.resolution};
}

namespace {

std::vector<std::vector<SpinField>> alpha_matrix(const BundleSpec& V) {
  const int r = V.rank();
  std::vector<std::vector<SpinField>> m(r, std::vector<SpinField>(r));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) m[a][b] = V.alpha(a, b);
  return m;
}

std::vector<std::vector<SpinField>> beta_matrix(const BundleSpec& V) {
  const int r = V.rank();
  std::vector<std::vector<SpinField>> m(r, std::vector<SpinField>(r));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) m[a][b] = V.beta(a, b);
  return m;
}

std::vector<std::vector<SpinField>> minus(std::vector<std::vector<SpinField>> a,
                                          const std::vector<std::vector<SpinField>>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) a[i][j] = (a[i][j] - b[i][j]).pruned(0.0);
  return a;
}

}  // namespace

double potential_sup_norm(const BundleSpec& V) {
  if (V.holomorphic_round()) return 0.0;
  return std::max(matrix_field_sup_norm(alpha_matrix(V)).value,
                  matrix_field_sup_norm(beta_matrix(V)).value);
}

double potential_difference_sup_norm(const BundleSpec& V, const BundleSpec& W) {
  if (V.degrees != W.degrees) throw InvalidArgument("potential difference: degrees differ");
  return std::max(matrix_field_sup_norm(minus(alpha_matrix(V), alpha_matrix(W))).value,
                  matrix_field_sup_norm(minus(beta_matrix(V), beta_matrix(W))).value);
}

namespace {

nlohmann::json blocks_to_json(const std::map<Potential::Block, SpinField>& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [k, f] : m)
    for (const auto& [jm, c] : f.coeffs())
      arr.push_back({k.first, k.second, 0.5 * jm.first, 0.5 * jm.second, c.real(), c.imag()});
  return arr;
}

std::map<Potential::Block, SpinField> blocks_from_json(const nlohmann::json& arr,
                                                       const std::vector<int>& degrees,
                                                       bool is_alpha) {
  if (!arr.is_array()) throw InvalidArgument("potential: blocks must be an array");
  std::map<Potential::Block, SpinField> m;
  const int r = static_cast<int>(degrees.size());
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 6) {
      throw InvalidArgument("potential: entries are [to, from, j, m, re, im]");
    }
    const int to = e[0].get<int>(), from = e[1].get<int>();
    if (to < 0 || to >= r || from < 0 || from >= r) {
      throw InvalidArgument("potential: block index out of range");
    }
    const int s2 = is_alpha ? alpha_spin2(degrees, to, from) : beta_spin2(degrees, to, from);
    const int j2 = HalfInt::from_double(e[2].get<double>()).twice;
    const int m2 = HalfInt::from_double(e[3].get<double>()).twice;
    auto [it, inserted] = m.try_emplace({to, from}, SpinField(s2));
    it->second.add(j2, m2, {e[4].get<double>(), e[5].get<double>()});
  }
  return m;
}

}  // namespace

nlohmann::json to_json(const BundleSpec& V) {
  nlohmann::json j;
  j["degrees"] = V.degrees;
  j["label"] = V.label;
  if (!V.potential) {
    j["potential"] = nullptr;
  } else {
    nlohmann::json p;
    p["dbar"] = blocks_to_json(V.potential->dbar);
    if (V.potential->del) p["del"] = blocks_to_json(*V.potential->del);
    j["potential"] = p;
  }
  return j;
}

BundleSpec bundle_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("degrees")) throw InvalidArgument("bundle: missing degrees");
  BundleSpec V;
  V.degrees = j.at("degrees").get<std::vector<int>>();
  if (j.contains("label")) V.label = j["label"].get<std::string>();
  if (j.contains("potential") && !j["potential"].is_null()) {
    const auto& p = j["potential"];
    Potential pot;
    if (p.contains("dbar")) pot.dbar = blocks_from_json(p["dbar"], V.degrees, true);
    if (p.contains("del") && !p["del"].is_null())
      pot.del = blocks_from_json(p["del"], V.degrees, false);
    V.potential = std::move(pot);
  }
  V.validate();
  return V;
}

Potential random_potential(const std::vector<int>& degrees, int band, double scale,
                           unsigned seed, bool compatible) {
  const int r = static_cast<int>(degrees.size());
  Potential pot;
  unsigned k = 0;
  auto draw = [&](int s2) {
    int b2 = std::max(2 * band, std::abs(s2));
    if (((b2 - s2) & 1) != 0) --b2;
    SpinField f = SpinField::random(s2, b2, seed * 7919u + k++);
    const double n = f.coeff_norm();
    return n > 0.0 ? f * (scale / n) : f;
  };
  for (int to = 0; to < r; ++to)
    for (int from = 0; from < r; ++from) pot.dbar[{to, from}] = draw(alpha_spin2(degrees, to, from));
  if (!compatible) {
    pot.del.emplace();
    for (int to = 0; to < r; ++to)
      for (int from = 0; from < r; ++from)
        (*pot.del)[{to, from}] = draw(beta_spin2(degrees, to, from));
  }
  return pot;
}

// ---------------------------------------------------------------------------
// AmbientSpace

AmbientSpace::AmbientSpace(std::vector<int> degrees, int N, int lmax)
    : degrees_(std::move(degrees)), N_(N), lmax_(lmax) {
  if (degrees_.empty()) throw InvalidArgument("AmbientSpace: empty degree list");
  if (lmax < 0) throw InvalidArgument("AmbientSpace: negative lmax");
  const int r = rank();
  blocks_.resize(2 * r);
  offsets_.resize(2 * r);
  int off = 0;
  for (int d = 0; d < 2; ++d) {
    for (int i = 0; i < r; ++i) {
      blocks_[d * r + i] = SpinBlock::up_to(N - degrees_[i] + 2 * d, 2 * lmax + 1);
      offsets_[d * r + i] = off;
      off += blocks_[d * r + i].size();
    }
    if (d == 0) n0_ = off;
  }
  size_ = off;
}

const SpinBlock& AmbientSpace::block(int degree, int summand) const {
  return blocks_.at(degree * rank() + summand);
}

int AmbientSpace::offset(int degree, int summand) const {
  return offsets_.at(degree * rank() + summand);
}

int AmbientSpace::index(int degree, int summand, int j2, int m2) const {
  const int k = block(degree, summand).index(j2, m2);
  return k < 0 ? -1 : offset(degree, summand) + k;
}

ModeLabel AmbientSpace::label(int idx) const {
  if (idx < 0 || idx >= size_) throw InvalidArgument("AmbientSpace::label: index out of range");
  const int r = rank();
  int b = 2 * r - 1;
  while (offsets_[b] > idx || blocks_[b].size() == 0) --b;
  const SpinBlock& blk = blocks_[b];
  ModeLabel out{b / r, b % r, blk.s2, 0, 0};
  const int want = idx - offsets_[b];
  blk.for_each([&](int k, int j2, int m2) {
    if (k == want) {
      out.j2 = j2;
      out.m2 = m2;
    }
  });
  return out;
}

SpaceTag AmbientSpace::tag() const {
  std::string name = "amb_" + std::to_string(N_) + "[";
  for (std::size_t i = 0; i < degrees_.size(); ++i) {
    if (i) name += ",";
    name += std::to_string(degrees_[i]);
  }
  return {name + "]", size_};
}

double HilbertBasis::gram_condition() const {
  if (gram.size() == 0) return 1.0;
  Eigen::BDCSVD<CMatrix> svd(gram);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
}

HilbertBasis h_space(int N) {
  if (N < 1) throw InvalidArgument("h_space: N must be positive");
  HilbertBasis h;
  h.ambient = AmbientSpace({0}, N, N / 2);
  h.vectors = CMatrix::Identity(h.ambient.size(), N + 1);
  h.gram = CMatrix::Identity(N + 1, N + 1);
  h.tag = {"H_" + std::to_string(N), N + 1};
  h.dim_degree0 = N + 1;
  return h;
}

int recommended_lmax(const BundleSpec& V, int N, int margin) {
  const int band = V.potential ? std::max(0, (V.potential->band2() + 1) / 2) : 0;
  return (N + V.max_abs_degree() + 1) / 2 + band + margin;
}

int holomorphic_count(const std::vector<int>& degrees, int N) {
  int n = 0;
  for (int p : degrees) n += std::max(0, N - p + 1);
  return n;
}

int antiholomorphic_count(const std::vector<int>& degrees, int N) {
  int n = 0;
  for (int p : degrees) n += std::max(0, p - N - 1);
  return n;
}

HilbertBasis e_space(const BundleSpec& V, int N, int lmax) {
  V.validate();
  if (N < 1) throw InvalidArgument("e_space: N must be positive");
  if (lmax < 0) lmax = recommended_lmax(V, N);
  std::string name = "E_" + std::to_string(N) + "[" + V.display_label() + "]";
  HilbertBasis e;
  e.ambient = AmbientSpace(V.degrees, N, lmax);
  const AmbientSpace& amb = e.ambient;
  if (V.holomorphic_round()) {
    const int dim0 = holomorphic_count(V.degrees, N);
    const int dim1 = antiholomorphic_count(V.degrees, N);
    e.vectors = CMatrix::Zero(amb.size(), dim0 + dim1);
    int col = 0;
    // Degree 0: edth kills j = s for s >= 0. Degree 1: edth_bar kills j = -s for s <= 0.
    for (int d = 0; d < 2; ++d)
      for (int i = 0; i < amb.rank(); ++i) {
        const int s2 = N - V.degrees[i] + 2 * d;
        if (d == 0 ? s2 < 0 : s2 > 0) continue;
        const int j2 = std::abs(s2);
        if (amb.block(d, i).jmax2 < j2) throw InvalidArgument("e_space: lmax below N/2");
        for (int m2 = -j2; m2 <= j2; m2 += 2) e.vectors(amb.index(d, i, j2, m2), col++) = 1.0;
      }
    e.dim_degree0 = dim0;
    e.dim_degree1 = dim1;
  } else {
    const DolbeaultOperator D = build_dolbeault(V, N, lmax);
    const SpectralProjector P = kernel_projector(D);
    e.vectors = P.range;
    e.dim_degree0 = P.range_degree0;
    e.dim_degree1 = static_cast<int>(P.range.cols()) - P.range_degree0;
    if (e.dim() != P.rank) {
      throw RegimeError("e_space: kernel basis rank " + std::to_string(e.dim()) +
                        " differs from projector trace " + std::to_string(P.rank), N);
    }
  }
  e.gram = e.vectors.adjoint() * e.vectors;
  e.orthonormal = true;
  e.tag = {name, e.dim()};
  return e;
}

// ---------------------------------------------------------------------------
// Sections

SectionOfV SectionOfV::random(const std::vector<int>& degrees, int band2, unsigned seed) {
  SectionOfV v;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const int s2 = degrees[i];
    int b = std::max(band2, std::abs(s2));
    if (((b - s2) & 1) != 0) ++b;
    v.components.push_back(SpinField::random(s2, b, seed * 104729u + static_cast<unsigned>(i)));
  }
  return v;
}

void SectionOfV::check(const std::vector<int>& degrees) const {
  if (components.size() != degrees.size()) {
    throw InvalidArgument("section: component count differs from bundle rank");
  }
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (components[i].band2() >= 0 && components[i].spin2() != degrees[i]) {
      throw InvalidArgument("section: component " + std::to_string(i) + " has spin2 " +
                            std::to_string(components[i].spin2()) + ", bundle needs " +
                            std::to_string(degrees[i]));
    }
  }
}

int SectionOfV::band2() const {
  int b = -1;
  for (const auto& c : components) b = std::max(b, c.band2());
  return b;
}

SupNorm section_sup_norm(const SectionOfV& v) {
  const EvaluationGrid grid = sup_grid_for_band((v.band2() + 1) / 2);
  std::vector<double> acc(grid.theta.size() * grid.phi.size(), 0.0);
  for (const auto& c : v.components) {
    if (c.band2() < 0) continue;
    const auto vals = c.evaluate_on(grid.theta, grid.phi);
    for (std::size_t x = 0; x < acc.size(); ++x) acc[x] += std::norm(vals[x]);
  }
  double m = 0.0;
  for (double a : acc) m = std::max(m, a);
  return {std::sqrt(m), grid.resolution};
}

SpinField degree0_component(const AmbientSpace& amb, const CVector& psi, int summand) {
  if (psi.size() != amb.size()) throw InvalidArgument("degree0_component: vector size mismatch");
  const SpinBlock& blk = amb.block(0, summand);
  const int off = amb.offset(0, summand);
  SpinField f(blk.s2);
  blk.for_each([&](int k, int j2, int m2) {
    if (psi(off + k) != cplx{}) f.set(j2, m2, psi(off + k));
  });
  return f;
}

SpinField pair_section(const SectionOfV& v, const AmbientSpace& amb, const CVector& psi) {
  v.check(amb.degrees());
  SpinField out(amb.N());
  for (int i = 0; i < amb.rank(); ++i) {
    if (v.components[i].band2() < 0) continue;
    out += v.components[i].multiply(degree0_component(amb, psi, i));
  }
  return out;
}

CMatrix contraction_matrix(const SectionOfV& v, const AmbientSpace& amb) {
  v.check(amb.degrees());
  const int N = amb.N();
  const SpinBlock hN{N, N, N};
  CMatrix M = CMatrix::Zero(N + 1, amb.size());
  for (int i = 0; i < amb.rank(); ++i) {
    const SpinBlock& blk = amb.block(0, i);
    if (v.components[i].band2() < 0 || blk.size() == 0) continue;
    M.middleCols(amb.offset(0, i), blk.size()) = v.components[i].matrix(hN, blk);
  }
  return M;
}

}  // namespace blab
