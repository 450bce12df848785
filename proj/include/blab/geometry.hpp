#pragma once

// The CP^1 Kahler model and band-limited spin-weighted fields on it.
//
// Normalization: the symplectic form has total area 2*pi, so the compatible
// metric is the round sphere of radius^2 = 1/2. Fields are expanded in the
// unit-sphere spin-weighted harmonics sY_{jm}; a scalar symbol is a field of
// spin 0.

#include <map>
#include <utility>

#include "json.hpp"

#include "blab/numerics.hpp"

namespace blab {

struct KahlerModel {
  double area = 2.0 * kPi;

  /// omega = symplectic_scale * (unit-sphere area element).
  double symplectic_scale() const { return area / (4.0 * kPi); }
  /// pi^{theta phi} = poisson_scale / sin(theta), so that pi omega = 1.
  double poisson_scale() const { return 1.0 / symplectic_scale(); }
  /// Radius^2 of the round metric compatible with omega.
  double radius_squared() const { return area / (4.0 * kPi); }
  /// Eigenvalue of -nabla^2 on degree-l harmonics.
  double laplace_eigenvalue(int l) const { return l * (l + 1.0) / radius_squared(); }
  /// Scale of the Dolbeault operator relative to the unit-sphere edth, fixed
  /// so that the curvature of L contributes exactly N to D^2.
  double kappa() const { return std::sqrt(2.0 * kPi / area); }
  /// Ratio between model integrals and unit-sphere integrals.
  double area_factor() const { return area / (4.0 * kPi); }

  static KahlerModel cp1() { return KahlerModel{}; }
};

/// A contiguous range of spin-weighted multiplets: spin s2 and every j2 from
/// jmin2 to jmax2 (step 2), each with all m. Basis order is j-major,
/// m ascending.
struct SpinBlock {
  int s2 = 0;
  int jmin2 = 0;
  int jmax2 = 0;

  static SpinBlock up_to(int s2, int jmax2);
  int size() const;
  int index(int j2, int m2) const;  // -1 when outside the block
  bool contains(int j2, int m2) const { return index(j2, m2) >= 0; }
  template <class F>
  void for_each(F&& f) const {
    int idx = 0;
    for (int j2 = jmin2; j2 <= jmax2; j2 += 2)
      for (int m2 = -j2; m2 <= j2; m2 += 2) f(idx++, j2, m2);
  }
};

/// Band-limited field of spin weight s2/2, keyed by (j2, m2).
class SpinField {
 public:
  using Key = std::pair<int, int>;

  SpinField() = default;
  explicit SpinField(int s2) : s2_(s2) {}

  static SpinField harmonic(int s2, int j2, int m2, cplx c = 1.0);
  /// Spin-0 convenience: coefficient of Y_{lm} with integer labels.
  static SpinField ylm(int l, int m, cplx c = 1.0) { return harmonic(0, 2 * l, 2 * m, c); }
  static SpinField constant(cplx c);
  /// cos(theta) as a symbol.
  static SpinField height();
  /// Seeded random field with all modes up to j2 <= band2 (entries normal).
  static SpinField random(int s2, int band2, unsigned seed, bool real_valued = false);

  int spin2() const { return s2_; }
  const std::map<Key, cplx>& coeffs() const { return c_; }
  cplx coeff(int j2, int m2) const;
  void set(int j2, int m2, cplx c);
  void add(int j2, int m2, cplx c);
  bool empty() const { return c_.empty(); }
  /// Largest j2 with a nonzero coefficient (-1 for the zero field).
  int band2() const;
  /// Integer band (ceil of j) for scalar-style bookkeeping.
  int band() const { return (band2() + 1) / 2; }

  cplx evaluate(double theta, double phi) const;
  /// Values on a tensor grid, theta-major.
  std::vector<cplx> evaluate_on(const std::vector<double>& theta,
                                const std::vector<double>& phi) const;

  SpinField operator+(const SpinField& o) const;
  SpinField operator-(const SpinField& o) const;
  SpinField operator*(cplx a) const;
  SpinField& operator+=(const SpinField& o);
  bool operator==(const SpinField&) const = default;

  /// Pointwise product, exact via triple integrals.
  SpinField multiply(const SpinField& o) const;
  /// Pointwise complex conjugate (spin flips sign).
  SpinField conj() const;
  /// Unit-sphere raising / lowering operators.
  SpinField edth() const;
  SpinField edth_bar() const;
  /// Drop coefficients below tol in magnitude.
  SpinField pruned(double tol = 1e-14) const;
  double coeff_norm() const;  // sqrt(sum |c|^2)

  /// Matrix of multiplication by this field from `in` to `out`:
  /// entry (a, b) = integral of conj(Y_a) * field * Y_b over the unit sphere.
  CMatrix matrix(const SpinBlock& out, const SpinBlock& in) const;

  /// Fit coefficients from samples on a quadrature grid (spin s2, j2 <= band2).
  static SpinField analyze(const std::vector<cplx>& samples, const QuadratureGrid& grid,
                           int s2, int band2);

 private:
  int s2_ = 0;
  std::map<Key, cplx> c_;
};

using Symbol = SpinField;

/// Laplacian -nabla^2 of a scalar symbol under the model metric.
Symbol laplacian(const Symbol& f, const KahlerModel& model = KahlerModel::cp1());

/// Evaluation grid 4x finer than the quadrature needed for `band`.
EvaluationGrid sup_grid_for_band(int band);

struct SupNorm {
  double value = 0.0;
  double resolution = 0.0;  // grid spacing in radians
};

SupNorm sup_norm(const SpinField& f);
SupNorm sup_norm(const SpinField& f, const EvaluationGrid& grid);
/// sup |grad f| in the model metric.
SupNorm gradient_sup_norm(const Symbol& f, const KahlerModel& model = KahlerModel::cp1());

/// Integral against omega, evaluated on `grid`. Throws when the band limit
/// exceeds the grid exactness, naming the required degree.
cplx integrate(const Symbol& f, const QuadratureGrid& grid);
/// Same, on the smallest adequate grid.
cplx integrate(const Symbol& f, const KahlerModel& model = KahlerModel::cp1());

nlohmann::json to_json(const Symbol& f);
/// Reads {"coeffs": [[l, m, re, im], ...]} (integer l, m).
Symbol symbol_from_json(const nlohmann::json& j);

}  // namespace blab
