#include <cmath>

#include "blab/geometry.hpp"

namespace blab {

Symbol laplacian(const Symbol& f, const KahlerModel& model) {
  if (f.spin2() != 0) throw InvalidArgument("laplacian: expects a scalar symbol");
  Symbol r(0);
  for (const auto& [k, c] : f.coeffs()) {
    const double lam = model.laplace_eigenvalue(k.first / 2);
    if (lam != 0.0) r.set(k.first, k.second, lam * c);
  }
  return r;
}

EvaluationGrid sup_grid_for_band(int band) {
  const int n = 4 * (std::max(band, 0) + 2);
  return equiangular_grid(n + 1, 2 * n);
}

SupNorm sup_norm(const SpinField& f, const EvaluationGrid& grid) {
  double m = 0.0;
  for (const cplx& v : f.evaluate_on(grid.theta, grid.phi)) m = std::max(m, std::abs(v));
  return {m, grid.resolution};
}

SupNorm sup_norm(const SpinField& f) { return sup_norm(f, sup_grid_for_band(f.band())); }

SupNorm gradient_sup_norm(const Symbol& f, const KahlerModel& model) {
  if (f.spin2() != 0) throw InvalidArgument("gradient_sup_norm: expects a scalar symbol");
  const EvaluationGrid grid = sup_grid_for_band(f.band());
  const auto up = f.edth().evaluate_on(grid.theta, grid.phi);
  const auto dn = f.edth_bar().evaluate_on(grid.theta, grid.phi);
  // |grad f|^2 = (|edth f|^2 + |edth_bar f|^2) / (2 r^2)
  const double scale = 1.0 / (2.0 * model.radius_squared());
  double m = 0.0;
  for (std::size_t i = 0; i < up.size(); ++i)
    m = std::max(m, std::sqrt(scale * (std::norm(up[i]) + std::norm(dn[i]))));
  return {m, grid.resolution};
}

cplx integrate(const Symbol& f, const QuadratureGrid& grid) {
  if (f.spin2() != 0) throw InvalidArgument("integrate: expects a scalar symbol");
  const int band = f.band();
  if (band > grid.exactness_degree) {
    throw InvalidArgument("integrate: band limit " + std::to_string(band) +
                          " exceeds quadrature exactness " +
                          std::to_string(grid.exactness_degree) + "; need n_theta >= " +
                          std::to_string(band / 2 + 1) + " and n_phi >= " +
                          std::to_string(band + 1));
  }
  const auto vals = f.evaluate_on(grid.theta, grid.phi);
  cplx s = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) s += grid.weights[i] * vals[i];
  return s;
}

cplx integrate(const Symbol& f, const KahlerModel& model) {
  return integrate(f, quadrature_for_degree(std::max(f.band(), 0), model.area));
}

nlohmann::json to_json(const Symbol& f) {
  if (f.spin2() != 0) throw InvalidArgument("to_json: only scalar symbols are serializable");
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [k, c] : f.coeffs())
    arr.push_back({k.first / 2, k.second / 2, c.real(), c.imag()});
  return {{"coeffs", arr}};
}

Symbol symbol_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array()) {
    throw InvalidArgument("symbol: expected {\"coeffs\": [[l, m, re, im], ...]}");
  }
  Symbol f(0);
  for (const auto& e : j["coeffs"]) {
    if (!e.is_array() || e.size() != 4) throw InvalidArgument("symbol: each coefficient is [l, m, re, im]");
    const int l = e[0].get<int>(), m = e[1].get<int>();
    if (l < 0 || std::abs(m) > l) throw InvalidArgument("symbol: |m| > l");
    f.add(2 * l, 2 * m, {e[2].get<double>(), e[3].get<double>()});
  }
  return f;
}

}  // namespace blab
