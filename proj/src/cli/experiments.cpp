#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "blab/experiments.hpp"

namespace blab {

using nlohmann::json;

namespace {

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int i = a; i <= b; ++i) v.push_back(i);
  return v;
}

json random_bundle(std::vector<int> degrees, int band, double scale, bool compatible) {
  return {{"degrees", degrees},
          {"random_potential", {{"band", band}, {"scale", scale}, {"compatible", compatible}}}};
}

json default_params(const std::string& name) {
  if (name == "toeplitz-convergence") return {{"symbol", "height"}};
  if (name == "tuynman") {
    json s = json::array();
    for (int l = 1; l <= 2; ++l)
      for (int m = -l; m <= l; ++m) s.push_back("Y" + std::to_string(l) + "," + std::to_string(m));
    return {{"symbols", s}};
  }
  if (name == "gq-gap") return {{"symbol", {{"coeffs", {{1, 0, 1.0, 0.0}, {2, 0, 0.5, 0.0}}}}}};
  if (name == "spectrum") return {{"bundle", {{"degrees", {0}}}}};
  if (name == "kernel-degrees") return {{"bundle", random_bundle({1, -1}, 2, 0.3, false)}};
  if (name == "projector-drift") return {{"bundle", random_bundle({1, -1}, 1, 0.3, true)}};
  if (name == "comparator") {
    return {{"bundle", random_bundle({1, -1}, 1, 0.3, true)},
            {"section", {{"band", 2}}},
            {"margin", 0.1}};
  }
  if (name == "rank-growth") {
    json b = json::array();
    for (int p = -3; p <= 3; ++p) b.push_back({{"degrees", {p}}});
    b.push_back({{"degrees", {1, -1}}});
    return {{"bundles", b}, {"numerical", true}};
  }
  if (name == "idempotent") return {{"projector", "bott"}};
  if (name == "traces") {
    return {{"symbol", {{"coeffs", {{0, 0, std::sqrt(4.0 * kPi), 0.0}, {1, 0, 1.0, 0.0},
                                    {2, 1, 0.5, 0.25}}}}}};
  }
  return json::object();
}

Symbol parse_symbol(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "height") return Symbol::height();
    if (s == "one") return Symbol::constant(1.0);
    int l = 0, m = 0;
    char comma = 0;
    std::istringstream is(s.size() > 1 && s[0] == 'Y' ? s.substr(1) : std::string());
    if (is >> l >> comma >> m && comma == ',' && is.eof() && l >= 0 && std::abs(m) <= l) {
      return Symbol::ylm(l, m);
    }
    throw InvalidArgument("symbol: unknown name '" + s + "' (use height, one, Yl,m or coeffs)");
  }
  return symbol_from_json(j);
}

BundleSpec parse_bundle(const json& j, unsigned seed) {
  BundleSpec V = bundle_from_json(j);
  if (j.contains("random_potential")) {
    if (V.potential) throw InvalidArgument("bundle: give either potential or random_potential");
    const json& r = j["random_potential"];
    V.potential = random_potential(V.degrees, r.value("band", 1), r.value("scale", 0.3), seed,
                                   r.value("compatible", true));
  }
  return V;
}

SymbolMatrix parse_projector(const json& j) {
  const std::string s = j.get<std::string>();
  if (s == "bott") return bott_projector();
  if (s == "bott+trivial") return direct_sum(bott_projector(), identity_projector(1));
  if (s.rfind("trivial:", 0) == 0) return identity_projector(std::stoi(s.substr(8)));
  throw InvalidArgument("projector: unknown name '" + s + "' (bott, bott+trivial, trivial:r)");
}

std::string str(double x) { return format_number(x); }
std::string str(int x) { return std::to_string(x); }
std::string str(bool x) { return x ? "1" : "0"; }

struct Sweep {
  std::vector<double> x, y;
  void add(double n, double v) {
    if (v > 0.0) {
      x.push_back(n);
      y.push_back(v);
    }
  }
  std::optional<double> slope() const {
    if (x.size() < 2) return std::nullopt;
    return loglog_slope(x, y);
  }
};

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

using Runner = std::function<void(const ExperimentConfig&, ExperimentResult&)>;

// ---------------------------------------------------------------------------

void run_dims(const ExperimentConfig& cfg, ExperimentResult& r) {
  bool ok = true;
  const BundleSpec trivial = BundleSpec::line(0);
  for (int N : cfg.Ns) {
    const int dim = h_space(N).dim();
    const int rank = rank_sequence(trivial, {N}, true).ranks.at(N);
    ok = ok && dim == N + 1 && rank == N + 1;
    r.rows.push_back({N, double(dim), double(N + 1), {str(rank)}});
  }
  r.summary["checks"] = {{"dim_equals_N_plus_1", ok}};
  r.pass = ok;
}

void run_toeplitz_convergence(const ExperimentConfig& cfg, ExperimentResult& r) {
  const Symbol f = parse_symbol(cfg.doc.at("symbol"));
  const bool is_height = (f - Symbol::height()).pruned(1e-14).band2() < 0;
  const NormTable t = norm_convergence(f, cfg.Ns);
  bool below_sup = true, closed = true, final_ok = true;
  for (const auto& row : t.rows) {
    const double gap = std::abs(row.norm - t.sup_f);
    below_sup = below_sup && row.norm <= t.sup_f * (1 + 1e-9) + 1e-12;
    std::vector<std::string> extra{str(gap)};
    if (is_height) {
      const double want = 2.0 / (row.N + 2);
      closed = closed && std::abs(gap - want) < 1e-9;
      extra.push_back(str(want));
    } else {
      extra.push_back("");
    }
    if (row.N >= 60 && gap > 0.05) final_ok = false;
    r.rows.push_back({row.N, row.norm, t.sup_f, extra});
  }
  r.summary["sup_f"] = t.sup_f;
  r.summary["monotone"] = t.monotone;
  r.summary["final_gap"] = t.final_gap;
  r.summary["checks"] = {{"norm_below_sup", below_sup},
                         {"closed_form", closed},
                         {"gap_at_most_0.05_for_N_ge_60", final_ok}};
  r.pass = below_sup && closed && final_ok;
  r.log_plot = false;
}

void run_tuynman(const ExperimentConfig& cfg, ExperimentResult& r) {
  std::vector<Symbol> fs;
  for (const auto& s : cfg.doc.at("symbols")) fs.push_back(parse_symbol(s));
  if (fs.empty()) throw InvalidArgument("tuynman: symbols must be nonempty");
  bool ok = true;
  for (int N : cfg.Ns) {
    double worst = 0.0;
    for (const auto& f : fs) worst = std::max(worst, tuynman_residual(f, N));
    ok = ok && worst < 1e-8;
    r.rows.push_back({N, worst, 1e-8, {}});
  }
  r.summary["checks"] = {{"residual_below_1e-8", ok}};
  r.pass = ok;
}

void run_gq_gap(const ExperimentConfig& cfg, ExperimentResult& r) {
  const Symbol f = parse_symbol(cfg.doc.at("symbol"));
  bool bounded = true;
  Sweep sw;
  for (int N : cfg.Ns) {
    const DefectBound d = gq_toeplitz_gap(f, N);
    bounded = bounded && d.defect <= d.bound;
    sw.add(N, d.defect);
    r.rows.push_back({N, d.defect, d.bound, {}});
  }
  const auto slope = sw.slope();
  const bool slope_ok = slope && std::abs(*slope + 1.0) <= 0.1;
  r.summary["slope"] = opt(slope);
  r.summary["checks"] = {{"gap_below_bound", bounded}, {"slope_minus_one_within_0.1", slope_ok}};
  r.pass = bounded && slope_ok;
}

void run_spectrum(const ExperimentConfig& cfg, ExperimentResult& r) {
  const BundleSpec V = parse_bundle(cfg.doc.at("bundle"), cfg.seed);
  const double C = weitzenbock_constant(V);
  const bool trivial = V.degrees == std::vector<int>{0} && V.holomorphic_round();
  bool gap_ok = true;
  for (int N : cfg.Ns) {
    const int lmax = cfg.doc.contains("lmax") ? cfg.doc["lmax"].get<int>() : recommended_lmax(V, N);
    const DolbeaultOperator D = build_dolbeault(V, N, lmax);
    const SpectralProjector P = kernel_projector(D);
    const D2Spectrum s = spectrum_d2(D);
    const double gap = spectral_gap(s, P.threshold);
    gap_ok = gap_ok && gap >= N - C - 1e-9 * std::max(1.0, double(N));
    r.rows.push_back({N, gap, N - C,
                      {V.display_label(), str(C), str(P.rank), str(P.range_degree0),
                       str(P.rank - P.range_degree0), str(s.max_imag)}});
  }
  r.summary["C"] = C;
  r.summary["bundle"] = V.display_label();
  json checks = {{"gap_at_least_N_minus_C", gap_ok}};
  if (trivial) checks["C_below_1"] = C < 1.0;
  r.summary["checks"] = checks;
  r.pass = gap_ok && (!trivial || C < 1.0);
  r.log_plot = false;
}

void run_kernel_degrees(const ExperimentConfig& cfg, ExperimentResult& r) {
  const BundleSpec V = parse_bundle(cfg.doc.at("bundle"), cfg.seed);
  bool ok = true;
  int checked = 0;
  for (int N : cfg.Ns) {
    const int lmax = cfg.doc.contains("lmax") ? cfg.doc["lmax"].get<int>() : recommended_lmax(V, N);
    const KernelSplit k = kernel_degree_split(build_dolbeault(V, N, lmax));
    if (k.in_regime) {
      ++checked;
      ok = ok && k.dim_degree1 == 0 && k.min_psi0 > 1e-6;
    }
    r.rows.push_back({N, k.min_psi0, 1e-6,
                      {str(k.dim_degree0), str(k.dim_degree1), str(k.C), str(k.B_norm),
                       str(k.in_regime)}});
    r.summary["C"] = k.C;
    r.summary["B_norm"] = k.B_norm;
  }
  r.summary["self_adjoint"] = V.self_adjoint();
  r.summary["rows_in_regime"] = checked;
  r.summary["checks"] = {{"even_kernel_with_nonvanishing_degree0", ok},
                         {"some_row_in_regime", checked > 0}};
  r.pass = ok && checked > 0;
}

void run_projector_drift(const ExperimentConfig& cfg, ExperimentResult& r) {
  const BundleSpec V = parse_bundle(cfg.doc.at("bundle"), cfg.seed);
  const BundleSpec W = V.round();
  bool bound_ok = true, contour_ok = true;
  Sweep sw;
  for (int N : cfg.Ns) {
    const ProjectorDistance d = projector_distance(V, W, N);
    if (d.applicable) {
      bound_ok = bound_ok && d.measured <= d.bound;
      contour_ok = contour_ok && d.measured <= d.contour_bound;
    }
    sw.add(N, d.measured);
    r.rows.push_back({N, d.measured, d.applicable ? d.bound : NAN,
                      {str(d.contour_bound), str(d.applicable), str(d.A_norm), str(d.C)}});
  }
  const auto slope = sw.slope();
  const bool slope_ok = slope && *slope <= -0.45;
  r.summary["slope"] = opt(slope);
  r.summary["checks"] = {{"measured_below_bound", bound_ok},
                         {"slope_at_most_-0.45", slope_ok},
                         {"measured_below_contour_bound", contour_ok}};
  // The contour bound is reported only; the pass flag uses the stated bound.
  r.pass = bound_ok && slope_ok;
}

void run_comparator(const ExperimentConfig& cfg, ExperimentResult& r) {
  const BundleSpec V = parse_bundle(cfg.doc.at("bundle"), cfg.seed);
  const BundleSpec W = V.round();
  const SectionOfV v =
      SectionOfV::random(V.degrees, 2 * cfg.doc.at("section").value("band", 2), cfg.seed);
  const double margin = cfg.doc.value("margin", 0.1);
  bool bij = true;
  Sweep sw;
  for (int N : cfg.Ns) {
    const Comparator c = comparator(V, W, N, v, margin);
    if (c.projector_distance < 0.5) bij = bij && c.bijective;
    sw.add(N, c.residual);
    r.rows.push_back({N, c.residual, c.projector_distance,
                      {str(c.smallest_sv), str(c.bijective)}});
  }
  const auto slope = sw.slope();
  const bool decays = slope && *slope < 0.0;
  r.summary["residual_slope"] = opt(slope);
  r.summary["checks"] = {{"bijective_where_distance_below_0.5", bij},
                         {"residual_decays", decays}};
  r.pass = bij && decays;
}

void run_rank_growth(const ExperimentConfig& cfg, ExperimentResult& r) {
  const bool numerical = cfg.doc.value("numerical", true);
  json per = json::array();
  bool ok = true;
  for (const auto& bj : cfg.doc.at("bundles")) {
    const BundleSpec V = parse_bundle(bj, cfg.seed);
    const QuantizedModule q = rank_sequence(V, cfg.Ns, numerical);
    int pmax = 1;
    for (int p : V.degrees) pmax = std::max(pmax, p);
    const bool good = q.n_star && *q.n_star <= pmax;
    ok = ok && good;
    for (int N : q.Ns) {
      r.rows.push_back({N, double(q.ranks.at(N)), double(q.poly(N)),
                        {V.display_label(), str(q.ranks_degree1.at(N))}});
    }
    json dev = json::object();
    for (const auto& [N, d] : q.deviations) dev[std::to_string(N)] = d;
    per.push_back({{"bundle", V.display_label()},
                   {"poly", {q.poly.c0, q.poly.c1}},
                   {"n_star", opt(q.n_star)},
                   {"n_star_allowed", pmax},
                   {"deviations", dev},
                   {"pass", good}});
  }
  std::stable_sort(r.rows.begin(), r.rows.end(),
                   [](const ResultRow& a, const ResultRow& b) { return a.N < b.N; });
  r.summary["bundles"] = per;
  r.summary["checks"] = {{"rank_polynomial_from_n_star", ok}};
  r.pass = ok;
  r.log_plot = false;
}

void run_idempotent(const ExperimentConfig& cfg, ExperimentResult& r) {
  const SymbolMatrix e = parse_projector(cfg.doc.at("projector"));
  const LiftedIdempotent L = lift_idempotent(e, cfg.Ns);
  const TraceCheck tc = idempotent_trace_check(e, cfg.Ns);
  bool idem = true;
  std::optional<double> dist40;
  for (const auto& row : tc.rows) {
    const int N = row.N;
    idem = idem && L.idempotency_defect.at(N) < 1e-10;
    if (N >= 40 && !dist40) dist40 = L.symbol_distance.at(N);
    r.rows.push_back({N, L.idempotency_defect.at(N), 1e-10,
                      {str(row.trace), std::to_string(row.poly), str(L.symbol_distance.at(N)),
                       str(L.gap.at(N))}});
  }
  const bool trace_ok = tc.n_star && *tc.n_star <= 3;
  const bool dist_ok = dist40 && *dist40 < 1e-3;
  r.summary["chern_degree"] = tc.chern_degree;
  r.summary["poly"] = {tc.poly.c0, tc.poly.c1};
  r.summary["n_star"] = opt(tc.n_star);
  r.summary["symbol_distance_at_40"] = opt(dist40);
  r.summary["checks"] = {{"idempotent_to_1e-10", idem},
                         {"trace_polynomial_from_n_star_le_3", trace_ok},
                         {"symbol_distance_below_1e-3_by_40", dist_ok}};
  r.pass = idem && trace_ok && dist_ok;
}

void run_spinor(const ExperimentConfig& cfg, ExperimentResult& r) {
  bool ok = true;
  for (const auto& row : spinor_rank_gap(cfg.Ns)) {
    ok = ok && row.gap == 2;
    r.rows.push_back({row.N, double(row.gap), 2.0,
                      {str(row.rk_plus), str(row.rk_minus), str(row.kernel_bound)}});
  }
  r.summary["checks"] = {{"gap_equals_2", ok}};
  r.pass = ok;
  r.log_plot = false;
}

void run_traces(const ExperimentConfig& cfg, ExperimentResult& r) {
  const Symbol f = parse_symbol(cfg.doc.at("symbol"));
  const TraceFit fit = trace_asymptotics(f, cfg.Ns);
  for (int N : cfg.Ns) {
    const QuantOperator T = toeplitz(f, N);
    r.rows.push_back({N, T.matrix.entries.trace().real(), fit.target * N,
                      {str(normalized_trace(T).real())}});
  }
  const double rel = std::abs(fit.leading - fit.target) / std::max(std::abs(fit.target), 1e-300);
  r.summary["leading"] = fit.leading;
  r.summary["intercept"] = fit.intercept;
  r.summary["target"] = fit.target;
  r.summary["relative_error"] = rel;
  r.summary["checks"] = {{"leading_within_1_percent", rel <= 0.01}};
  r.pass = rel <= 0.01;
  r.log_plot = false;
}

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> m = {
      {"dims", run_dims},
      {"toeplitz-convergence", run_toeplitz_convergence},
      {"tuynman", run_tuynman},
      {"gq-gap", run_gq_gap},
      {"spectrum", run_spectrum},
      {"kernel-degrees", run_kernel_degrees},
      {"projector-drift", run_projector_drift},
      {"comparator", run_comparator},
      {"rank-growth", run_rank_growth},
      {"idempotent", run_idempotent},
      {"spinor", run_spinor},
      {"traces", run_traces},
  };
  return m;
}

std::vector<int> parse_Ns(const std::string& s) {
  std::vector<int> out;
  const auto dots = s.find("..");
  try {
    if (dots != std::string::npos) return range(std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2)));
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  } catch (const std::exception&) {
    throw InvalidArgument("Ns: cannot parse '" + s + "' (use a..b, a,b,c or a JSON list)");
  }
  return out;
}

}  // namespace

const std::vector<ExperimentInfo>& list_experiments() {
  static const std::vector<ExperimentInfo> v = {
      {"dims", "dim H_N and the trivial-bundle kernel rank against N+1",
       {"kernel_rank"}, range(1, 40)},
      {"toeplitz-convergence", "|T_N(f)| against sup|f|; for f = height also 2/(N+2)",
       {"gap", "closed_form_gap"}, {2, 5, 10, 20, 40, 60}},
      {"tuynman", "max residual between the two geometric quantization paths",
       {}, range(1, 20)},
      {"gq-gap", "|Q_N(f) - T_N(f)| against lambda_max/(2N) sum_l sup|f_l|",
       {}, {16, 32, 64, 128, 256}},
      {"spectrum", "first nonzero eigenvalue of D^2 against N - C",
       {"bundle", "C", "kernel_rank", "dim_degree0", "dim_degree1", "max_imag"}, range(2, 20)},
      {"kernel-degrees", "degree split of ker D and min |psi_0| for a seeded potential",
       {"dim_degree0", "dim_degree1", "C", "B_norm", "in_regime"}, range(4, 20)},
      {"projector-drift", "|Pi^V - Pi^W| against the perturbation bound",
       {"contour_bound", "applicable", "A_norm", "C"}, {8, 16, 32, 64}},
      {"comparator", "|T^V(v) u - T^W(v)| with the projector distance as bound column",
       {"smallest_sv", "bijective"}, {4, 8, 16, 32}},
      {"rank-growth", "dim of the quantized module against the rank polynomial",
       {"bundle", "rank_degree1"}, range(1, 12)},
      {"idempotent", "lifted idempotent defect, trace and distance to T_N(e)",
       {"trace", "poly", "symbol_distance", "gap"}, {1, 2, 3, 4, 5, 10, 20, 40}},
      {"spinor", "rk S+_N - rk S-_N against 2",
       {"rk_plus", "rk_minus", "kernel_bound"}, range(2, 40)},
      {"traces", "tr T_N(f) against N times (1/2pi) integral of f",
       {"normalized_trace"}, range(10, 40)},
  };
  return v;
}

const ExperimentInfo& experiment_info(const std::string& name) {
  for (const auto& e : list_experiments())
    if (e.name == name) return e;
  throw InvalidArgument("unknown experiment '" + name + "'; see blab list-experiments");
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  if (!j.contains("experiment") || !j["experiment"].is_string()) {
    throw InvalidArgument("config: missing string field 'experiment'");
  }
  ExperimentConfig cfg;
  cfg.experiment = j["experiment"].get<std::string>();
  const ExperimentInfo& info = experiment_info(cfg.experiment);

  json doc = default_params(cfg.experiment);
  for (const auto& [k, v] : j.items()) doc[k] = v;
  if (!doc.contains("Ns")) doc["Ns"] = info.default_Ns;
  if (doc["Ns"].is_string()) doc["Ns"] = parse_Ns(doc["Ns"].get<std::string>());
  if (!doc["Ns"].is_array()) throw InvalidArgument("config: Ns must be a list of integers");
  if (!doc.contains("seed")) doc["seed"] = 1;

  cfg.Ns = doc["Ns"].get<std::vector<int>>();
  if (cfg.Ns.empty()) throw InvalidArgument("config: Ns must be nonempty");
  for (std::size_t i = 0; i < cfg.Ns.size(); ++i) {
    if (cfg.Ns[i] < 1) throw InvalidArgument("config: Ns must be positive");
    if (i && cfg.Ns[i] <= cfg.Ns[i - 1]) throw InvalidArgument("config: Ns must be ascending");
  }
  const long long seed = doc["seed"].get<long long>();
  if (seed < 0) throw InvalidArgument("config: seed must be nonnegative");
  cfg.seed = static_cast<unsigned>(seed);
  cfg.out_dir = doc.value("out", std::string("out"));
  cfg.plots = doc.value("plots", true);
  // Output location does not change results, so it stays out of the hash.
  doc.erase("out");
  doc.erase("plots");
  cfg.doc = std::move(doc);
  return cfg;
}

void apply_override(json& doc, const std::string& path, const std::string& value) {
  if (path.empty()) throw InvalidArgument("override: empty field path");
  json* node = &doc;
  std::stringstream ss(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(ss, key, '.')) keys.push_back(key);
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    json& next = (*node)[keys[i]];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw InvalidArgument("override: '" + keys[i] + "' is not an object");
    node = &next;
  }
  json v = json::parse(value, nullptr, false);
  if (v.is_discarded()) v = value;
  if (keys.back() == "Ns" && v.is_string()) v = parse_Ns(value);
  (*node)[keys.back()] = v;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const ExperimentInfo& info = experiment_info(cfg.experiment);
  ExperimentResult r;
  r.experiment = cfg.experiment;
  r.extra_columns = info.extra_columns;
  runners().at(cfg.experiment)(cfg, r);
  std::stable_sort(r.rows.begin(), r.rows.end(),
                   [](const ResultRow& a, const ResultRow& b) { return a.N < b.N; });
  r.summary["experiment"] = cfg.experiment;
  r.summary["pass"] = r.pass;
  return r;
}

}  // namespace blab
