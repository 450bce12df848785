#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blab/experiments.hpp"

namespace blab {

std::string params_hash(const nlohmann::json& doc) {
  const std::string s = doc.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const ExperimentResult& r, const std::string& hash) {
  std::ostringstream os;
  os << "experiment,N,value,bound,params_hash";
  for (const auto& c : r.extra_columns) os << ',' << c;
  os << '\n';
  for (const auto& row : r.rows) {
    os << r.experiment << ',' << row.N << ',' << format_number(row.value) << ','
       << format_number(row.bound) << ',' << hash;
    for (std::size_t i = 0; i < r.extra_columns.size(); ++i)
      os << ',' << (i < row.extras.size() ? csv_cell(row.extras[i]) : "");
    os << '\n';
  }
  return os.str();
}

std::string to_svg(const ExperimentResult& r) {
  const bool logy = r.log_plot;
  std::vector<std::pair<double, double>> val, bnd;
  for (const auto& row : r.rows) {
    auto ok = [&](double y) { return std::isfinite(y) && (!logy || y > 0.0); };
    if (ok(row.value)) val.emplace_back(row.N, row.value);
    if (ok(row.bound)) bnd.emplace_back(row.N, row.bound);
  }
  if (val.size() < 2) return {};
  auto tx = [&](double x) { return logy ? std::log10(x) : x; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto* s : {&val, &bnd})
    for (const auto& [x, y] : *s) {
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, tx(y));
      y1 = std::max(y1, tx(y));
    }
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const double W = 640, H = 400, m = 50;
  auto px = [&](double x) { return m + (tx(x) - x0) / (x1 - x0) * (W - 2 * m); };
  auto py = [&](double y) { return H - m - (tx(y) - y0) / (y1 - y0) * (H - 2 * m); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << m << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
     << r.experiment << (logy ? " (log-log)" : "") << ": value (blue), bound (red)</text>\n"
     << "<line x1=\"" << m << "\" y1=\"" << H - m << "\" x2=\"" << W - m << "\" y2=\"" << H - m
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << H - m
     << "\" stroke=\"black\"/>\n";
  auto poly = [&](const std::vector<std::pair<double, double>>& s, const char* color) {
    if (s.empty()) return;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : s) os << format_number(px(x)) << ',' << format_number(py(y)) << ' ';
    os << "\"/>\n";
  };
  poly(val, "blue");
  poly(bnd, "red");
  const char* unit = logy ? "log10 " : "";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" font-family=\"sans-serif\" "
     << "font-size=\"12\">" << unit << "N in [" << format_number(x0) << ", " << format_number(x1)
     << "]</text>\n"
     << "<text x=\"4\" y=\"" << m - 8 << "\" font-family=\"sans-serif\" font-size=\"12\">" << unit
     << "y in [" << format_number(y0) << ", " << format_number(y1) << "]</text>\n"
     << "</svg>\n";
  return os.str();
}

RunArtifacts run(const ExperimentConfig& cfg) {
  const ExperimentResult r = run_experiment(cfg);
  const std::string hash = params_hash(cfg.doc);
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const fs::path base = fs::path(cfg.out_dir) / cfg.experiment;
  RunArtifacts a;
  a.pass = r.pass;
  a.csv_path = base.string() + ".csv";
  a.summary_path = base.string() + ".json";
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << text;
  };
  write(a.csv_path, to_csv(r, hash));
  nlohmann::json summary = r.summary;
  summary["params_hash"] = hash;
  summary["config"] = cfg.doc;
  write(a.summary_path, summary.dump(2) + "\n");
  if (cfg.plots) {
    const std::string svg = to_svg(r);
    if (!svg.empty()) {
      a.svg_path = base.string() + ".svg";
      write(a.svg_path, svg);
    }
  }
  return a;
}

}  // namespace blab
