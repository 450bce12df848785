#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "blab/experiments.hpp"

namespace {

std::string columns_help() {
  std::ostringstream os;
  os << "CSV columns (every experiment starts with experiment,N,value,bound,params_hash):\n";
  for (const auto& e : blab::list_experiments()) {
    os << "  " << e.name << ":";
    for (const auto& c : e.extra_columns) os << ' ' << c;
    if (e.extra_columns.empty()) os << " (none)";
    os << '\n';
  }
  return os.str();
}

// Remaining tokens of the form --a.b value or --a.b=value.
void apply_extras(nlohmann::json& doc, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0) throw blab::InvalidArgument("unexpected argument '" + tok + "'");
    std::string key = tok.substr(2), value;
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) throw blab::InvalidArgument("missing value for --" + key);
      value = extras[++i];
    }
    blab::apply_override(doc, key, value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toeplitz and geometric quantization experiments on CP^1"};
  app.footer(columns_help());
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  std::string config_path, out_dir, Ns;
  long long seed = -1;
  bool no_plots = false;
  run->add_option("config", config_path, "Config JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (default: config 'out' or ./out)");
  run->add_option("--Ns", Ns, "N values: a..b, a,b,c or a JSON list");
  run->add_option("--seed", seed, "Seed for random potentials and sections");
  run->add_flag("--no-plots", no_plots, "Skip the SVG plot");
  run->allow_extras();
  run->footer("Any other --field.path value pair overrides that config field.");

  app.add_subcommand("list-experiments", "List experiments and their CSV columns");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list-experiments")) {
    for (const auto& e : blab::list_experiments()) {
      std::cout << e.name << "\n  " << e.description << "\n  columns: experiment,N,value,bound,"
                << "params_hash";
      for (const auto& c : e.extra_columns) std::cout << ',' << c;
      std::cout << '\n';
    }
    return 0;
  }

  try {
    std::ifstream in(config_path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw blab::InvalidArgument("config: " + config_path + " is not valid JSON");
    if (!Ns.empty()) blab::apply_override(doc, "Ns", Ns);
    if (seed >= 0) doc["seed"] = seed;
    if (!out_dir.empty()) doc["out"] = out_dir;
    if (no_plots) doc["plots"] = false;
    apply_extras(doc, run->remaining());
    const blab::ExperimentConfig cfg = blab::config_from_json(doc);
    const blab::RunArtifacts a = blab::run(cfg);
    std::cout << cfg.experiment << ": " << (a.pass ? "pass" : "FAIL") << "\n  " << a.csv_path
              << "\n  " << a.summary_path << '\n';
    if (!a.svg_path.empty()) std::cout << "  " << a.svg_path << '\n';
    return a.pass ? 0 : 1;
  } catch (const blab::RegimeError& e) {
    std::cerr << "regime error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
