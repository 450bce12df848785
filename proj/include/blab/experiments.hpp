#pragma once

// Named experiment sweeps over N, their tabular output, and the pass/fail
// summary each one derives from its acceptance thresholds.

#include <string>
#include <vector>

#include "blab/modules_k.hpp"

namespace blab {

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::vector<std::string> extra_columns;  // after experiment,N,value,bound,params_hash
  std::vector<int> default_Ns;
};

const std::vector<ExperimentInfo>& list_experiments();
const ExperimentInfo& experiment_info(const std::string& name);

/// A validated config. `doc` is the full JSON document, with defaults filled
/// in, and is what params_hash is computed from.
struct ExperimentConfig {
  std::string experiment;
  std::vector<int> Ns;
  unsigned seed = 1;
  std::string out_dir = "out";
  bool plots = true;
  nlohmann::json doc;
};

/// Throws InvalidArgument on unknown experiments, empty or unsorted Ns.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Applies a dotted-path override (`Ns`, `bundle.degrees`, `seed`, ...).
/// The value is parsed as JSON when possible and kept as a string otherwise;
/// for Ns, "a..b" and comma lists are accepted as well.
void apply_override(nlohmann::json& doc, const std::string& path, const std::string& value);

struct ResultRow {
  int N = 0;
  double value = 0.0;
  double bound = 0.0;
  std::vector<std::string> extras;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<std::string> extra_columns;
  std::vector<ResultRow> rows;  // sorted by N (stable within equal N)
  nlohmann::json summary;       // always carries a boolean "pass"
  bool pass = false;
  bool log_plot = true;         // value and bound are positive, plot log-log
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// FNV-1a 64-bit of the compact dump of `doc`, as 16 hex digits.
std::string params_hash(const nlohmann::json& doc);

/// Shortest round-trip decimal for a double, so identical runs give
/// identical bytes.
std::string format_number(double x);

std::string to_csv(const ExperimentResult& r, const std::string& hash);
/// Line plot of value and bound against N; empty if nothing is plottable.
std::string to_svg(const ExperimentResult& r);

struct RunArtifacts {
  std::string csv_path;
  std::string summary_path;
  std::string svg_path;  // empty when no plot was written
  bool pass = false;
};

/// Runs the experiment and writes <out>/<experiment>.csv, .json and .svg.
RunArtifacts run(const ExperimentConfig& cfg);

}  // namespace blab
