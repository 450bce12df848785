#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blab/experiments.hpp"

using namespace blab;
using nlohmann::json;

namespace {

ExperimentResult run_doc(const std::string& text) { return run_experiment(config_from_json(json::parse(text))); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("params hash is deterministic and sensitive") {
  const json a = json::parse(R"({"experiment": "dims", "Ns": [1, 2]})");
  CHECK(params_hash(a) == params_hash(json::parse(R"({"Ns": [1, 2], "experiment": "dims"})")));
  CHECK(params_hash(a).size() == 16);
  CHECK(params_hash(a) != params_hash(json::parse(R"({"experiment": "dims", "Ns": [1, 3]})")));
  // Output location does not enter the hash.
  const ExperimentConfig c1 = config_from_json(json::parse(R"({"experiment": "dims", "out": "x"})"));
  const ExperimentConfig c2 = config_from_json(json::parse(R"({"experiment": "dims", "out": "y"})"));
  CHECK(params_hash(c1.doc) == params_hash(c2.doc));
  CHECK(c1.out_dir == "x");
}

TEST_CASE("numbers format to shortest round-trip form") {
  for (double x : {0.1, 1.0 / 3.0, 2.0, 1e-300, -7.25, 6.02214076e23}) CHECK(std::stod(format_number(x)) == x);
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"experiment": "nope"})")), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"experiment": "dims", "Ns": []})")), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"experiment": "dims", "Ns": [3, 2]})")), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"experiment": "dims", "Ns": [0, 1]})")), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"Ns": [1]})")), InvalidArgument);
  const ExperimentConfig c = config_from_json(json::parse(R"({"experiment": "spinor"})"));
  CHECK(c.Ns == experiment_info("spinor").default_Ns);
  CHECK(list_experiments().size() == 12);
}

TEST_CASE("dotted overrides") {
  json doc = json::parse(R"({"experiment": "spectrum", "bundle": {"degrees": [0]}})");
  apply_override(doc, "Ns", "2..5");
  CHECK(doc["Ns"] == json::parse("[2, 3, 4, 5]"));
  apply_override(doc, "Ns", "3,7");
  CHECK(doc["Ns"] == json::parse("[3, 7]"));
  apply_override(doc, "bundle.degrees", "[1, -1]");
  CHECK(doc["bundle"]["degrees"] == json::parse("[1, -1]"));
  apply_override(doc, "bundle.label", "plain text");
  CHECK(doc["bundle"]["label"] == "plain text");
  apply_override(doc, "seed", "9");
  CHECK(config_from_json(doc).seed == 9u);
}

TEST_CASE("dims: rank column is N + 1") {
  const ExperimentResult r = run_doc(R"({"experiment": "dims", "Ns": "1..12"})");
  CHECK(r.pass);
  REQUIRE(r.rows.size() == 12);
  for (const auto& row : r.rows) {
    CHECK(row.value == row.N + 1);
    CHECK(row.extras.at(0) == std::to_string(row.N + 1));
  }
}

TEST_CASE("tuynman: Y_10 residuals below 1e-8") {
  const ExperimentResult r = run_doc(R"({"experiment": "tuynman", "Ns": [2, 4, 8], "symbols": ["Y1,0"]})");
  CHECK(r.pass);
  for (const auto& row : r.rows) CHECK(row.value < 1e-8);
}

TEST_CASE("spinor: gap column is 2 on N in [2, 40]") {
  const ExperimentResult r = run_doc(R"({"experiment": "spinor", "Ns": "2..40"})");
  CHECK(r.pass);
  REQUIRE(r.rows.size() == 39);
  for (const auto& row : r.rows) {
    CHECK(row.value == 2.0);
    CHECK(row.extras.at(2) == std::to_string(2 * (row.N + 1)));
  }
}

TEST_CASE("summary carries a boolean pass") {
  const ExperimentResult r = run_doc(R"({"experiment": "traces"})");
  CHECK(r.summary.at("pass").is_boolean());
  CHECK(r.summary.at("pass").get<bool>() == r.pass);
  CHECK(r.summary.contains("checks"));
}

TEST_CASE("artifacts are byte-identical across runs") {
  const auto dir = std::filesystem::temp_directory_path() / "blab_cli_test";
  std::filesystem::remove_all(dir);
  json doc = json::parse(R"({"experiment": "kernel-degrees", "Ns": [4, 5], "seed": 3})");
  doc["out"] = (dir / "a").string();
  const RunArtifacts a = run(config_from_json(doc));
  doc["out"] = (dir / "b").string();
  const RunArtifacts b = run(config_from_json(doc));
  const std::string csv = slurp(a.csv_path);
  CHECK(!csv.empty());
  CHECK(csv == slurp(b.csv_path));
  CHECK(slurp(a.svg_path) == slurp(b.svg_path));
  CHECK(csv.rfind("experiment,N,value,bound,params_hash", 0) == 0);
  const json s = json::parse(slurp(a.summary_path));
  CHECK(s.at("pass").get<bool>() == a.pass);
  std::filesystem::remove_all(dir);
}
