#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dynsymlab/experiment.hpp"

using namespace dynsymlab;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dynsymlab_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json field_chain_doc(int n_sites, double b) {
  return json{
      {"model",
       {{"variant", "field_chain"},
        {"n_sites", n_sites},
        {"couplings", {{"B", b}}}}},
      {"finder", {{"uniform_only", true}}},
      {"dynamics",
       {{"initial_state", "default"},
        {"grid", {{"t0", 0.0}, {"dt", 0.1}, {"n_steps", 256}}},
        {"window", {0.5, 1.0}},
        {"observables", {"sigma_x@1"}}}},
  };
}

}  // namespace

TEST_CASE("unknown keys are fatal at every level") {
  json doc = field_chain_doc(4, 1.0);
  doc["extra"] = 1;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = field_chain_doc(4, 1.0);
  doc["model"]["typo"] = 1;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = field_chain_doc(4, 1.0);
  doc["finder"]["tolerance"] = 1e-8;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = field_chain_doc(4, 1.0);
  doc["dynamics"]["grid"]["steps"] = 10;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("invalid values are rejected with ConfigError") {
  json doc = field_chain_doc(4, 1.0);
  doc["model"]["variant"] = "ising";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = field_chain_doc(4, 1.0);
  doc["model"]["couplings"]["B"] = "strong";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = field_chain_doc(4, 1.0);
  doc["model"]["boundary"] = "moebius";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = field_chain_doc(4, 1.0);
  doc["finder"]["tol_residual"] = 0.0;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = field_chain_doc(4, 1.0);
  doc["dynamics"]["window"] = {0.5};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = field_chain_doc(4, 1.0);
  doc["dynamics"]["grid"]["dt"] = -0.1;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = field_chain_doc(4, 1.0);
  doc["model"].erase("variant");
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("config serialization round-trips") {
  const json doc = field_chain_doc(5, 0.7);
  const ExperimentConfig config = parse_config(doc);
  const json emitted = config_to_json(config);
  const ExperimentConfig again = parse_config(emitted);
  CHECK(config_to_json(again) == emitted);
  CHECK(config.model.n_sites == 5);
  CHECK(config.model.couplings.at("B") == doctest::Approx(0.7));
  CHECK(config.finder.uniform_only);
  CHECK(config.dynamics.window.first == doctest::Approx(0.5));
}

TEST_CASE("load_config reports unreadable files and bad JSON") {
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  const fs::path dir = fresh_dir("bad_json");
  std::ofstream(dir / "broken.json") << "{\"model\": ";
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
}

TEST_CASE("observable labels resolve against the site basis") {
  const LatticeSpec spin{3, 2, Boundary::Open};
  const LatticeOperator sx = parse_observable("sigma_x@2", spin);
  LatticeOperator direct = embed(pauli_basis()[0], 2, spin);
  direct.mat -= sx.mat;
  CHECK(hs_norm(direct) < 1e-14);

  CHECK_THROWS_AS(parse_observable("sigma_x", spin), ConfigError);
  CHECK_THROWS_AS(parse_observable("sigma_x@0", spin), ConfigError);
  CHECK_THROWS_AS(parse_observable("sigma_x@4", spin), ConfigError);
  CHECK_THROWS_AS(parse_observable("sigma_x@one", spin), ConfigError);
  CHECK_THROWS_AS(parse_observable("sigma_q@1", spin), ConfigError);

  const LatticeSpec hub{2, 4, Boundary::Open};
  const LatticeOperator n_up = parse_observable("n_up@1", hub);
  LatticeOperator hd = embed(hubbard_site_ops().n_up, 1, hub);
  hd.mat -= n_up.mat;
  CHECK(hs_norm(hd) < 1e-14);
  // Hubbard convenience labels are spin-chain errors.
  CHECK_THROWS_AS(parse_observable("n_up@1", spin), ConfigError);
}

TEST_CASE("csv values survive a parse round-trip exactly") {
  for (double v : {0.0, 1.0 / 3.0, -2.718281828459045e-7, 1e17, -0.125}) {
    CHECK(std::stod(format_csv_value(v)) == v);
  }
}

TEST_CASE("run_find writes a deterministic symmetry report") {
  const ExperimentConfig config = parse_config(field_chain_doc(4, 1.0));
  const fs::path dir_a = fresh_dir("find_a");
  const fs::path dir_b = fresh_dir("find_b");
  const json doc = run_find(config, dir_a);
  run_find(config, dir_b);

  CHECK(doc.at("pair_count").get<int>() == 1);
  CHECK(doc.at("symmetries").size() == 2);
  CHECK(doc.at("charges").size() == 1);
  CHECK(std::abs(std::abs(doc["symmetries"][0]["lambda"].get<double>()) -
                 2.0) < 1e-9);
  CHECK(slurp(dir_a / "symmetries.json") == slurp(dir_b / "symmetries.json"));
}

TEST_CASE("run_evolve writes the series CSV and the metrics document") {
  const ExperimentConfig config = parse_config(field_chain_doc(4, 1.0));
  const fs::path dir = fresh_dir("evolve");
  const json metrics = run_evolve(config, dir);

  const fs::path csv_path = dir / "sigma_x_1.csv";
  REQUIRE(fs::exists(csv_path));
  std::ifstream csv(csv_path);
  std::string line;
  REQUIRE(std::getline(csv, line));
  CHECK(line == "t,value");
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    const double t = std::stod(line.substr(0, comma));
    const double v = std::stod(line.substr(comma + 1));
    CHECK(std::abs(v - std::cos(2.0 * t)) < 1e-10);
    ++rows;
  }
  CHECK(rows == 256);

  REQUIRE(fs::exists(dir / "metrics.json"));
  const auto& entry = metrics.at("observables").at(0);
  CHECK(entry.at("observable") == "sigma_x@1");
  CHECK(entry.at("late_window_variance").get<double>() > 0.1);
  CHECK(entry.at("thermal_gap").is_number());
  CHECK(!entry.at("fourier_peaks").empty());
  CHECK(metrics.at("state_energy").get<double>() ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("run_evolve reports an unmatchable thermal energy as null") {
  json doc = field_chain_doc(4, 1.0);
  doc["dynamics"]["initial_state"] = "aligned";
  const ExperimentConfig config = parse_config(doc);
  const fs::path dir = fresh_dir("evolve_edge");
  const json metrics = run_evolve(config, dir);
  const auto& entry = metrics.at("observables").at(0);
  CHECK(entry.at("thermal_gap").is_null());
  CHECK(entry.contains("warning"));
}

TEST_CASE("run_theorem1 emits one conserved charge per pair") {
  const ExperimentConfig config = parse_config(field_chain_doc(4, 1.0));
  const fs::path dir = fresh_dir("theorem1");
  const json doc = run_theorem1(config, dir);
  REQUIRE(doc.at("pairs").size() == 1);
  const auto& entry = doc["pairs"][0];
  CHECK(entry.at("lambda").get<double>() == doctest::Approx(2.0));
  CHECK(entry.at("conservation_residual").get<double>() < 1e-10);
  CHECK(fs::exists(dir / "theorem1.json"));
}

TEST_CASE("run_theorem2 verifies the split and rejects hubbard input") {
  json doc = field_chain_doc(4, 1.0);
  doc["model"]["variant"] = "heisenberg_nnn";
  doc["model"]["couplings"] = {{"J", 1.0}, {"B", 0.9}};
  const ExperimentConfig config = parse_config(doc);
  const fs::path dir = fresh_dir("theorem2");
  const json out = run_theorem2(config, dir);
  CHECK(out.at("equality_residual").get<double>() < 1e-12);
  REQUIRE(!out.at("roots").empty());
  for (const auto& root : out["roots"]) {
    CHECK(std::abs(root.at("predicted_lambda").get<double>() -
                   root.at("measured_lambda").get<double>()) < 1e-9);
  }

  json hub = field_chain_doc(2, 0.0);
  hub["model"]["variant"] = "hubbard";
  hub["model"]["couplings"] = {{"t", 1.0}, {"U", 2.0}, {"mu", 0.5}, {"B", 0.7}};
  hub["dynamics"]["observables"] = {"n_up@1"};
  CHECK_THROWS_AS(run_theorem2(parse_config(hub), fresh_dir("theorem2_hub")),
                  ConfigError);
}

TEST_CASE("run_demo compares variances and guards the config pair") {
  const ExperimentConfig config = parse_config(field_chain_doc(4, 1.0));
  const fs::path dir = fresh_dir("demo");
  const json doc = run_demo(config, config, dir);
  CHECK(doc["first"]["pair_count"] == doc["second"]["pair_count"]);
  REQUIRE(doc.at("variance_ratios").size() == 1);
  CHECK(doc["variance_ratios"][0]["first_over_second"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fs::exists(dir / "demo.json"));

  ExperimentConfig other = config;
  other.model.n_sites = 5;
  CHECK_THROWS_AS(run_demo(config, other, fresh_dir("demo_bad")), ConfigError);
}
