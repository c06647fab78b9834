#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "entgap/cli.hpp"
#include "entgap/inequality.hpp"
#include "entgap/state_io.hpp"
#include "test_support.hpp"

using namespace entgap;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json run_json(std::vector<std::string> args) {
  const auto r = run(args);
  REQUIRE(r.code == 0);
  return nlohmann::json::parse(r.out);
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
  return out;
}

// header -> value for a single-row CSV report
std::map<std::string, std::string> csv_record(const std::string& csv) {
  const auto lines = data_lines(csv);
  REQUIRE(lines.size() == 2);
  const auto keys = split(lines[0]), values = split(lines[1]);
  REQUIRE(keys.size() == values.size());
  std::map<std::string, std::string> m;
  for (std::size_t k = 0; k < keys.size(); ++k) m[keys[k]] = values[k];
  return m;
}

void check_same_numbers(const std::vector<std::string>& args) {
  auto json_args = args, csv_args = args;
  json_args.insert(json_args.end(), {"--format", "json"});
  csv_args.insert(csv_args.end(), {"--format", "csv"});
  const auto j = run_json(json_args);
  const auto c = run(csv_args);
  REQUIRE(c.code == 0);
  for (const auto& [key, text] : csv_record(c.out)) {
    if (j[key].is_boolean()) {
      CHECK(text == (j[key].get<bool>() ? "1" : "0"));
    } else if (j.contains(key)) {
      CHECK(std::strtod(text.c_str(), nullptr) == j[key].get<double>());
      if (j[key].is_number_float()) CHECK(text == cli::format_number(j[key].get<double>()));
    }
  }
}

std::filesystem::path write_text(const std::string& text) {
  const auto p = test::temp_path("input.json");
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("format_number uses 17 significant digits") {
  CHECK(cli::format_number(0.1) == "0.10000000000000001");
  CHECK(std::strtod(cli::format_number(std::log(2.0)).c_str(), nullptr) == std::log(2.0));
}

TEST_CASE("counterexample command") {
  const auto j = run_json({"counterexample", "--dim", "2"});
  CHECK(std::abs(j["rhs_entangled"].get<double>() - 1.386294) < 1e-6);
  CHECK(std::abs(j["gap_entangled"].get<double>() + 1.386294) < 1e-6);
  CHECK(std::abs(j["lhs"].get<double>()) < 1e-10);
  CHECK(std::abs(j["rhs_product"].get<double>()) < 1e-10);
  CHECK(j["residual_entangled"].get<double>() < 1e-10);

  const auto b2 = run_json({"counterexample", "--dim", "2", "--log-base", "2"});
  CHECK(std::abs(b2["rhs_entangled"].get<double>() - 2.0) < 1e-9);
  CHECK(std::abs(b2["theoretical_rhs"].get<double>() - 2.0) < 1e-12);

  const auto j3 = run_json({"counterexample", "--dim", "3"});
  CHECK(std::abs(j3["rhs_entangled"].get<double>() - 2.197225) < 1e-6);

  CHECK(run({"counterexample", "--dim", "1"}).code == 2);
  CHECK(run({"counterexample", "--dim", "40"}).code == 2);
  CHECK(run({"counterexample", "--dim", "two"}).code == 2);
  CHECK(run({"counterexample", "--log-base", "10"}).code == 2);
  check_same_numbers({"counterexample", "--dim", "3"});
}

TEST_CASE("deform command") {
  const auto j = run_json({"deform", "--dim", "2", "--eps", "0.1"});
  CHECK(j["unique"].get<bool>());
  CHECK(j["gap"].get<double>() < 0.0);
  CHECK(j["coefficients"].size() == 4);
  CHECK(j["coefficients"][0].get<double>() == doctest::Approx(0.26875).epsilon(1e-14));

  double previous = 0.0;
  for (const char* eps : {"0.2", "0.1", "0.05"}) {
    const auto g = std::abs(run_json({"deform", "--dim", "2", "--eps", eps})["gap"].get<double>());
    CHECK(g > previous);
    CHECK(g < 2.0 * std::log(2.0));
    previous = g;
  }

  CHECK(run({"deform", "--dim", "2", "--eps", "0"}).code == 2);
  CHECK(run({"deform", "--dim", "2", "--eps", "1.5"}).code == 2);
  CHECK(run({"deform", "--dim", "2"}).code == 2);
  check_same_numbers({"deform", "--dim", "2", "--eps", "0.1"});
}

TEST_CASE("scan command") {
  const auto a = run({"scan", "--samples", "10", "--seed", "5", "--format", "csv"});
  const auto b = run({"scan", "--samples", "10", "--seed", "5", "--format", "csv"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto lines = data_lines(a.out);
  REQUIRE(lines.size() == 11);
  CHECK(lines[0] == "sample_index,derived_seed,lhs,rhs,gap");
  CHECK(a.out.find("# violation_count=") != std::string::npos);
  CHECK(a.out.find('\r') == std::string::npos);

  // JSON carries the same numbers
  const auto j = run_json({"scan", "--samples", "10", "--seed", "5"});
  for (std::size_t i = 0; i < 10; ++i) {
    const auto cells = split(lines[i + 1]);
    const auto& row = j["per_sample"][i];
    CHECK(std::stoull(cells[1]) == row["derived_seed"].get<std::uint64_t>());
    CHECK(std::strtod(cells[4].c_str(), nullptr) == row["gap"].get<double>());
  }

  // one sample equals a direct evaluation
  const auto one = run_json({"scan", "--samples", "1", "--seed", "5"});
  const FourFactorState s(haar_state(FactorShape{2, 2, 2, 2}, derive_seed(5, 0)));
  const auto g = bn_gap(s, schmidt_decompose(s.state(), additivity_split()));
  CHECK(one["per_sample"][0]["gap"].get<double>() == g.gap);

  const auto shaped = run_json({"scan", "--shape", "3,2,3,2", "--samples", "3"});
  CHECK(shaped["dims"] == nlohmann::json::array({3, 2, 3, 2}));

  CHECK(run({"scan", "--samples", "0"}).code == 2);
  CHECK(run({"scan", "--shape", "2,2,2"}).code == 2);
  const auto failed = run({"scan", "--samples", "3", "--tol", "1e-300"});
  CHECK(failed.code == 3);
  CHECK(nlohmann::json::parse(failed.out)["failed_count"] == 3);
}

TEST_CASE("check command") {
  const auto canonical = test::temp_path("canonical.json");
  save_state(canonical_counterexample(2).state(), canonical);
  const auto j = run_json({"check", "--input", canonical.string()});
  CHECK(std::abs(j["lhs"].get<double>()) < 1e-10);
  check_same_numbers({"check", "--input", canonical.string()});

  PureState product = haar_state(FactorShape{2}, 1);
  for (std::uint64_t k = 2; k <= 4; ++k) product = kron_state(product, haar_state(FactorShape{2}, k));
  const auto product_path = test::temp_path("product.json");
  save_state(product, product_path);
  const auto p = run_json({"check", "--input", product_path.string()});
  CHECK(std::abs(p["lhs"].get<double>()) < 1e-10);
  CHECK(std::abs(p["rhs"].get<double>()) < 1e-10);
  CHECK(std::abs(p["gap"].get<double>()) < 1e-10);

  const auto half = write_text(R"({"dims": [2, 1, 1, 1], "amplitudes": [[0.5, 0], [0, 0]]})");
  const auto bad_norm = run({"check", "--input", half.string()});
  CHECK(bad_norm.code == 2);
  CHECK(bad_norm.err.find("norm") != std::string::npos);

  const auto three = write_text(R"({"dims": [2, 1, 1], "amplitudes": [[1, 0], [0, 0]]})");
  CHECK(run({"check", "--input", three.string()}).code == 2);
  CHECK(run({"check", "--input", write_text("[1, 2").string()}).code == 2);
  CHECK(run({"check", "--input", "/nonexistent/file.json"}).code == 2);
  CHECK(run({"check"}).code == 2);

  for (const auto& f : {canonical, product_path, half, three}) std::filesystem::remove(f);
}

TEST_CASE("maximize command") {
  const auto j = run_json({"maximize", "--dim", "2"});
  CHECK(j["best_rhs"].get<double>() >= 2.0 * std::log(2.0) - 0.01);
  CHECK(j["initial_rhs"].get<double>() < 1e-10);
  CHECK(j["blocks"].size() == 1);
  CHECK(j["restarts"] == 20);
  CHECK(j["sweeps"] == 50);

  const auto other = run_json({"maximize", "--dim", "2", "--seed", "77"});
  CHECK(std::abs(other["best_rhs"].get<double>() - 2.0 * std::log(2.0)) <= 0.01);

  const auto random = test::temp_path("random.json");
  save_state(haar_state(FactorShape{2, 2, 2, 2}, 3), random);
  const auto r = run_json({"maximize", "--input", random.string()});
  CHECK(std::abs(r["best_rhs"].get<double>() - r["initial_rhs"].get<double>()) <= 1e-10);
  check_same_numbers({"maximize", "--input", random.string()});

  const auto out_path = test::temp_path("report.json");
  CHECK(run({"maximize", "--dim", "2", "--restarts", "2", "--sweeps", "3", "--output", out_path.string()}).code == 0);
  std::ifstream in(out_path);
  CHECK(nlohmann::json::parse(in)["sweeps"] == 3);

  CHECK(run({"maximize", "--input", "/nonexistent.json"}).code == 2);
  CHECK(run({"maximize", "--dim", "2", "--restarts", "-1"}).code == 2);
  std::filesystem::remove(random);
  std::filesystem::remove(out_path);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"counterexample", "--bogus"}).code == 2);
  CHECK(run({"counterexample", "--format", "xml"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}
