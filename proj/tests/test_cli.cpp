#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spenv/cli.hpp"

using namespace spenv;
using nlohmann::json;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Structural validator for the subset of JSON Schema the shipped schema uses:
// type, const, enum, required, properties, items, minItems, maxItems, oneOf.
bool type_matches(const std::string& name, const json& v) {
  if (name == "object") return v.is_object();
  if (name == "array") return v.is_array();
  if (name == "string") return v.is_string();
  if (name == "integer") return v.is_number_integer();
  if (name == "number") return v.is_number();
  if (name == "boolean") return v.is_boolean();
  if (name == "null") return v.is_null();
  return false;
}

bool validate_schema(const json& schema, const json& value, std::string& why);

bool validate_one_of(const json& subs, const json& value, std::string& why) {
  int hits = 0;
  for (const auto& sub : subs) {
    std::string ignore;
    if (validate_schema(sub, value, ignore)) ++hits;
  }
  if (hits == 1) return true;
  why = "oneOf matched " + std::to_string(hits) + " branches";
  return false;
}

bool validate_schema(const json& schema, const json& value, std::string& why) {
  if (schema.contains("const") && value != schema["const"]) {
    why = "const mismatch";
    return false;
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || value == e;
    if (!found) {
      why = "enum mismatch at " + value.dump();
      return false;
    }
  }
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(t.get<std::string>(), value);
    } else {
      for (const auto& name : t) ok = ok || type_matches(name.get<std::string>(), value);
    }
    if (!ok) {
      why = "type mismatch at " + value.dump();
      return false;
    }
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          why = "missing required key " + key.get<std::string>();
          return false;
        }
      }
    }
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items()) {
        if (value.contains(key) && !validate_schema(sub, value[key], why)) {
          why = key + ": " + why;
          return false;
        }
      }
    }
  }
  if (value.is_array()) {
    if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>()) {
      why = "too few items";
      return false;
    }
    if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<std::size_t>()) {
      why = "too many items";
      return false;
    }
    if (schema.contains("items")) {
      for (const auto& item : value) {
        if (!validate_schema(schema["items"], item, why)) return false;
      }
    }
  }
  if (schema.contains("oneOf") && !validate_one_of(schema["oneOf"], value, why)) return false;
  return true;
}

json load_schema() {
  std::ifstream in(std::string(SPENV_SOURCE_DIR) + "/schemas/results.schema.json");
  REQUIRE(in.good());
  return json::parse(in);
}

}  // namespace

TEST_CASE("grid specs parse to geometric grids", "[cli]") {
  CHECK(cli::parse_grid("2") == std::vector<double>{2.0});
  const auto g = cli::parse_grid("0.5:8:5");
  REQUIRE(g.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(g[i] - 0.5 * std::pow(2.0, i)) < 1e-12);
  CHECK(g.back() == 8.0);
  CHECK_THROWS_AS(cli::parse_grid("1:2"), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("4:1:10"), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("0:1:5"), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("1:2:2.5"), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("-1"), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("abc"), ConfigError);
}

TEST_CASE("tolerance resolution order: default, env var, flag", "[cli]") {
  cli::RunConfig cfg;
  unsetenv("SPECTRAL_ENVELOPE_TOL");
  CHECK(cli::resolve_tolerance(cfg).abs_x == 1e-10);
  setenv("SPECTRAL_ENVELOPE_TOL", "0.001", 1);
  CHECK(cli::resolve_tolerance(cfg).abs_x == 0.001);
  cfg.tol = 1e-6;  // numeric flag wins over the environment
  CHECK(cli::resolve_tolerance(cfg).abs_x == 1e-6);
  cfg.tol = 0.0;
  setenv("SPECTRAL_ENVELOPE_TOL", "bogus", 1);
  CHECK(cli::resolve_tolerance(cfg).abs_x == 1e-10);
  unsetenv("SPECTRAL_ENVELOPE_TOL");
}

TEST_CASE("csv escaping quotes separators and doubles quotes", "[cli]") {
  CHECK(cli::csv_escape("plain") == "plain");
  CHECK(cli::csv_escape("a,b") == "\"a,b\"");
  CHECK(cli::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("bound command agrees across methods on the quartic", "[cli]") {
  const CliRun r = run({"bound", "--potential", "1:4", "--base", "1:2", "--mode", "line",
                        "--n", "0", "--v", "1", "--method", "all"});
  CHECK(r.code == 0);
  CHECK(r.out.find("tangent") != std::string::npos);
  CHECK(r.out.find("kinetic") != std::string::npos);
  CHECK(r.out.find("local") != std::string::npos);
  CHECK(r.out.find("0.75") != std::string::npos);
}

TEST_CASE("bound csv output carries the shared header", "[cli]") {
  const CliRun r = run({"bound", "--potential", "1:4", "--base", "1:2", "--mode", "line",
                        "--output", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out == "v,lower,upper,oracle,coincidence_delta,error\n1,0.75,,,,\n");
}

TEST_CASE("sweep csv round-trips through reparse and reprint", "[cli]") {
  const CliRun r = run({"sweep", "--mode", "radial", "--potential", "-1:-1,1:2", "--base",
                        "-1:-1", "--base", "1:2", "--d", "3", "--l", "2", "--v", "0.5:4:4",
                        "--no-oracle", "--output", "csv"});
  REQUIRE(r.code == 0);

  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  CHECK(header == cli::kCsvHeader);

  std::ostringstream rebuilt;
  rebuilt << header << "\n";
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    cells.resize(6);
    rebuilt << cli::fmt_g(std::strtod(cells[0].c_str(), nullptr), 12);
    for (int i = 1; i < 5; ++i) {
      rebuilt << ',';
      if (!cells[i].empty()) rebuilt << cli::fmt_g(std::strtod(cells[i].c_str(), nullptr), 12);
    }
    rebuilt << ',' << cells[5] << "\n";
  }
  CHECK(rebuilt.str() == r.out);
}

TEST_CASE("sweep rows keep lower below upper with tiny coincidence deltas", "[cli]") {
  const CliRun r = run({"sweep", "--mode", "radial", "--potential", "-1:-1,1:2", "--base",
                        "-1:-1", "--base", "1:2", "--d", "3", "--l", "2", "--v", "0.5:2:3",
                        "--no-oracle", "--output", "json"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  REQUIRE(doc["results"].size() == 3);
  for (const auto& row : doc["results"]) {
    CHECK(row["lower"].get<double>() < row["upper"].get<double>());
    CHECK(row["coincidence_delta"].get<double>() < 1e-8);
    CHECK(row["oracle"].is_null());
    CHECK(row["error"].get<std::string>().empty());
  }
}

TEST_CASE("json output of every command validates against the shipped schema", "[cli]") {
  const json schema = load_schema();
  const std::vector<std::vector<std::string>> cases = {
      {"bound", "--potential", "1:4", "--base", "1:2", "--mode", "line", "--method", "all",
       "--output", "json"},
      {"sweep", "--mode", "radial", "--potential", "-1:-1,1:2", "--base", "-1:-1", "--base",
       "1:2", "--d", "3", "--l", "2", "--v", "0.5:2:3", "--no-oracle", "--output", "json"},
      {"oracle", "--potential", "1:2", "--mode", "line", "--v", "1", "--output", "json"},
      {"verify", "--suite", "scaling", "--output", "json"},
  };
  for (const auto& args : cases) {
    const CliRun r = run(args);
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    std::string why;
    const bool ok = validate_schema(schema, doc, why);
    INFO(args[0] << ": " << why);
    CHECK(ok);
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["command"] == args[0]);
  }
}

TEST_CASE("oracle command reports convergence diagnostics", "[cli]") {
  const CliRun r = run({"oracle", "--potential", "1:2", "--mode", "line", "--v", "1",
                        "--output", "json"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  const json& row = doc["results"][0];
  CHECK(std::abs(row["energy"].get<double>() - 1.0) < 1e-6);
  CHECK(row["nodes_found"] == 0);
  CHECK(row["bracket_width"].get<double>() < 1e-9);
  CHECK(row["residual"].get<double>() < 1e-10);
}

TEST_CASE("config problems exit with code 2", "[cli]") {
  CHECK(run({"bound", "--base", "1:2"}).code == 2);  // missing --potential
  CHECK(run({"verify", "--suite", "nonexistent"}).code == 2);
  CHECK(run({"bound", "--potential", "1:4", "--base", "1:2", "--mode", "line", "--bogus"}).code ==
        2);
  CHECK(run({}).code == 2);  // a subcommand is required
  CHECK(run({"bound", "--potential", "1:3", "--base", "1:1", "--v", "1"}).code == 2);  // no E1
  CHECK(run({"bound", "--potential", "1:4", "--base", "1:2", "--mode", "line", "--method",
             "local", "--base", "1:4"})
            .code == 2);  // no stocked trial family for a quartic base
  CHECK(run({"sweep", "--potential", "-1:-1,1:2", "--base", "-1:-1", "--v", "1:0.5:4"}).code ==
        2);  // decreasing grid
  const CliRun out_fail = run({"bound", "--potential", "1:4", "--base", "1:2", "--mode", "line",
                               "--out", "/nonexistent_dir_xyz/a.csv"});
  CHECK(out_fail.code == 2);
}

TEST_CASE("numeric failures exit with code 1", "[cli]") {
  // convexity flips: no envelope bound exists
  CHECK(run({"bound", "--potential", "1:6,-1:4", "--base", "1:2", "--mode", "line"}).code == 1);
  // repulsive base potential
  CHECK(run({"bound", "--potential", "-1:-1,1:2", "--base", "-1:2", "--d", "3"}).code == 1);
}

TEST_CASE("help requests exit cleanly", "[cli]") {
  CHECK(run({"--help"}).code == 0);
  const CliRun r = run({"bound", "--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--potential") != std::string::npos);
}

TEST_CASE("--out writes the report to a file", "[cli]") {
  const std::string path = "/tmp/spenv_cli_out_test.csv";
  std::remove(path.c_str());
  const CliRun r = run({"bound", "--potential", "1:4", "--base", "1:2", "--mode", "line",
                        "--output", "csv", "--out", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == cli::kCsvHeader);
  std::remove(path.c_str());
}

TEST_CASE("verify subcommand runs a fast suite end to end", "[cli]") {
  const CliRun r = run({"verify", "--suite", "scaling"});
  CHECK(r.code == 0);
  CHECK(r.out.find("all passed") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("12 significant digits in machine formats, 6 in tables", "[cli]") {
  CHECK(cli::fmt_g(1.0603620904841829, 12) == "1.06036209048");
  CHECK(cli::fmt_g(1.0603620904841829, 6) == "1.06036");
  CHECK(cli::round_sig12(1.0603620904841829) == std::strtod("1.06036209048", nullptr));
}
