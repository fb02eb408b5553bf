// End-to-end tests of the lorroll CLI: spawns the built binary (path from
// LORROLL_CLI), checks report contents, exit codes, determinism, and that
// the emitted JSON validates against the schema files shipped in schemas/.

#include <catch2/catch_amalgamated.hpp>

#include <lorroll/minkowski.hpp>
#include <lorroll/serialize.hpp>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const char* cli = std::getenv("LORROLL_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd = std::string(cli) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.output.append(buf.data(), got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string schema_dir() {
  const char* dir = std::getenv("LORROLL_SCHEMAS");
  REQUIRE(dir != nullptr);
  return dir;
}

// Minimal structural validator: type tags, required keys, per-property and
// per-item recursion. Covers the subset the shipped schemas use.
bool validates(const json& value, const json& schema, std::string* why) {
  if (schema.contains("type")) {
    const std::string t = schema.at("type");
    const bool ok = (t == "object" && value.is_object()) || (t == "array" && value.is_array()) ||
                    (t == "string" && value.is_string()) ||
                    (t == "number" && value.is_number()) ||
                    (t == "integer" && value.is_number_integer()) ||
                    (t == "boolean" && value.is_boolean());
    if (!ok) {
      *why = "expected type " + t;
      return false;
    }
  }
  if (schema.contains("required"))
    for (const auto& key : schema.at("required"))
      if (!value.contains(key.get<std::string>())) {
        *why = "missing required key " + key.get<std::string>();
        return false;
      }
  if (schema.contains("properties") && value.is_object())
    for (const auto& [key, sub] : schema.at("properties").items())
      if (value.contains(key) && !validates(value.at(key), sub, why)) {
        *why = "/" + key + ": " + *why;
        return false;
      }
  if (schema.contains("items") && value.is_array())
    for (const auto& item : value)
      if (!validates(item, schema.at("items"), why)) {
        *why = "/items: " + *why;
        return false;
      }
  return true;
}

void check_schema(const json& value, const std::string& schema_file) {
  std::ifstream in(schema_dir() + "/" + schema_file);
  REQUIRE(in.good());
  json schema;
  in >> schema;
  std::string why;
  INFO(schema_file << ": " << why);
  CHECK(validates(value, schema, &why));
}

}  // namespace

TEST_CASE("holonomy reports") {
  const auto flat = run("holonomy --manifold flat:3,1");
  REQUIRE(flat.exit_code == 0);
  const json jf = json::parse(flat.output);
  CHECK(jf.at("rank") == 0);
  CHECK(jf.at("dimFull") == 6);
  CHECK(jf.at("verdict") == "trivial");
  check_schema(jf, "holonomy.schema.json");

  const auto sphere = run("holonomy --manifold s:2,1,1 --method curvature");
  REQUIRE(sphere.exit_code == 0);
  const json js = json::parse(sphere.output);
  CHECK(js.at("rank") == 3);
  CHECK(js.at("verdict") == "full");
  check_schema(js, "holonomy.schema.json");
}

TEST_CASE("controllability verdict and exit codes") {
  const auto res = run("controllability --manifold s:2,1,1");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.output);
  CHECK(j.at("verdict") == "ControllableWitnessed");
  REQUIRE(j.at("witnesses").size() == 1);
  CHECK_THAT(j.at("witnesses").at(0).at("normJ").get<double>(),
             Catch::Matchers::WithinAbs(6.283185307179586, 1e-3));
  check_schema(j, "controllability.schema.json");

  const auto flat = run("controllability --manifold flat:2,1");
  REQUIRE(flat.exit_code == 0);
  CHECK(json::parse(flat.output).at("verdict") == "NotControllable");
}

TEST_CASE("geodesic trajectories and the completeness probe") {
  const auto line = run("geodesic --manifold flat:2,1 --x 0,0,0 --v 1,0,0 --T 1");
  REQUIRE(line.exit_code == 0);
  // Last CSV row reaches (1, 0, 0).
  const auto last = line.output.rfind('\n', line.output.size() - 2);
  std::istringstream row(line.output.substr(last + 1));
  std::string cell;
  std::getline(row, cell, ',');
  CHECK_THAT(std::stod(cell), Catch::Matchers::WithinAbs(1.0, 1e-12));
  std::getline(row, cell, ',');
  CHECK_THAT(std::stod(cell), Catch::Matchers::WithinAbs(1.0, 1e-9));

  const auto closed = run("geodesic --manifold s:2,1,1 --x 1,0,0,0 --v 0,1,0,0 --T 6.2831853");
  REQUIRE(closed.exit_code == 0);
  const auto last2 = closed.output.rfind('\n', closed.output.size() - 2);
  std::istringstream row2(closed.output.substr(last2 + 1));
  std::getline(row2, cell, ',');  // t
  std::getline(row2, cell, ',');  // x1
  CHECK_THAT(std::stod(cell), Catch::Matchers::WithinAbs(1.0, 1e-6));

  const auto probe = run("geodesic --manifold clifton-pohl --x 1,0 --v 1,0 --probe --tmax 10");
  REQUIRE(probe.exit_code == 0);
  const json jp = json::parse(probe.output);
  CHECK(jp.at("reached") == false);
  CHECK_THAT(jp.at("tStar").get<double>(), Catch::Matchers::WithinAbs(1.0, 0.02));
  check_schema(jp, "probe.schema.json");
}

TEST_CASE("develop and roll emit CSV") {
  const auto dev = run("develop --manifold s:2,1,1 --curve geodesic:1,0,0,0;0,1,0,0;1.0");
  REQUIRE(dev.exit_code == 0);
  CHECK(dev.output.rfind("t,c1,c2,c3", 0) == 0);

  const auto roll = run("roll --manifold s:2,1,1 --curve geodesic:1,0,0,0;0,1,0,0;1.0 --seed 5");
  REQUIRE(roll.exit_code == 0);
  CHECK(roll.output.find("xhat1") != std::string::npos);
  CHECK(roll.output.find("A11") != std::string::npos);
}

TEST_CASE("classify-group: dichotomy and exit codes") {
  using namespace lorroll;
  const Signature sig{2, 1};
  // Full rotations plus one translation: FullSE, exit 0.
  {
    json gens = json::array();
    json t;
    t["y"] = {1.0, 0.0, 0.0};
    t["C"] = matrix_to_json(MatrixXd::Identity(3, 3));
    gens.push_back(t);
    for (const auto& b : so_basis(sig)) {
      json g;
      g["y"] = {0.0, 0.0, 0.0};
      g["C"] = matrix_to_json(so_exp(LieAlgebraElement::from(0.3 * b.matrix(), sig)).matrix());
      gens.push_back(g);
    }
    write_file("/tmp/lorroll_gens_full.json", gens.dump());
    const auto res = run("classify-group --generators /tmp/lorroll_gens_full.json --budget 500 --seed 7");
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.output);
    CHECK(j.at("verdict") == "FullSE");
    REQUIRE(j.at("closureDemos").size() == 3);
    for (const auto& demo : j.at("closureDemos"))
      CHECK(demo.at("residual").get<double>() <= 1e-8);
    check_schema(j, "classify.schema.json");
  }
  // Fixed-point embedded rotations: NoTranslationDetected, exit 2.
  {
    const VectorXd x0 = Eigen::Vector3d(0.4, -0.3, 0.2);
    json gens = json::array();
    for (const auto& b : so_basis(sig)) {
      const auto e = fixed_point_embedding(x0, so_exp(LieAlgebraElement::from(0.3 * b.matrix(), sig)));
      json g;
      g["y"] = vector_to_json(e.y);
      g["C"] = matrix_to_json(e.c.matrix());
      gens.push_back(g);
    }
    write_file("/tmp/lorroll_gens_fixed.json", gens.dump());
    const auto res = run("classify-group --generators /tmp/lorroll_gens_fixed.json --budget 2000 --seed 9");
    CHECK(res.exit_code == 2);
    CHECK(json::parse(res.output.substr(0, res.output.rfind('}') + 1)).at("verdict") ==
          "NoTranslationDetected");
  }
  // Trivial generators: inapplicable, exit 1.
  {
    json gens = json::array();
    json g;
    g["y"] = {0.0, 0.0, 0.0};
    g["C"] = matrix_to_json(MatrixXd::Identity(3, 3));
    gens.push_back(g);
    write_file("/tmp/lorroll_gens_trivial.json", gens.dump());
    const auto res = run("classify-group --generators /tmp/lorroll_gens_trivial.json --budget 10");
    CHECK(res.exit_code == 1);
  }
}

TEST_CASE("malformed configuration exits 1 with a JSON-pointer message") {
  const auto res = run("holonomy --manifold '{\"kind\":\"flat\",\"n\":2,\"nu\":1,\"bogus\":1}'");
  CHECK(res.exit_code == 1);
  CHECK(res.output.find("/bogus") != std::string::npos);

  const auto missing = run("holonomy --manifold '{\"n\":2,\"nu\":1}'");
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("/kind") != std::string::npos);

  const auto unknown_flag = run("holonomy --manifold flat:2,1 --frobnicate 3");
  CHECK(unknown_flag.exit_code != 0);
}

TEST_CASE("fixed seed gives byte-identical JSON") {
  const std::string cmd = "controllability --manifold s:2,1,1 --seed 42 --budget 16";
  const auto a = run(cmd);
  const auto b = run(cmd);
  REQUIRE(a.exit_code == 0);
  CHECK(a.output == b.output);

  const auto c = run("holonomy --manifold h:2,1,1 --method loops --seed 11 --budget 8");
  const auto d = run("holonomy --manifold h:2,1,1 --method loops --seed 11 --budget 8");
  REQUIRE(c.exit_code == 0);
  CHECK(c.output == d.output);
}

TEST_CASE("LORROLL_SEED provides the default seed") {
  const char* cli = std::getenv("LORROLL_CLI");
  REQUIRE(cli != nullptr);
  const std::string base = std::string(cli) + " holonomy --manifold s:2,1,1 --method loops --budget 6";
  const auto with_env = [&](const std::string& env) {
    const std::string cmd = env + base + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    pclose(pipe);
    return out;
  };
  const std::string via_env = with_env("LORROLL_SEED=77 ");
  const auto flagged = run("holonomy --manifold s:2,1,1 --method loops --budget 6 --seed 77");
  CHECK(via_env == flagged.output);
  CHECK(json::parse(via_env).at("seed") == 77);
}
