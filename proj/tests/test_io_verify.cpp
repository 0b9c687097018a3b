#include "rwrt/io.hpp"
#include "rwrt/verify.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace rwrt;

namespace {

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / "rwrt_unit" / name;
}

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("content hash") {
  // FNV-1a 64 of the empty object "{}"
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : std::string("{}")) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  CHECK(content_hash(Json::object()) == h);
  CHECK(content_hash(Json{{"a", 1}}) != content_hash(Json{{"a", 2}}));
  CHECK(hex64(0x1f) == "000000000000001f");
  CHECK(hex64(h).size() == 16);
}

TEST_CASE("json conversion") {
  const Vector v{{1.0, 2.5}};
  CHECK(to_json(v).dump() == "[1.0,2.5]");
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  CHECK(to_json(m).dump() == "[[1.0,2.0],[3.0,4.0]]");
  const RantReport r{3, true, 1e-12, 0.0};
  const Json j = to_json(r);
  CHECK(j["p"] == 3);
  CHECK(j["passed"] == true);
  const KsResult ks{0.1, 0.5, 10, 20};
  CHECK(to_json(ks)["p_value"] == 0.5);
}

TEST_CASE("CSV writers") {
  const RealPath p(0.5, Vector{{0.0, 1.0, -1.0}});
  write_path_csv(scratch("path.csv"), p);
  CHECK(first_line(scratch("path.csv")) == "t,value");
  CHECK(slurp(scratch("path.csv")).find("1,-1") != std::string::npos);

  LatticePath w;
  w.positions = LatticeVector{{0, 1, 0}};
  write_lattice_csv(scratch("walk.csv"), w);
  CHECK(first_line(scratch("walk.csv")) == "index,position");

  write_reward_csv(scratch("reward.csv"), Vector{{0.0, 2.0}});
  CHECK(first_line(scratch("reward.csv")) == "index,value");

  Matrix ens(2, 3);
  ens << 0, 1, 2, 0, -1, -2;
  write_ensemble_csv(scratch("nested/ens.csv"), Vector{{0.0, 0.5, 1.0}}, ens);
  CHECK(first_line(scratch("nested/ens.csv")) == "0,0.5,1");

  const MeasureGrid1D g(1.5, 0.5, 1.0, RandomStream(1));
  write_draws_csv(scratch("draws.csv"), g);
  CHECK(first_line(scratch("draws.csv")) == "cell,draw");

  write_json(scratch("x.json"), Json{{"k", 1}});
  CHECK(Json::parse(slurp(scratch("x.json")))["k"] == 1);
}

TEST_CASE("verify config validation") {
  VerifyConfig c;
  CHECK_NOTHROW(c.validate());
  c.replicates = 50;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c.replicates = 100;
  c.criteria = {0};
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c.criteria = {};
  CHECK_THROWS_AS(c.validate(), ParameterError);
  CHECK(criterion_table().size() == 11);
}

TEST_CASE("criteria are deterministic under a small override") {
  VerifyConfig c;
  c.replicates = 100;
  for (const int id : {1, 2, 3}) {
    const CriterionResult a = run_criterion(id, c);
    const CriterionResult b = run_criterion(id, c);
    CAPTURE(id);
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(a.outcome != Outcome::numeric_error);
  }
  c.seed = 1;
  CHECK(to_json(run_criterion(3, c)).dump() != to_json(run_criterion(3, VerifyConfig{20240611, 100})).dump());
}

TEST_CASE("suite verdict document") {
  VerifyConfig c;
  c.replicates = 100;
  c.criteria = {2, 1, 11};
  const auto results = run_suite(c);
  REQUIRE(results.size() == 3);
  CHECK(results[0].id == 1);
  CHECK(results[2].id == 11);
  CHECK(results[2].passed());
  const Json j = suite_json(c, results);
  CHECK(j["schema_version"] == 1);
  CHECK(j["seed"] == c.seed);
  CHECK(j["config_hash"] == hex64(content_hash(to_json(c))));
  CHECK(j["criteria"].size() == 3);
  CHECK(j.dump().find("seconds") == std::string::npos);
  CHECK(exit_code(results) == (j["passed"] ? 0 : 1));

  std::vector<CriterionResult> mixed(3);
  mixed[0].outcome = Outcome::pass;
  mixed[1].outcome = Outcome::fail;
  mixed[2].outcome = Outcome::parameter_error;
  CHECK(exit_code(mixed) == 2);
  mixed[0].outcome = Outcome::numeric_error;
  CHECK(exit_code(mixed) == 3);
}
