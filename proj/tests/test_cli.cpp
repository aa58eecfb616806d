#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "qiline/cli.hpp"

using namespace qiline;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json json_of(const Result& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_CASE("eval") {
  auto r = run({"eval", "A(2)*B(1,1)", "--at", "4", "--format", "plain"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "12\n");
  auto j = json_of(run({"eval", "A(2)*B(1,1)", "--at", "4,9"}));
  CHECK(j["subcommand"] == "eval");
  CHECK(j["points"][1]["value"] == 24.0);
}

TEST_CASE("exit codes") {
  CHECK(run({"classify", "logshift(1)"}).code == 0);
  CHECK(run({"qi-constants", "B(1,1)"}).code == 0);
  CHECK(run({"equiv", "B(1,1)", "B(1,2)"}).code == 0);
  CHECK(run({"order", "id", "logshift(1)"}).code == 0);
  CHECK(run({"relations", "--all", "--grid", "1,2,40"}).code == 0);
  CHECK(run({"relations", "--relation", "addB", "--params", "i=1,s1=1,s2=-1"}).code == 0);
  CHECK(run({"independence", "B(1,1) * B(1,-1)"}).code == 0);
  CHECK(run({"diffz", "lift[0:0;1/2:3/4;1:1;]"}).code == 0);
  CHECK(run({"obstruction"}).code == 0);
  CHECK(run({"orderability", "A(2)", "A(1/2)"}).code == 0);
  // usage and parse errors
  auto bad = run({"eval", "A(2", "--at", "1"});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find("parse error at 3") != std::string::npos);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"eval", "A(2)"}).code == cli::kExitUsage);
  CHECK(run({"classify", "A(2)", "--grid", "1,2"}).code == cli::kExitUsage);
  CHECK(run({"classify", "A(2)", "--format", "xml"}).code == cli::kExitUsage);
  CHECK(run({"relations", "--relation", "nope"}).code == cli::kExitUsage);
  CHECK(run({"independence", "A(2)"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
  // a check that does not go through
  CHECK(run({"orderability", "id"}).code == cli::kExitCheckFailed);
}

TEST_CASE("classify output") {
  auto r = run({"classify", "logshift(1)"});
  CHECK(r.out.find("\"drift\": \"Sublinear\"") != std::string::npos);
  auto j = json_of(r);
  CHECK(j["grid"]["count"] == 40);
  CHECK(j["seed"] == 0);
  auto csv = run({"classify", "A(2)", "--grid", "1,2,3", "--format", "csv"});
  CHECK(csv.out == "x,displacement\n1,1\n2,2\n4,4\n");
  CHECK(run({"classify", "A(1/2)", "--format", "plain"}).out == "LinearDrift -0.5\n");
}

TEST_CASE("relations json") {
  auto j = json_of(run({"relations", "--all", "--grid", "1,2,40", "--seed", "9"}));
  CHECK(j["seed"] == 9);
  CHECK(j["allPass"] == true);
  CHECK(j["reports"].size() == 117);
  auto& first = j["reports"][0];
  for (const char* key : {"relation", "params", "measuredSup", "paperBound", "pass"}) CHECK(first.contains(key));
}

TEST_CASE("order and orderability") {
  CHECK(run({"order", "B(1,1)", "B(1,2)", "--format", "plain"}).out == "Less\n");
  auto j = json_of(run({"order", "A(2)", "id"}));
  CHECK(j["verdict"] == "Greater");
  for (const char* key : {"verdict", "grid", "supDifference", "fitSlope"}) CHECK(j.contains(key));
  auto o = json_of(run({"orderability", "A(2)", "logshift(-1)", "B(1,1)", "--grid", "1,1e10,48", "--max-len", "3"}));
  CHECK(o["epsilons"] == nlohmann::json::array({1, -1, 1}));
  CHECK(o["semigroup"]["allPositive"] == true);
}

TEST_CASE("holder and diffz") {
  auto h = json_of(run({"holder", "affine(1,1)", "affine(1,1.4142135623730951)", "--n", "10000", "--tau-x0", "0",
                        "--depth", "4"}));
  CHECK(h["tau"]["affine(1,1)"].get<double>() == doctest::Approx(1));
  CHECK(h["residual"].get<double>() <= 1e-3);
  auto csv = run({"holder", "affine(1,1)", "--orbit-steps", "2", "--format", "csv"});
  CHECK(csv.out == "step,x\n0,0\n1,1\n2,2\n");
  auto d = json_of(run({"diffz", "lift[0:0;1/2:3/4;1:1;]"}));
  CHECK(d["escaped"] == true);
  CHECK(json_of(run({"diffz", "lift[0:0;1:1;]"}))["vacuous"] == true);
}

TEST_CASE("determinism and bundles") {
  std::vector<std::string> args = {"relations", "--all", "--seed", "3"};
  CHECK(run(args).out == run(args).out);
  auto dir = std::filesystem::temp_directory_path() / "qiline_cli_bundle";
  std::filesystem::remove_all(dir);
  auto with = args;
  with.insert(with.end(), {"--bundle", dir.string()});
  auto r1 = run(with);
  auto r2 = run(with);
  CHECK(r1.out == r2.out);
  int files = 0;
  for (auto& e : std::filesystem::directory_iterator(dir)) {
    CHECK(e.path().filename().string().rfind("relations-", 0) == 0);
    CHECK(e.path().extension() == ".json");
    ++files;
  }
  CHECK(files == 1);
  run({"classify", "A(2)", "--format", "csv", "--bundle", dir.string()});
  bool profile = false;
  for (auto& e : std::filesystem::directory_iterator(dir))
    profile |= e.path().filename().string().rfind("profile-", 0) == 0 && e.path().extension() == ".csv";
  CHECK(profile);
  std::filesystem::remove_all(dir);
}

TEST_CASE("precision environment override") {
  CHECK(run({"eval", "B(1,1)", "--at", "4", "--bits", "200"}).code == cli::kExitUsage);
  setenv("QILINE_PRECISION_BITS", "113", 1);
  CHECK(run({"eval", "B(1,1)", "--at", "4", "--bits", "200"}).code == cli::kExitOk);
  setenv("QILINE_PRECISION_BITS", "500", 1);
  CHECK(run({"eval", "B(1,1)", "--at", "4"}).code == cli::kExitUsage);
  unsetenv("QILINE_PRECISION_BITS");
}
