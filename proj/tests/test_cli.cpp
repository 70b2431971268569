#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "ssblab/core.hpp"

using namespace ssblab;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::current_path() / "cli-test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

cli::Json read_json(const fs::path& p) { return cli::Json::parse(slurp(p)); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("ssb-classify") {
  const auto dir = scratch("fm");
  const auto r = run({"ssb-classify", "--model", "fm-chain", "--sites", "4", "--out-dir", dir.string()});
  CHECK(r.code == cli::kSuccess);
  const auto j = read_json(dir / "classification.json");
  CHECK(j["verdict"] == "TYPE1");
  CHECK(j["ground_degeneracy"] == 5);
  const auto afm = scratch("afm");
  CHECK(run({"ssb-classify", "--model", "afm-chain", "--out-dir", afm.string()}).code == 0);
  CHECK(read_json(afm / "classification.json")["verdict"] == "TYPE2");

  SUBCASE("lattice file") {
    const auto lat = dir / "triangle.json";
    write(lat, R"({"sites": 3, "S": 0.5, "couplings": [[0, 1, -1.0], [1, 2, -1.0], [2, 0, -1.0]]})");
    const auto out = scratch("lattice");
    CHECK(run({"ssb-classify", "--model", "lattice", "--lattice", lat.string(), "--observable",
               "total-sz", "--out-dir", out.string()})
              .code == 0);
    CHECK(read_json(out / "classification.json")["ground_degeneracy"] == 4);
  }
}

TEST_CASE("odlro pure condensate") {
  const auto dir = scratch("odlro");
  CHECK(run({"odlro", "--state", "pure-condensate", "--n", "4", "--modes", "2", "--out-dir",
             dir.string()})
            .code == 0);
  const auto j = read_json(dir / "odlro.json");
  CHECK(j["alpha"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j["odlro"] == true);
  CHECK(j["lambda"][0].get<double>() == doctest::Approx(4.0));
  CHECK(fs::exists(dir / "fields.csv"));
  const auto m = read_json(dir / "manifest.json");
  CHECK(m["subcommand"] == "odlro");
  CHECK(m["parameters"]["n"] == 4);
  CHECK(m.contains("started_at"));
}

TEST_CASE("argument and config errors") {
  const auto dir = scratch("errors");
  SUBCASE("missing required flag") {
    const auto r = run({"interfere", "--out-dir", dir.string()});
    CHECK(r.code == cli::kValidationError);
    CHECK(r.err.find("--seed") != std::string::npos);
  }
  SUBCASE("unknown subcommand") {
    const auto r = run({"frobnicate"});
    CHECK(r.code == cli::kValidationError);
    CHECK(r.err.find("unknown subcommand 'frobnicate'") != std::string::npos);
  }
  SUBCASE("bad value") {
    CHECK(run({"odlro", "--n", "four", "--out-dir", dir.string()}).code == cli::kValidationError);
    CHECK(run({"odlro", "--state", "nonsense", "--out-dir", dir.string()}).code ==
          cli::kValidationError);
  }
  SUBCASE("empty config is {}") {
    write(dir / "empty.json", "");
    CHECK(cli::load_config(dir / "empty.json").empty());
    CHECK(run({"odlro", "--config", (dir / "empty.json").string(), "--out-dir", dir.string()}).code ==
          0);
  }
  SUBCASE("flags override config values") {
    write(dir / "c.json", R"({"n": 3, "modes": 3})");
    CHECK(run({"odlro", "--config", (dir / "c.json").string(), "--n", "5", "--out-dir",
               dir.string()})
              .code == 0);
    const auto m = read_json(dir / "manifest.json");
    CHECK(m["parameters"]["n"] == 5);
    CHECK(m["parameters"]["modes"] == 3);
  }
  SUBCASE("unknown config key warns") {
    write(dir / "u.json", R"({"n": 3, "foo": 1})");
    const auto r = run({"odlro", "--config", (dir / "u.json").string(), "--out-dir", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.err.find("unknown parameter 'foo'") != std::string::npos);
  }
  SUBCASE("malformed config names the line") {
    write(dir / "bad.json", "{\n  \"n\": 3,\n  oops\n}\n");
    const auto r = run({"odlro", "--config", (dir / "bad.json").string(), "--out-dir", dir.string()});
    CHECK(r.code == cli::kValidationError);
    CHECK(r.err.find("line 3") != std::string::npos);
  }
  SUBCASE("nested config values are rejected") {
    write(dir / "n.json", R"({"n": [1, 2]})");
    CHECK_THROWS_AS(cli::load_config(dir / "n.json"), ValidationError);
  }
}

TEST_CASE("contract violation exits 3") {
  const auto dir = scratch("constraint");
  const auto r = run({"constraint", "--sites", "3", "--periodic", "--out-dir", dir.string()});
  CHECK(r.code == cli::kContractViolation);
  CHECK(run({"constraint", "--sites", "2", "--out-dir", dir.string()}).code == 0);
  CHECK(read_json(dir / "constraint.json")["consistent"] == true);
}

TEST_CASE("replay is byte-identical") {
  const auto dir = scratch("interfere");
  REQUIRE(run({"interfere", "--seed", "11", "--runs", "5", "--na", "4", "--nb", "4", "--detections",
               "6", "--out-dir", dir.string()})
              .code == 0);
  const auto again = scratch("interfere-replay");
  REQUIRE(run({"replay", "--manifest", (dir / "manifest.json").string(), "--out-dir",
               again.string()})
              .code == 0);
  for (const char* f : {"runs.json", "interfere.csv", "summary.json"})
    CHECK(slurp(dir / f) == slurp(again / f));

  const auto ph = scratch("phases");
  REQUIRE(run({"phases", "--seed", "3", "--counts", "10,100", "--trials", "20", "--out-dir",
               ph.string()})
              .code == 0);
  const auto ph2 = scratch("phases-replay");
  REQUIRE(run({"replay", "--manifest", (ph / "manifest.json").string(), "--out-dir", ph2.string()})
              .code == 0);
  CHECK(slurp(ph / "phases.csv") == slurp(ph2 / "phases.csv"));
  CHECK(slurp(ph / "phases.json") == slurp(ph2 / "phases.json"));
}

TEST_CASE("parameter completion") {
  std::ostringstream warn;
  const auto p = cli::complete_parameters("interfere", cli::Json{{"seed", 1}}, warn);
  CHECK(p["na"] == 16);
  CHECK(p["runs"] == 200);
  CHECK(warn.str().empty());
  CHECK_THROWS_AS(cli::complete_parameters("interfere", cli::Json::object(), warn), ValidationError);
  const auto names = cli::subcommand_names();
  CHECK(std::find(names.begin(), names.end(), "coherent-check") != names.end());
}
