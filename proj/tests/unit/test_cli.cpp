#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "fracmph/cli.hpp"
#include "fracmph/errors.hpp"
#include "fracmph/model_io.hpp"

using namespace fracmph;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fracmph");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_model(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "fracmph_cli_tests";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream(path) << text;
  return path.string();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

const char* kMpha = R"({"kind": "mpha", "alpha": 0.8, "pi": [0.6, 0.3],
  "T": [[-2.0, 1.0], [0.5, -1.5]], "R": [[1.0, 0.0], [0.5, 2.0]]})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("grid and list parsing") {
    CHECK(cli::parse_grid("0:1:3") == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(cli::parse_grid("0:2:3", 1e-4) == std::vector<double>{1e-4, 1.0, 2.0});
    CHECK(cli::parse_grid("1.5:1.5:1") == std::vector<double>{1.5});
    CHECK_THROWS_AS(cli::parse_grid("0:1"), ValidationError);
    CHECK_THROWS_AS(cli::parse_grid("0:1:0"), ValidationError);
    CHECK_THROWS_AS(cli::parse_grid("2:1:5"), ValidationError);
    CHECK(cli::parse_list("1, 2.5,3e-1") == std::vector<double>{1.0, 2.5, 0.3});
    CHECK_THROWS_AS(cli::parse_list("1,,2"), ValidationError);
    CHECK_THROWS_AS(cli::parse_list("1,x"), ValidationError);
  }

  TEST_CASE("sample") {
    const auto model = write_model("mpha.json", kMpha);
    const auto empty = run_cli({"sample", "--model", model, "--n", "0"});
    CHECK(empty.code == cli::kOk);
    CHECK(empty.out == "y1,y2\n");

    const auto a = run_cli({"sample", "--model", model, "--n", "1500", "--seed", "9"});
    const auto b = run_cli({"sample", "--model", model, "--n", "1500", "--seed", "9"});
    const auto c = run_cli({"sample", "--model", model, "--n", "1500", "--seed", "9", "--sampler", "product"});
    REQUIRE(a.code == cli::kOk);
    CHECK(lines(a.out).size() == 1501);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(lines(c.out).size() == 1501);

    const auto fph = write_model("fph.json", R"({"kind": "fph", "alpha": 0.6, "pi": [1.0], "T": [[-1.0]]})");
    const auto uni = run_cli({"sample", "--model", fph, "--n", "3"});
    CHECK(lines(uni.out).front() == "x");
  }

  TEST_CASE("error exit codes") {
    const auto bad = write_model("bad.json", R"({"kind": "mpha", "alpha": 0.8, "pi": [0.6], "T": [[1.0]], "R": [[1.0]]})");
    const auto r1 = run_cli({"sample", "--model", bad, "--n", "5"});
    CHECK(r1.code == cli::kValidation);
    CHECK(r1.err.find("invalid input") != std::string::npos);

    const auto garbage = write_model("garbage.json", "{not json");
    CHECK(run_cli({"laplace", "--model", garbage, "--theta", "1"}).code == cli::kValidation);

    const auto missing = (fs::temp_directory_path() / "fracmph_cli_tests" / "absent.json").string();
    CHECK(run_cli({"sample", "--model", missing, "--n", "5"}).code == cli::kIo);

    const auto model = write_model("mpha.json", kMpha);
    CHECK(run_cli({"sample", "--model", model, "--n", "5", "--out", "/nonexistent-dir/out.csv"}).code == cli::kIo);
    CHECK(run_cli({"sample", "--model", model}).code == cli::kValidation);
    CHECK(run_cli({"frobnicate"}).code == cli::kValidation);
    CHECK(run_cli({"laplace", "--model", model, "--theta", "1,2,3"}).code == cli::kValidation);
    CHECK(run_cli({"project", "--model", model, "--w", "0,0"}).code == cli::kValidation);
  }

  TEST_CASE("laplace") {
    const auto model = write_model("mpha.json", kMpha);
    const auto r = run_cli({"laplace", "--model", model, "--theta", "0,0", "--theta", "1,0.5"});
    REQUIRE(r.code == cli::kOk);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 3);
    CHECK(ls[0] == "theta1,theta2,laplace,continuous");
    std::vector<double> row0 = cli::parse_list(ls[1]);
    CHECK(row0[2] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(row0[3] == doctest::Approx(0.9).epsilon(1e-14));
    std::vector<double> row1 = cli::parse_list(ls[2]);
    const auto loaded = load_model(model);
    CHECK(row1[2] == doctest::Approx(mpha_laplace(loaded.dist, Vector{{1.0, 0.5}})).epsilon(1e-15));
  }

  TEST_CASE("project writes a loadable PH_alpha model") {
    const auto model = write_model("mpha.json", kMpha);
    const auto out = (fs::temp_directory_path() / "fracmph_cli_tests" / "proj.json").string();
    const auto r = run_cli({"project", "--model", model, "--w", "1,1", "--out", out});
    REQUIRE(r.code == cli::kOk);
    const auto reloaded = load_model(out);
    CHECK(reloaded.kind == "fph");
    const auto original = load_model(model);
    const auto proj = project(original.dist, Vector{{1.0, 1.0}});
    for (double u : {0.2, 1.0, 5.0}) {
      CHECK(std::abs(mpha_laplace(reloaded.dist, Vector{{u}}) - mpha_laplace(original.dist, Vector{{u, u}})) <=
            1e-12);
      CHECK(std::abs(mpha_laplace(reloaded.dist, Vector{{u}}) - fph_laplace(proj.dist, u)) <= 1e-12);
    }
    const auto doc = nlohmann::ordered_json::parse(std::ifstream(out));
    CHECK(doc["atom"].get<double>() == doctest::Approx(0.1));
  }

  TEST_CASE("density") {
    const auto fph = write_model("fph.json", R"({"kind": "fph", "alpha": 0.6, "pi": [1.0], "T": [[-1.0]]})");
    const auto r = run_cli({"density", "--model", fph, "--grid", "0:2:5"});
    REQUIRE(r.code == cli::kOk);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 6);
    CHECK(ls[0] == "x,f");
    CHECK(cli::parse_list(ls[1])[0] == 1e-4);

    const auto preset = write_model("preset.json", R"({"kind": "preset", "name": "paper-fig3"})");
    const auto g = run_cli({"density", "--model", preset, "--grid", "0:4:50", "--grid", "0:4:50"});
    REQUIRE(g.code == cli::kOk);
    const auto gl = lines(g.out);
    CHECK(gl.size() == 2501);
    CHECK(gl[0] == "x,y,f,region");
    CHECK(run_cli({"density", "--model", preset, "--grid", "0:4:50"}).code == cli::kValidation);

    const auto powered = write_model("powered.json", R"({"kind": "preset", "name": "paper-fig3", "nu": [2, 2]})");
    const auto p = run_cli({"density", "--model", powered, "--grid", "0.5:1:2", "--grid", "1:2:2"});
    REQUIRE(p.code == cli::kOk);
    CHECK(lines(p.out)[0] == "x,y,f");
  }

  TEST_CASE("verify") {
    const auto fph = write_model("fph.json", R"({"kind": "fph", "alpha": 0.6, "pi": [1.0], "T": [[-1.0]]})");
    const auto r = run_cli({"verify", "--model", fph, "--suite", "fast", "--seed", "3"});
    CHECK(r.code == cli::kOk);
    for (const auto& line : lines(r.out)) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j["pass"].get<bool>());
      if (j["sample_size"].get<int>() > 0) CHECK(j["seed"].get<int>() == 3);
    }
    CHECK(run_cli({"verify", "--model", fph, "--suite", "slow"}).code == cli::kValidation);
  }
}
