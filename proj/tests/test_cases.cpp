#include "qcdiff/cases.hpp"
#include "qcdiff/oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace qcdiff;
namespace fs = std::filesystem;

namespace {

json psf_config() {
  return json::parse(R"({
    "command": "psf",
    "cases": [{"name": "Z2", "scheme": {"preset": "integer", "d": 2, "m": 0},
               "g": {"factors": [{"kind": "gaussian", "sigma": 1.0}, {"kind": "gaussian", "sigma": 1.0}]},
               "h": {"kind": "constant", "value": 1.0}, "radius": 8, "max_residual": 1e-12}]})");
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qcdiff_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("psf run on Z^2 passes and writes artifacts") {
  RunOptions opt;
  opt.out_dir = fresh_dir("psf");
  const auto r = run_command("psf", psf_config(), opt);
  CHECK(r.pass());
  CHECK(fs::exists(*opt.out_dir / "psf.csv"));
  CHECK(fs::exists(*opt.out_dir / "report.json"));
  const auto report = read_json_file(*opt.out_dir / "report.json");
  CHECK(report.at("pass").get<bool>());
}

TEST_CASE("identical configs give byte-identical artifacts") {
  const auto cfg = json::parse(R"({"command": "density", "scheme": {"preset": "golden"},
    "weight": {"kind": "gaussian", "sigma": 1.0}, "sequence": {"L0": 10, "max_n": 20}})");
  RunOptions a, b;
  a.out_dir = fresh_dir("det_a");
  b.out_dir = fresh_dir("det_b");
  run_command("density", cfg, a);
  run_command("density", cfg, b);
  CHECK(slurp(*a.out_dir / "density.csv") == slurp(*b.out_dir / "density.csv"));
  CHECK(slurp(*a.out_dir / "report.json") == slurp(*b.out_dir / "report.json"));
}

TEST_CASE("bad configs raise ConfigError before writing anything") {
  RunOptions opt;
  opt.out_dir = fresh_dir("bad");
  auto cfg = psf_config();
  cfg["cases"][0]["scheme"] = json{{"preset", "nonsense"}};
  CHECK_THROWS_AS(run_command("psf", cfg, opt), ConfigError);
  CHECK_THROWS_AS(run_command("density", psf_config(), opt), ConfigError);
  CHECK_THROWS_AS(run_command("psf", json::array(), opt), ConfigError);
  CHECK_FALSE(fs::exists(*opt.out_dir));
}

TEST_CASE("csv uses 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(kTau)) == kTau);
}

TEST_CASE("comb csv round trip") {
  const fs::path p = fresh_dir("comb");
  fs::create_directories(p);
  const WeightedComb c({Vec::Constant(1, 0.1), Vec::Constant(1, 1.0 / 3.0)}, {cplx(1.0 / 7.0, -2.0), cplx(kTau, 0.0)},
                       Box::interval(-1, 1));
  write_comb_csv(p / "c.csv", c);
  const auto back = read_comb_csv(p / "c.csv", 1, c.window());
  CHECK(back.points() == c.points());
  CHECK(back.weights() == c.weights());
}

TEST_CASE("oracles agree on a hand example") {
  const auto pts = oracle::enumerate(CutProjectScheme::integer(1, 1), Box::interval(-1.5, 1.5), Box::interval(-0.5, 0.5));
  CHECK(pts == std::vector<std::vector<long long>>{{-1, 0}, {0, 0}, {1, 0}});
  CHECK(oracle::separation({Vec::Constant(1, 0.0), Vec::Constant(1, 3.0), Vec::Constant(1, 1.0)}) == 0.5);
  CHECK(oracle::covering_1d({0.0, 1.0, 3.0}, 0.0, 3.0) == 1.0);
}
