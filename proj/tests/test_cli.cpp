#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "mmd/csv.hpp"
#include "mmd/rng.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path& scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "mmdtest_cli_suite";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run_cli(const std::string& args) {
  const std::string command = std::string(MMDTEST_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("test subcommand reports a full result document") {
  const fs::path x = write_file("x.csv", "0.0,1.0\n1.0,0.0\n2.0,2.0\n0.5,0.5\n");
  const fs::path y = write_file("y.csv", "3.0,3.0\n4.0,2.5\n3.5,4.0\n");
  const fs::path out = scratch_dir() / "result.json";

  const int code = run_cli("test " + x.string() + " " + y.string() +
                           " --kernel laplacian --bandwidth median --alpha 0.05 --out " +
                           out.string());
  CHECK(code == 0);
  const json result = json::parse(read_file(out));
  CHECK(result.at("method") == "asymptotic");
  CHECK(result.at("n") == 4);
  CHECK(result.at("m") == 3);
  CHECK(result.at("p") == 2);
  CHECK(result.contains("version"));
  CHECK(result.contains("config"));
  CHECK(result.at("bandwidth").get<double>() > 0.0);
  const double p_value = result.at("p_value").get<double>();
  CHECK(p_value >= 0.0);
  CHECK(p_value <= 1.0);
  CHECK(result.at("reject").is_boolean());
}

TEST_CASE("test subcommand reports the pooled median bandwidth") {
  // Pooled distances {3, 4, 5, 1, 2, 1}: even count, median (2+3)/2.
  const fs::path x = write_file("bw_x.csv", "0\n3\n");
  const fs::path y = write_file("bw_y.csv", "4\n5\n");
  const fs::path out = scratch_dir() / "bw.json";
  const int code = run_cli("test " + x.string() + " " + y.string() +
                           " --kernel laplacian --bandwidth median --out " + out.string());
  CHECK(code == 0);
  const json result = json::parse(read_file(out));
  CHECK(result.at("bandwidth").get<double>() == doctest::Approx(2.5));
}

TEST_CASE("identical constant inputs exit with the degeneracy code") {
  const fs::path x = write_file("const_x.csv", "1.0\n1.0\n1.0\n");
  const fs::path y = write_file("const_y.csv", "1.0\n1.0\n");
  CHECK(run_cli("test " + x.string() + " " + y.string()) == 2);
}

TEST_CASE("input errors exit with code 1") {
  const fs::path x = write_file("ok.csv", "1.0\n2.0\n");
  const fs::path ragged = write_file("ragged.csv", "1.0,2.0\n3.0\n");
  const fs::path words = write_file("words.csv", "1.0\nhello\n");
  const fs::path wide = write_file("wide.csv", "1.0,2.0\n3.0,4.0\n");

  CHECK(run_cli("test missing.csv " + x.string()) == 1);
  CHECK(run_cli("test " + ragged.string() + " " + x.string()) == 1);
  CHECK(run_cli("test " + words.string() + " " + x.string()) == 1);
  CHECK(run_cli("test " + wide.string() + " " + x.string()) == 1);
  CHECK(run_cli("test " + x.string() + " " + x.string() + " --kernel l2 --bandwidth 2") == 1);
}

TEST_CASE("csv errors carry the offending line number") {
  const auto path = scratch_dir() / "bad_cell.csv";
  {
    std::ofstream out(path);
    out << "1.0\n2.0\noops\n";
  }
  try {
    mmd::read_numeric_csv(path.string(), false);
    FAIL("expected CsvError");
  } catch (const mmd::CsvError& err) {
    CHECK(err.line() == 3);
    CHECK(std::string(err.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("permutation runs are byte-identical under one seed") {
  const fs::path x = write_file("perm_x.csv", "0.1\n0.7\n1.3\n2.2\n0.4\n");
  const fs::path y = write_file("perm_y.csv", "0.9\n1.8\n2.6\n1.1\n");
  const fs::path out1 = scratch_dir() / "perm1.json";
  const fs::path out2 = scratch_dir() / "perm2.json";
  const std::string args = "test " + x.string() + " " + y.string() +
                           " --method permutation --permutations 300 --seed 7 --out ";
  CHECK(run_cli(args + out1.string()) == 0);
  CHECK(run_cli(args + out2.string()) == 0);
  const std::string first = read_file(out1);
  CHECK(!first.empty());
  CHECK(first == read_file(out2));
  const json result = json::parse(first);
  CHECK(result.at("method") == "permutation");
  CHECK(result.at("seed") == 7);
  CHECK(result.at("permutations") == 300);
  CHECK(result.at("p_value").get<double>() >= 1.0 / 301.0);
}

TEST_CASE("simulate validates the config schema") {
  const fs::path empty_grid = write_file("bad_power.json", R"({
    "experiment": "power",
    "dgp": {"p": 4, "rho": 0.0},
    "sizes": [[8, 8]],
    "kernels": ["l2"],
    "replications": 5,
    "shift": {"kind": "mean", "amount": 0.15, "beta_grid": []}
  })");
  CHECK(run_cli("simulate " + empty_grid.string()) == 1);

  const fs::path typo = write_file("typo.json", R"({
    "experiment": "size",
    "dgp": {"p": 4, "rho": 0.0},
    "sizes": [[8, 8]],
    "kernels": ["l2"],
    "replication": 5
  })");
  CHECK(run_cli("simulate " + typo.string()) == 1);
}

TEST_CASE("simulate produces a self-describing report") {
  const fs::path config = write_file("size.json", R"({
    "experiment": "size",
    "dgp": {"p": 4, "rho": 0.4},
    "sizes": [[8, 8]],
    "kernels": ["l2", "gaussian"],
    "methods": ["asymptotic"],
    "replications": 25,
    "seed": 5
  })");
  const fs::path out = scratch_dir() / "size_report.json";
  CHECK(run_cli("simulate " + config.string() + " --out " + out.string()) == 0);
  const json report = json::parse(read_file(out));
  CHECK(report.contains("version"));
  CHECK(report.at("config").at("seed") == 5);
  const auto& cells = report.at("report").at("cells");
  REQUIRE(cells.size() == 2);
  for (const auto& cell : cells) {
    const double rate = cell.at("rejection_rate").get<double>();
    CHECK(rate >= 0.0);
    CHECK(rate <= 1.0);
    CHECK(cell.at("replications") == 25);
  }
}

TEST_CASE("diagnose emits distances and an exportable sample file") {
  const fs::path config = write_file("diag.json", R"({
    "dgp": {"p": 5, "rho": 0.5},
    "n": 12, "m": 12,
    "kernels": ["l2"],
    "replications": 120,
    "seed": 2
  })");
  const fs::path out = scratch_dir() / "diag_report.json";
  const fs::path samples = scratch_dir() / "diag_samples.csv";
  CHECK(run_cli("diagnose " + config.string() + " --out " + out.string() +
                " --samples-csv " + samples.string()) == 0);
  const json report = json::parse(read_file(out));
  const auto& cell = report.at("report").at("cells").at(0);
  CHECK(cell.at("ks").get<double>() >= 0.0);
  CHECK(cell.at("wasserstein").get<double>() >= 0.0);

  const mmd::Matrix table = mmd::read_numeric_csv(samples.string(), false);
  CHECK(table.rows() == 120);
  CHECK(table.cols() == 3);
}

TEST_CASE("oracle subcommand matches the population example") {
  const fs::path config = write_file("oracle.json", R"({
    "kernel": "l2",
    "p": {"atoms": [[0]], "probs": [1.0]},
    "q": {"atoms": [[1]], "probs": [1.0]},
    "rho": 0.5,
    "n": 2, "m": 2
  })");
  const fs::path out = scratch_dir() / "oracle.json.out";
  CHECK(run_cli("oracle " + config.string() + " --out " + out.string()) == 0);
  const json report = json::parse(read_file(out));
  const auto& results = report.at("results");
  CHECK(results.at("mmd_sq").get<double>() == doctest::Approx(2.0));
  CHECK(results.at("hsic_self").get<double>() == doctest::Approx(0.25));
  CHECK(results.at("g4").at("direct").get<double>() ==
        doctest::Approx(results.at("g4").at("moment_formula").get<double>()).epsilon(1e-12));
  CHECK(results.at("moments").at("mean_mmd").get<double>() == doctest::Approx(2.0));
}

TEST_CASE("csv round-trips exactly") {
  mmd::RngStream rng(404, 0);
  mmd::Matrix values(7, 3);
  for (mmd::Index i = 0; i < 7; ++i) {
    for (mmd::Index j = 0; j < 3; ++j) {
      values(i, j) = (rng.next_double() - 0.5) * std::pow(10.0, static_cast<double>(i - 3));
    }
  }
  values(0, 0) = 0.0;
  values(1, 1) = -1e-300;
  values(2, 2) = 12345678901234567.0;
  const fs::path path = scratch_dir() / "roundtrip.csv";
  mmd::write_numeric_csv(path.string(), values);
  const mmd::Matrix parsed = mmd::read_numeric_csv(path.string(), false);
  REQUIRE(parsed.rows() == values.rows());
  REQUIRE(parsed.cols() == values.cols());
  CHECK((parsed - values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_SUITE_END();
