#include <catch2/catch.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

const std::string cli = RINGWELL_CLI_PATH;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "ringwell_cli_test_out.txt";
  const std::string cmd = "\"" + cli + "\" " + args + " > \"" + out.string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  std::ifstream is(out);
  std::stringstream ss;
  ss << is.rdbuf();
  fs::remove(out);
  return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").exit_code == 0);
  CHECK(run("spectrum --help").exit_code == 0);
  CHECK(run("").exit_code == 2);                                  // subcommand required
  CHECK(run("spectrum --M 3").exit_code == 2);                    // missing --N
  CHECK(run("spectrum --M 3 --N 1 --bogus 1").exit_code == 2);    // unknown flag
  CHECK(run("spectrum --M 1 --N 1 --T 1").exit_code == 2);        // invalid M
  CHECK(run("spectrum --M 3 --N 1 --T 1 --tau 0.5").exit_code == 2);  // conflicting styles
  CHECK(run("sweep --M 3 --N 1 --T 1 --axis1 bad").exit_code == 2);
  CHECK(run("sweep --M 3 --N 2 --U 0.5 --T 1 --axis1 tau:0.1:1:4 --methods exact "
            "--observable sp_energies").exit_code == 2);
}

TEST_CASE("spectrum of a free particle") {
  const auto r = run("spectrum --M 3 --N 1 --T 0.5 --method exact --count 1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("-1.0000000000000000e+00") != std::string::npos);
  CHECK(r.output.find("level,method,energy") != std::string::npos);
}

TEST_CASE("tau/v parameter style matches the direct style") {
  // dyadic values keep the products exact, so the outputs must be identical
  const auto direct = run("dist --M 4 --N 4 --T 0.25 --U 0.125 --V0 0.125 --methods sf");
  const auto scaled =
      run("dist --M 4 --N 4 --tau 0.5 --v 0.25 --UN-scale 0.5 --methods sf");
  CHECK(direct.exit_code == 0);
  CHECK(scaled.exit_code == 0);
  CHECK(direct.output == scaled.output);
}

TEST_CASE("validate emits a machine-readable report") {
  const auto r = run("validate");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j["pass"] == true);
  CHECK(j["checks"].size() >= 8);
}

TEST_CASE("strict mode flags per-point failures") {
  const auto ok = run("spectrum --M 6 --N 6 --T 0.05 --U 0.5 --method sf --count 2");
  CHECK(ok.exit_code == 0);  // failure recorded in the table, not fatal
  CHECK(ok.output.find("invalid_regime") != std::string::npos);
  const auto strict =
      run("spectrum --M 6 --N 6 --T 0.05 --U 0.5 --method sf --count 2 --strict");
  CHECK(strict.exit_code == 3);
}

TEST_CASE("config file with flag precedence") {
  const fs::path cfg = fs::temp_directory_path() / "ringwell_test.cfg";
  {
    std::ofstream os(cfg);
    os << "M = 6\nN = 5\nT = 0.4\nU = 0.6\nV0 = 0.3\nmethods = exact\n";
  }
  const auto from_cfg = run("dist --config \"" + cfg.string() + "\"");
  const auto explicit_flags = run("dist --M 6 --N 5 --T 0.4 --U 0.6 --V0 0.3 --methods exact");
  CHECK(from_cfg.exit_code == 0);
  CHECK(from_cfg.output == explicit_flags.output);
  // command line wins over the file
  const auto overridden = run("dist --config \"" + cfg.string() + "\" --V0 0.5");
  const auto direct = run("dist --M 6 --N 5 --T 0.4 --U 0.6 --V0 0.5 --methods exact");
  CHECK(overridden.output == direct.output);
  fs::remove(cfg);
}

TEST_CASE("csv files are byte-identical across job counts") {
  const fs::path f1 = fs::temp_directory_path() / "ringwell_j1.csv";
  const fs::path f8 = fs::temp_directory_path() / "ringwell_j8.csv";
  const std::string grid =
      "sweep --M 5 --N 4 --U 0.2 --T 1 --axis1 tau:0.3:1.5:4 --axis2 v:0:0.4:3 "
      "--methods si,sf --observable gs_energy";
  CHECK(run(grid + " --jobs 1 --out \"" + f1.string() + "\"").exit_code == 0);
  CHECK(run(grid + " --jobs 8 --out \"" + f8.string() + "\"").exit_code == 0);
  const std::string b1 = slurp(f1), b8 = slurp(f8);
  CHECK(!b1.empty());
  CHECK(b1 == b8);
  fs::remove(f1);
  fs::remove(f8);
}

TEST_CASE("json format mirrors csv content") {
  const auto r = run("dist --M 4 --N 2 --T 0.8 --U 0.3 --V0 0.1 --methods exact,si "
                     "--format json");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j["meta"]["artifact"] == "ringwell");
  CHECK(j["rows"].size() == 5);  // 4 sites + sum row
  CHECK(j["rows"][0].contains("n_exact"));
  CHECK(j["rows"][0].contains("m_si"));
}
