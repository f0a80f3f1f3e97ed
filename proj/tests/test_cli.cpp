#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

using std::string;
namespace fs = std::filesystem;

namespace {

const fs::path kCli = CSCAT_CLI_PATH;

fs::path scratch(const string& name) {
  const auto d = fs::temp_directory_path() / ("cscat_test_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const string& body) {
  std::ofstream out(p);
  out << body;
}

string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  string err;
};

Result run(const string& args, const fs::path& dir) {
  const auto log = dir / "stderr.txt";
  const string cmd = "\"" + kCli.string() + "\" " + args + " > /dev/null 2> \"" + log.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

const char* kSmall = R"({
  "schema_version": 1,
  "barrier": {"a": 0, "segments": [[1, 2]]},
  "amplitudes": {"e_min": 0.5, "e_max": 3, "n_e": 11},
  "decompose": {"energies": [1.0], "x_min": -2, "x_max": 3, "dx": 0.25},
  "times": {"energies": [0.5, 1.0, 2.5], "hartman": {"enabled": false}}
})";

std::size_t count_files(const fs::path& d) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(d)) {
    n += e.path().filename() != "stderr.txt" && e.path().extension() != ".json";
  }
  return n;
}

std::vector<std::vector<double>> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<double>> rows;
  string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    string cell;
    while (std::getline(ss, cell, ',')) {
      row.push_back(std::strtod(cell.c_str(), nullptr));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("usage and validation errors exit with 2") {
  const auto d = scratch("usage");
  CHECK(run("", d).code == 2);
  CHECK(run("amplitudes", d).code == 2);
  CHECK(run("frobnicate --scenario x.json", d).code == 2);

  write(d / "unknown.json", R"({"schema_version": 1, "barrier": {"a": 0, "segments": [[1, 2]]}, "bogus": 3})");
  const auto r = run("amplitudes --scenario \"" + (d / "unknown.json").string() + "\" --out \"" + (d / "o1").string() + "\"", d);
  CHECK(r.code == 2);
  CHECK(r.err.find("bogus") != string::npos);
  CHECK_FALSE(fs::exists(d / "o1"));

  write(d / "malformed.json", "{\"schema_version\": 1, \"barrier\": ");
  fs::create_directories(d / "o2");
  CHECK(run("amplitudes --scenario \"" + (d / "malformed.json").string() + "\" --out \"" + (d / "o2").string() + "\"", d)
            .code == 2);
  CHECK(fs::is_empty(d / "o2"));
  fs::remove_all(d);
}

TEST_CASE("missing input and unwritable output exit with 4") {
  const auto d = scratch("io");
  CHECK(run("amplitudes --scenario \"" + (d / "absent.json").string() + "\"", d).code == 4);
  write(d / "s.json", kSmall);
  write(d / "blocker", "not a directory");
  const auto r = run("amplitudes --scenario \"" + (d / "s.json").string() + "\" --out \"" + (d / "blocker" / "sub").string() + "\"", d);
  CHECK(r.code == 4);
  fs::remove_all(d);
}

TEST_CASE("asymmetric barrier is a computation error") {
  const auto d = scratch("asym");
  write(d / "s.json", R"({"schema_version": 1, "barrier": {"a": 0, "segments": [[0.5, 3], [0.5, 1]]},
                          "decompose": {"energies": [1.0]}})");
  fs::create_directories(d / "out");
  const auto r = run("decompose --scenario \"" + (d / "s.json").string() + "\" --out \"" + (d / "out").string() + "\"", d);
  CHECK(r.code == 3);
  CHECK(r.err.find("symmetric potential required") != string::npos);
  CHECK(fs::is_empty(d / "out"));
  fs::remove_all(d);
}

TEST_CASE("zero barrier outputs") {
  const auto d = scratch("zero");
  write(d / "s.json", R"({"schema_version": 1, "barrier": {"a": -0.5, "segments": [[1, 0]]},
                          "amplitudes": {"e_min": 0.5, "e_max": 3, "n_e": 6},
                          "decompose": {"energies": [1.0], "x_min": -3, "x_max": 3, "dx": 0.5}})");
  const string base = "--scenario \"" + (d / "s.json").string() + "\" --out \"" + (d / "out").string() + "\" --no-banner";
  REQUIRE(run("amplitudes " + base, d).code == 0);
  const auto amp = csv_rows(d / "out" / "amplitudes.csv");
  REQUIRE(amp.size() == 6);
  for (const auto& row : amp) {
    CHECK(row[5] == doctest::Approx(1.0).epsilon(1e-14));  // T
    CHECK(std::abs(row[6]) < 1e-14);                       // R
  }
  REQUIRE(run("decompose " + base, d).code == 0);
  const auto dec = csv_rows(d / "out" / "decompose_0.csv");
  REQUIRE(dec.size() == 13);
  for (const auto& row : dec) {
    CHECK(row[5] == 0.0);   // Re Psi_ref
    CHECK(row[6] == 0.0);   // Im Psi_ref
    CHECK(row[9] == 0.0);   // Re psi_ref (clipped)
    CHECK(row[10] == 0.0);  // Im psi_ref (clipped)
    CHECK(row[11] == doctest::Approx(2.0));
  }
  fs::remove_all(d);
}

TEST_CASE("banner and determinism") {
  const auto d = scratch("det");
  write(d / "s.json", kSmall);
  const string scen = "--scenario \"" + (d / "s.json").string() + "\"";
  for (const string cmd : {"amplitudes", "decompose", "times"}) {
    REQUIRE(run(cmd + " " + scen + " --out \"" + (d / "a").string() + "\" --no-banner", d).code == 0);
    REQUIRE(run(cmd + " " + scen + " --out \"" + (d / "b").string() + "\" --no-banner --threads 0", d).code == 0);
    REQUIRE(run(cmd + " " + scen + " --out \"" + (d / "c").string() + "\"", d).code == 0);
  }
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(d / "a")) {
    const auto name = e.path().filename();
    CHECK(slurp(d / "a" / name) == slurp(d / "b" / name));
    if (name.extension() == ".csv") {
      const auto bannered = slurp(d / "c" / name);
      CHECK(bannered.rfind("# cscat ", 0) == 0);
      CHECK(bannered.substr(bannered.find('\n') + 1) == slurp(d / "a" / name));
      CHECK(slurp(d / "a" / name).rfind("# cscat ", 0) != 0);
    }
    ++compared;
  }
  CHECK(compared >= 5);
  CHECK(count_files(d / "a") == count_files(d / "c"));
  fs::remove_all(d);
}
