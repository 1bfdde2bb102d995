#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "thermreg/errors.hpp"
#include "thermreg/harness/commands.hpp"
#include "thermreg/harness/config.hpp"
#include "thermreg/harness/csv.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

using namespace thermreg;
using namespace thermreg::harness;
namespace fs = std::filesystem;

namespace {

struct Table {
  std::vector<std::string> manifest;
  std::vector<std::string> columns;
  std::vector<std::map<std::string, std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table parse(std::istream& in) {
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.manifest.push_back(line);
    } else if (t.columns.empty()) {
      t.columns = split(line);
    } else {
      const auto f = split(line);
      std::map<std::string, std::string> row;
      for (std::size_t i = 0; i < t.columns.size() && i < f.size(); ++i) row[t.columns[i]] = f[i];
      t.rows.push_back(row);
    }
  }
  return t;
}

Table read(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return parse(in);
}

std::string slurp_without_timestamp(const fs::path& p) {
  std::ifstream in(p);
  std::string line, all;
  while (std::getline(in, line))
    if (line.rfind("# generated", 0) != 0) all += line + "\n";
  return all;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("thermreg_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

SweepConfig small_verify() {
  SweepConfig c = default_config(Command::verify);
  c.d = {1, 2};
  c.beta = {1.0};
  c.hbar = {0.4};
  c.lambda = {1.0};
  c.p = {2.0, kInfinity};
  return c;
}

double num(const std::string& s) { return std::stod(s); }

}  // namespace

TEST_CASE("format and quote") {
  CHECK(format_double(1.0) == "1.0000000000000000e+00");
  CHECK(format_double(kInfinity) == "inf");
  CHECK(format_double(-kInfinity) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(quote_field("plain") == "plain");
  CHECK(quote_field("a,b") == "\"a,b\"");
  CHECK(quote_field("say \"x\"") == "\"say \"\"x\"\"\"");
  CsvTable t({"a", "b"});
  t.manifest("k", "v");
  t.add_row({"1", "2"});
  std::ostringstream os;
  t.write(os);
  CHECK(os.str() == "# k: v\na,b\n1,2\n");
  CHECK_THROWS(t.add_row({"1"}));
}

TEST_CASE("config round trip and validation") {
  SweepConfig c = default_config(Command::verify);
  c.p = {1.5, kInfinity};
  c.slack = 1e-7;
  c.convention.scale = SchattenScale::three;
  const SweepConfig back = from_json(to_json(c), default_config(Command::mu_solve));
  CHECK(back.p.size() == 2);
  CHECK(std::isinf(back.p[1]));
  CHECK(back.beta == c.beta);
  CHECK(back.d == c.d);
  CHECK(back.slack == 1e-7);
  CHECK(back.convention.scale == SchattenScale::three);
  CHECK(to_json(c, false).find("threads") == std::string::npos);
  const SweepConfig partial = from_json(R"({"beta": [2.0], "p": ["inf"]})", c);
  CHECK(partial.beta == std::vector<double>{2.0});
  CHECK(partial.hbar == c.hbar);
  c.beta.clear();
  CHECK_THROWS_AS(validate(c, Command::verify), InvalidArgument);
  SweepConfig bad = default_config(Command::verify);
  bad.p = {0.5};
  CHECK_THROWS_AS(validate(bad, Command::verify), InvalidArgument);
  CHECK_THROWS(from_json("{not json", c));
}

TEST_CASE("companion paths") {
  CHECK(companion_path("a/b.csv", "slopes") == "a/b.slopes.csv");
  CHECK(companion_path("out", "moments") == "out.moments");
}

TEST_CASE("parallel_for covers every index") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 100);
  CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
    if (i == 7) throw InvalidArgument("boom");
  }));
}

TEST_CASE("verify on a small grid") {
  TempDir tmp;
  SweepConfig c = small_verify();
  c.output = (tmp.path / "verify.csv").string();
  std::ostringstream out, err;
  CHECK(run_command(Command::verify, c, out, err) == kPass);
  CHECK(err.str().empty());
  const Table t = read(c.output);
  CHECK(t.columns.front() == "d");
  CHECK(t.columns.back() == "wall_ms");
  CHECK(!t.rows.empty());
  bool saw_main = false;
  for (const auto& r : t.rows) {
    if (r.at("bound_id") == "main_bound") saw_main = true;
    CHECK(num(r.at("wall_ms")) == 0.0);
  }
  CHECK(saw_main);
}

TEST_CASE("verify reports a violation when the constant is shrunk") {
  TempDir tmp;
  SweepConfig c = small_verify();
  c.constant_scale = 1e-3;
  c.output = (tmp.path / "verify.csv").string();
  std::ostringstream out, err;
  CHECK(run_command(Command::verify, c, out, err) == kViolation);
  const Table t = read(c.output);
  bool failed_main = false;
  for (const auto& r : t.rows)
    if (r.at("bound_id") == "main_bound" && r.at("pass") == "0") failed_main = true;
  CHECK(failed_main);
}

TEST_CASE("invalid configurations exit 1 without output") {
  TempDir tmp;
  SweepConfig c = small_verify();
  c.hbar.clear();
  c.output = (tmp.path / "verify.csv").string();
  std::ostringstream out, err;
  CHECK(run_command(Command::verify, c, out, err) == kError);
  CHECK(err.str().rfind("error,", 0) == 0);
  CHECK(!fs::exists(c.output));
}

TEST_CASE("results do not depend on the thread count") {
  TempDir tmp;
  SweepConfig c = small_verify();
  c.d = {1, 2, 3};
  c.beta = {0.5, 2.0};
  c.output = (tmp.path / "v.csv").string();
  std::string text[2];
  int i = 0;
  for (int threads : {1, 4}) {
    c.threads = threads;
    std::ostringstream out, err;
    REQUIRE(run_command(Command::verify, c, out, err) == kPass);
    text[i++] = slurp_without_timestamp(c.output);
  }
  CHECK(text[0] == text[1]);
}

TEST_CASE("sweep-scaling") {
  TempDir tmp;
  SweepConfig c = default_config(Command::sweep_scaling);
  c.d = {1};
  c.beta = {1.0, 2.0, 4.0, 8.0};
  c.hbar = {1e-3};
  c.p = {2.0, kInfinity};
  c.output = (tmp.path / "sweep.csv").string();
  std::ostringstream out, err;
  CHECK(run_command(Command::sweep_scaling, c, out, err) == kPass);
  INFO(err.str());
  const Table main = read(c.output);
  const Table slopes = read(companion_path(c.output, "slopes"));
  for (const auto& r : main.rows)
    if (r.at("p") == "inf") CHECK(num(r.at("norm_D_x")) == doctest::Approx(num(r.at("max_singular"))).epsilon(1e-12));
  REQUIRE(!slopes.rows.empty());
  for (const auto& r : slopes.rows) {
    if (r.at("variable") != "beta") continue;
    const double expected = r.at("p") == "inf" ? 1.5 : 1.0;
    CHECK(num(r.at("slope")) == doctest::Approx(expected).epsilon(0.05));
    CHECK(r.at("pass") == "1");
  }

  SUBCASE("too few points are refused") {
    c.beta = {1.0, 2.0, 4.0, 200.0};
    std::ostringstream o, e;
    CHECK(run_command(Command::sweep_scaling, c, o, e) == kError);
    CHECK(e.str().find("regression refused") != std::string::npos);
  }
}

TEST_CASE("Fermi-Dirac approaches Maxwell-Boltzmann at small lambda") {
  TempDir tmp;
  SweepConfig c = default_config(Command::sweep_scaling);
  c.d = {1};
  c.beta = {1.0, 2.0, 4.0, 8.0};
  c.hbar = {0.01};
  c.lambda = {1e-5};
  c.p = {2.0};
  c.state = "both";
  c.output = (tmp.path / "sweep.csv").string();
  std::ostringstream out, err;
  run_command(Command::sweep_scaling, c, out, err);
  const Table t = read(c.output);
  int gaps = 0;
  for (const auto& r : t.rows)
    if (!r.at("mb_gap").empty()) {
      CHECK(num(r.at("mb_gap")) < 1e-3);
      ++gaps;
    }
  CHECK(gaps == 4);
}

TEST_CASE("wigner command") {
  TempDir tmp;
  SweepConfig c = default_config(Command::wigner);
  c.output = (tmp.path / "w.csv").string();
  std::ostringstream out, err;
  CHECK(run_command(Command::wigner, c, out, err) == kPass);
  const Table samples = read(c.output);
  const Table moments = read(companion_path(c.output, "moments"));
  CHECK(samples.rows.size() == c.d.size() * c.beta.size() * c.hbar.size() * 121u * 121u);
  for (const auto& r : moments.rows) CHECK(r.at("pass") == "1");
  int integrals = 0;
  for (const std::string& line : samples.manifest)
    if (line.rfind("# integral", 0) == 0) {
      CHECK(std::stod(line.substr(line.rfind(' ') + 1)) == doctest::Approx(1.0).epsilon(1e-3));
      ++integrals;
    }
  CHECK(integrals == 4);
  double peak = 0.0;
  for (const auto& r : samples.rows)
    if (r.at("d") == "1" && num(r.at("hbar")) == 1.0) peak = std::max(peak, num(r.at("f")));
  const double rate = 2.0 * std::tanh(0.5);
  CHECK(peak == doctest::Approx(rate / (2 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("mu-solve") {
  SweepConfig c = default_config(Command::mu_solve);
  c.output = "-";
  std::ostringstream out, err;
  CHECK(run_command(Command::mu_solve, c, out, err) == kPass);
  std::istringstream in(out.str());
  const Table t = parse(in);
  REQUIRE(t.rows.size() == 1);
  CHECK(std::abs(num(t.rows[0].at("residual"))) < 1e-10);
  CHECK(num(t.rows[0].at("Z_mu")) <= num(t.rows[0].at("Z_beta_closed")));
}

TEST_CASE("selftest") {
  SweepConfig c = default_config(Command::selftest);
  c.d = {1};
  c.beta = {1.0};
  c.hbar = {0.5};
  std::ostringstream out, err;
  CHECK(run_command(Command::selftest, c, out, err) == kPass);
  CHECK(out.str().find("selftest passed") != std::string::npos);
}
