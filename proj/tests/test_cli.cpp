#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SEGSAMP_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, k);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch() {
  const auto d = fs::temp_directory_path() / "segsamp_cli_test";
  fs::create_directories(d);
  return d;
}

std::string write(const std::string& name, const std::string& body) {
  const auto p = scratch() / name;
  std::ofstream(p) << body;
  return p.string();
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

}  // namespace

TEST_CASE("solve then validate round trip") {
  const auto out = (scratch() / "c4.json").string();
  const auto s = run("solve circulant --d 4 --offsets 1,2 --out " + out);
  REQUIRE(s.code == 0);
  const auto j = read_json(out);
  // first row: 0, 1/2 - 1/(2 sqrt 5), 1/2 + 1/(2 sqrt 5), 1
  const auto row = j.at("coordinates").at(0);
  const double h = 0.5 / std::sqrt(5.0);
  CHECK(row.at(0).get<double>() == doctest::Approx(0.0));
  CHECK(row.at(1).get<double>() == doctest::Approx(0.5 - h).epsilon(1e-12));
  CHECK(row.at(2).get<double>() == doctest::Approx(0.5 + h).epsilon(1e-12));
  CHECK(row.at(3).get<double>() == doctest::Approx(1.0));
  CHECK(j.at("provenance").at("seed") == 0);

  const auto v = run("validate --segments " + out);
  CHECK(v.code == 0);
  const auto rep = json::parse(v.out);
  CHECK(rep.at("uniform") == true);
  CHECK(rep.at("range_violations").empty());
  CHECK(rep.at("max_coordinate_residual").get<double>() < 1e-8);
}

TEST_CASE("measure on a segment file") {
  const auto out = (scratch() / "c4m.json").string();
  REQUIRE(run("solve circulant --d 4 --offsets 1,2 --out " + out).code == 0);
  const auto m = run("measure --segments " + out + " --method exact");
  REQUIRE(m.code == 0);
  const auto r = json::parse(m.out);
  CHECK(r.at("tau").get<double>() == doctest::Approx(-1.0 / 7).epsilon(1e-9));
  CHECK(r.at("rho").get<double>() == doctest::Approx(-0.2763).epsilon(1e-3));
  CHECK(r.contains("provenance"));
}

TEST_CASE("sampling is reproducible and carries a header") {
  const std::string args = "sample --construction ccv --d 5 --offsets 1 --n 1000 --seed 7";
  const auto a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  std::istringstream in(a.out);
  std::string first, header;
  std::getline(in, first);
  std::getline(in, header);
  CHECK(first.rfind("# segsamp ", 0) == 0);
  CHECK(first.find("seed=7") != std::string::npos);
  CHECK(first.find("config=") != std::string::npos);
  CHECK(header == "u1,u2,u3,u4,u5");
  int rows = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    ++rows;
    double s = 0.0;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) s += std::stod(cell);
    CHECK(s == doctest::Approx(2.5).epsilon(1e-10));
  }
  CHECK(rows == 1000);
  CHECK(run("sample --construction ccv --d 5 --offsets 1 --n 1000 --seed 8").out != a.out);
}

TEST_CASE("exit codes") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("sample --construction ccv --d 3 --no-such-flag").code == 2);
  CHECK(run("measure --method sideways").code == 2);
  CHECK(run("--help").code == 0);
  CHECK(run("sample --construction unknown-kind --d 3 --n 2").code == 2);

  const auto bad = write("bad.json", R"({"d":2,"n":2,"coordinates":[[0,0.5],[1,0.2]],"edges":[[1,2]]})");
  CHECK(run("validate --segments " + bad).code == 1);
  CHECK(run("validate --segments " + (scratch() / "missing.json").string()).code == 1);
}

TEST_CASE("config file merges under command-line precedence") {
  const auto cfg = write("cfg.json", R"({"d": 3, "offsets": [1], "n": 4})");
  const auto from_file = run("sample --config " + cfg + " --construction ccv --seed 1");
  REQUIRE(from_file.code == 0);
  CHECK(from_file.out.find("u1,u2,u3\n") != std::string::npos);
  CHECK(from_file.out.find("u4") == std::string::npos);

  const auto override = run("sample --config " + cfg + " --construction ccv --d 4 --n 2 --seed 1");
  REQUIRE(override.code == 0);
  CHECK(override.out.find("u1,u2,u3,u4\n") != std::string::npos);
  int rows = 0;
  std::istringstream in(override.out);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#' && line[0] != 'u') ++rows;
  CHECK(rows == 2);

  // same effective configuration, same hash
  const auto explicit_run = run("sample --construction ccv --d 3 --offsets 1 --n 4 --seed 1");
  CHECK(explicit_run.out == from_file.out);
}

TEST_CASE("experiment subcommands emit csv") {
  const auto t = run("timing --constructions rbs,ccv --d-list 4 --n 100 --reps 2");
  REQUIRE(t.code == 0);
  CHECK(t.out.find("construction,d,mean_time") != std::string::npos);
  const auto z = run("timing --constructions rbs --d-list 4 --n 0 --reps 2");
  REQUIRE(z.code == 0);
  int lines = 0;
  std::istringstream in(z.out);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') ++lines;
  CHECK(lines == 1);  // header only

  const auto i = run("integrate --integrand wang-sloan --p 4 --points 20 --reps 20 --schemes mc-iid,glh-ccv");
  REQUIRE(i.code == 0);
  CHECK(i.out.find("mc-iid") != std::string::npos);
  CHECK(i.out.find("glh-ccv") != std::string::npos);

  const auto m = run("mcmc --model pumps --data " SEGSAMP_DATA_DIR "/pumps.csv --iterations 200 --burn-in 20 --reps 3");
  REQUIRE(m.code == 0);
  CHECK(m.out.find("pumps") != std::string::npos);
  CHECK(run("mcmc --model pumps --data " + write("empty.csv", "s,t\n")).code == 1);
}
