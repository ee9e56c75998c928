// Copyright 2026 mmtest authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end checks of the command line binary: exit codes, pinned
// outputs, and byte-identical reruns.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <catch2/catch_amalgamated.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("mmtest_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_file(const std::string& name, const std::string& text) {
  fs::path p = work_dir() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

RunResult run_cli(const std::string& args) {
  fs::path out = work_dir() / "stdout.txt";
  fs::path err = work_dir() / "stderr.txt";
  std::string cmd = std::string(MMTEST_CLI_PATH) + " " + args + " > " +
                    out.string() + " 2> " + err.string();
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("dist prints the euclidean line example") {
  fs::path pts = write_file("pts.csv", "0\n1\n3\n");
  RunResult r = run_cli("dist --in " + pts.string() + " --space euclidean");
  CHECK(r.code == 0);
  CHECK(r.out ==
        "# mmtest dist space=euclidean n=3\n"
        "0,1,3\n"
        "1,0,2\n"
        "3,2,0\n");
  CHECK(r.err.find("triangle audit") != std::string::npos);
  CHECK(r.err.find("0 violations") != std::string::npos);
}

TEST_CASE("dist on gaussian rows shows the reciprocal-scale tie") {
  fs::path g = write_file("gauss.csv", "0,1\n0,2\n0,0.5\n");
  RunResult r = run_cli("dist --in " + g.string() +
                        " --space gaussian --zero-mean");
  REQUIRE(r.code == 0);
  // row 0: distances to (0,2) and (0,0.5) coincide because sigma -> 1/sigma
  // is an isometry fixing sigma = 1
  std::istringstream lines(r.out);
  std::string comment, row0;
  std::getline(lines, comment);
  std::getline(lines, row0);
  double d01 = 0.0, d02 = 0.0;
  char c = 0;
  std::istringstream row(row0);
  double zero = 0.0;
  row >> zero >> c >> d01 >> c >> d02;
  CHECK(d01 == Catch::Approx(0.3249196962329063).margin(1e-12));
  CHECK(d02 == Catch::Approx(d01).margin(1e-15));
}

TEST_CASE("dist on a tree file uses cone-path geodesics") {
  fs::path t = write_file("trees.nwk",
                          "# three leaves\n"
                          "((1,2):0.5,3);\n"
                          "(1,(2,3):0.25);\n"
                          "((1,3):0.1,2);\n");
  RunResult r = run_cli("dist --in " + t.string() + " --space bhv --leaves 3");
  CHECK(r.code == 0);
  CHECK(r.out ==
        "# mmtest dist space=bhv n=3\n"
        "0,0.75,0.6\n"
        "0.75,0,0.35\n"
        "0.6,0.35,0\n");
}

TEST_CASE("dist reports parse failures with line numbers") {
  fs::path t = write_file("bad.nwk", "((1,2):0.5,3);\n((1,2,3);\n");
  RunResult r = run_cli("dist --in " + t.string() + " --space bhv");
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("test accepts identical halves and records the seed") {
  fs::path pooled = write_file("pooled.csv", "0\n1\n3\n0\n1\n3\n");
  fs::path out = work_dir() / "ks.json";
  RunResult r = run_cli("test --which ks --pooled " + pooled.string() +
                        " --space euclidean --out " + out.string());
  CHECK(r.code == 0);
  std::string json = slurp(out);
  CHECK(json.find("\"test\": \"ks\"") != std::string::npos);
  CHECK(json.find("\"reject\": false") != std::string::npos);
  CHECK(json.find("\"seed\": 0") != std::string::npos);
  CHECK(json.find("\"alpha\": 0.05") != std::string::npos);
}

TEST_CASE("test rejects a gross spread difference with exit code 3") {
  fs::path x = write_file("tight.csv", "0\n1\n2\n3\n4\n");
  fs::path y = write_file("wide.csv", "0\n10\n20\n30\n40\n");
  RunResult r = run_cli("test --which ks --x " + x.string() + " --y " +
                        y.string() + " --space euclidean");
  CHECK(r.code == 3);
  CHECK(r.out.find("\"reject\": true") != std::string::npos);
}

TEST_CASE("energy on identical sets is zero and accepts") {
  fs::path pooled = write_file("pooled.csv", "0\n1\n3\n0\n1\n3\n");
  RunResult r = run_cli("test --which energy --pooled " + pooled.string() +
                        " --space euclidean --B 99 --seed 5");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"statistic\": 0.0") != std::string::npos);
  CHECK(r.out.find("\"seed\": 5") != std::string::npos);
}

TEST_CASE("energy pools two point files") {
  fs::path x = write_file("ex.csv", "0\n1\n3\n");
  fs::path y = write_file("ey.csv", "0\n1\n3\n");
  RunResult r = run_cli("test --which energy --x " + x.string() + " --y " +
                        y.string() + " --space euclidean --B 49");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"statistic\": 0.0") != std::string::npos);
  CHECK(r.out.find("\"n_x\": 3") != std::string::npos);
}

TEST_CASE("energy refuses two separate matrices") {
  fs::path x = write_file("mx.csv", "0,1\n1,0\n");
  RunResult r = run_cli("test --which energy --x " + x.string() + " --y " +
                        x.string() + " --space matrix");
  CHECK(r.code == 2);
  CHECK(r.err.find("cross-distances") != std::string::npos);
}

TEST_CASE("energy rejects an odd pooled sample") {
  fs::path pooled = write_file("odd.csv", "0\n1\n3\n4\n7\n");
  RunResult r = run_cli("test --which energy --pooled " + pooled.string() +
                        " --space euclidean");
  CHECK(r.code == 2);
}

TEST_CASE("labels file routes points to groups") {
  // alternating labels put {0,3} vs {1,4}: same spacing, accept
  fs::path pooled = write_file("lp.csv", "0\n1\n3\n4\n");
  fs::path labels = write_file("labels.txt", "0\n1\n0\n1\n");
  RunResult r = run_cli("test --which energy --pooled " + pooled.string() +
                        " --labels " + labels.string() +
                        " --space euclidean --B 19");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"n_x\": 2") != std::string::npos);
}

TEST_CASE("mixing pooled with per-group files is a usage error") {
  fs::path pooled = write_file("pooled.csv", "0\n1\n3\n0\n1\n3\n");
  RunResult r = run_cli("test --which ks --pooled " + pooled.string() +
                        " --x " + pooled.string() + " --space euclidean");
  CHECK(r.code == 1);
}

TEST_CASE("missing input files are data errors") {
  RunResult r = run_cli(
      "test --which ks --x /nonexistent/a.csv --y /nonexistent/b.csv "
      "--space euclidean");
  CHECK(r.code == 2);
  CHECK(r.err.find("cannot open") != std::string::npos);
}

TEST_CASE("unknown flags and missing subcommands are usage errors") {
  CHECK(run_cli("").code == 1);
  CHECK(run_cli("dist --nope x").code == 1);
  CHECK(run_cli("test --which tless").code == 1);
  CHECK(run_cli("--help").code == 0);
}

TEST_CASE("selftest runs on a matrix file and enforces minimum size") {
  fs::path m = write_file("m6.csv",
                          "0,1,3,10,11,13\n"
                          "1,0,2,9,10,12\n"
                          "3,2,0,7,8,10\n"
                          "10,9,7,0,1,3\n"
                          "11,10,8,1,0,2\n"
                          "13,12,10,3,2,0\n");
  RunResult r = run_cli("selftest --in " + m.string() + " --space matrix");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"statistic\": 0.0") != std::string::npos);

  fs::path small = write_file("m3.csv", "0,1,3\n1,0,2\n3,2,0\n");
  RunResult r2 = run_cli("selftest --in " + small.string() + " --space matrix");
  CHECK(r2.code == 2);
}

TEST_CASE("strict matrix mode turns triangle violations into errors") {
  fs::path m = write_file("tri.csv", "0,1,5\n1,0,1\n5,1,0\n");
  CHECK(run_cli("selftest --in " + m.string() + " --space matrix").code == 2);
  RunResult r =
      run_cli("selftest --in " + m.string() + " --space matrix --strict");
  CHECK(r.code == 2);
  CHECK(r.err.find("triangle") != std::string::npos);
}

TEST_CASE("zero-mean enforcement is a data error") {
  fs::path g = write_file("gm.csv", "0,1\n0.5,2\n");
  RunResult r = run_cli("dist --in " + g.string() +
                        " --space gaussian --zero-mean");
  CHECK(r.code == 2);
  CHECK(r.err.find("nonzero mean") != std::string::npos);
}

TEST_CASE("sprocess pins the line example") {
  fs::path pts = write_file("pts.csv", "0\n1\n3\n");
  RunResult r = run_cli("sprocess --in " + pts.string() +
                        " --space euclidean --center 0 --grid 0.5,1,2");
  CHECK(r.code == 0);
  CHECK(r.out ==
        "# mmtest sprocess space=euclidean center=0 n=3\n"
        "radius,value\n"
        "0.5,0\n"
        "1,0.5\n"
        "2,0.5\n");
}

TEST_CASE("sprocess defaults to the medoid and covers the diameter") {
  fs::path pts = write_file("pts.csv", "0\n1\n3\n");
  RunResult r = run_cli("sprocess --in " + pts.string() + " --space euclidean");
  CHECK(r.code == 0);
  CHECK(r.out.find("center=1") != std::string::npos);
  // last grid point reaches the diameter, so the final value is 1
  std::string tail = r.out.substr(r.out.rfind(',') + 1);
  CHECK(tail == "1\n");
}

TEST_CASE("sprocess validates the center argument") {
  fs::path pts = write_file("pts.csv", "0\n1\n3\n");
  CHECK(run_cli("sprocess --in " + pts.string() +
                " --space euclidean --center 7")
            .code == 2);
  CHECK(run_cli("sprocess --in " + pts.string() +
                " --space euclidean --center seven")
            .code == 1);
  CHECK(run_cli("sprocess --in " + pts.string() +
                " --space euclidean --grid 2:1:5")
            .code == 2);
}

TEST_CASE("linspace grids include both endpoints") {
  fs::path pts = write_file("pts.csv", "0\n1\n3\n");
  RunResult r = run_cli("sprocess --in " + pts.string() +
                        " --space euclidean --center 0 --grid 1:3:3");
  CHECK(r.code == 0);
  CHECK(r.out.find("\n1,") != std::string::npos);
  CHECK(r.out.find("\n2,") != std::string::npos);
  CHECK(r.out.find("\n3,1\n") != std::string::npos);
}

TEST_CASE("reruns with the same config are byte-identical") {
  fs::path pooled = write_file("pooled.csv", "0\n1\n3\n0\n1\n4\n");
  fs::path out1 = work_dir() / "r1.json";
  fs::path out2 = work_dir() / "r2.json";
  std::string base = "test --which energy --pooled " + pooled.string() +
                     " --space euclidean --B 200 --seed 99 --out ";
  REQUIRE(run_cli(base + out1.string()).code == 0);
  REQUIRE(run_cli(base + out2.string()).code == 0);
  std::string a = slurp(out1), b = slurp(out2);
  REQUIRE(!a.empty());
  CHECK(a == b);
}

TEST_CASE("power emits a config header and reproducible tables") {
  fs::path csv1 = work_dir() / "p1.csv";
  fs::path csv2 = work_dir() / "p2.csv";
  fs::path md = work_dir() / "p.md";
  std::string base =
      "power --mode quick --n 8 --seed 12 --md " + md.string() + " --out ";
  REQUIRE(run_cli(base + csv1.string()).code == 0);
  REQUIRE(run_cli(base + csv2.string()).code == 0);
  std::string a = slurp(csv1);
  CHECK(a == slurp(csv2));
  CHECK(a.find("# mmtest power mode=quick\n") == 0);
  CHECK(a.find("n=8 n_mc=200 B=200 alpha=0.05 seed=12") != std::string::npos);
  CHECK(a.find("sigma_sq,ks_power,ks_se,energy_power,energy_se\n") !=
        std::string::npos);
  CHECK(slurp(md).find("| sigma_sq |") == 0);
}
