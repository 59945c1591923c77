#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

const std::string kBin = CLI_BIN_PATH;
const std::string kDir = "cli_test_out";

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string log = kDir + "/cmd.log";
  std::filesystem::create_directories(kDir);
  std::string cmd = kBin + " " + args + " > " + log + " 2>&1";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// value following a "key value" token pair in command output
double value_after(const std::string& out, const std::string& key) {
  auto pos = out.find(key);
  REQUIRE(pos != std::string::npos);
  std::istringstream is(out.substr(pos + key.size()));
  double v = 0.0;
  REQUIRE((is >> v));
  return v;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("scaling curves spot values") {
  auto r = run("--out " + kDir + "/curves scaling curves");
  CHECK(r.code == 0);
  auto rows = read_csv(kDir + "/curves/curves.csv");
  REQUIRE(rows.size() > 2);
  bool found = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double gsq = std::stod(rows[i][0]);
    if (std::abs(gsq - 8.0 / 3.0) < 1e-9) {
      found = true;
      CHECK(std::abs(std::stod(rows[i][2])) < 1e-9);            // middle curve hits 0
      CHECK(std::stod(rows[i][3]) == -1.0);                      // trivial line
      CHECK(std::stod(rows[i][1]) == doctest::Approx(0.625));    // upper curve
    }
  }
  CHECK(found);
  CHECK(std::filesystem::exists(kDir + "/curves/manifest.json"));
}

TEST_CASE("triangulation count convention") {
  auto r = run("--out " + kDir + "/phi maps phi --n 0 --m 0");
  CHECK(r.code == 0);
  CHECK(r.out.substr(0, 1) == "1");
}

TEST_CASE("uniform driving probe: image, swallowing, swallow time") {
  auto r = run("--out " + kDir + "/lw1 loewner forward --uniform --T 1 --probe 0.5");
  CHECK(r.code == 0);
  CHECK(r.out.find("swallowed=true") != std::string::npos);
  CHECK(std::abs(value_after(r.out, "swallow_time") - std::log(2.0)) < 1e-6);
  CHECK(std::abs(value_after(r.out, "deriv0") - std::exp(1.0)) < 1e-6);

  auto r2 = run("--out " + kDir + "/lw2 loewner forward --uniform --T 0.5 --probe 0.3");
  CHECK(r2.code == 0);
  CHECK(r2.out.find("swallowed=false") != std::string::npos);
  CHECK(std::abs(value_after(r2.out, "image") - std::exp(0.5) * 0.3) < 1e-8);
  CHECK(std::filesystem::exists(kDir + "/lw2/trajectory.csv"));
}

TEST_CASE("identical parameters give byte-identical tables") {
  auto ra = run("--seed 5 --out " + kDir + "/ga gff-sample --n 17");
  auto rb = run("--seed 5 --out " + kDir + "/gb gff-sample --n 17");
  CHECK(ra.code == 0);
  CHECK(rb.code == 0);
  std::string a = slurp(kDir + "/ga/field.csv"), b = slurp(kDir + "/gb/field.csv");
  CHECK(a.size() > 0);
  CHECK(a == b);
  auto rc = run("--seed 6 --out " + kDir + "/gc gff-sample --n 17");
  CHECK(rc.code == 0);
  CHECK(slurp(kDir + "/gc/field.csv") != a);
}

TEST_CASE("config file supplies defaults") {
  std::filesystem::create_directories(kDir);
  {
    std::ofstream cfg(kDir + "/run.cfg");
    cfg << "seed=9\n";
  }
  auto ra = run("--config " + kDir + "/run.cfg --out " + kDir + "/ca gff-sample --n 9");
  auto rb = run("--seed 9 --out " + kDir + "/cb gff-sample --n 9");
  CHECK(ra.code == 0);
  CHECK(rb.code == 0);
  CHECK(slurp(kDir + "/ca/field.csv") == slurp(kDir + "/cb/field.csv"));
}

TEST_CASE("growth, tiling and map subcommands produce their tables") {
  auto g = run("--seed 2 --out " + kDir + "/grow --format ppm grow eden --width 17 --height 17 "
               "--steps 30");
  CHECK(g.code == 0);
  CHECK(std::filesystem::exists(kDir + "/grow/cluster.csv"));
  CHECK(std::filesystem::exists(kDir + "/grow/growth.ppm"));

  auto f = run("--seed 2 --out " + kDir + "/fpp fpp --width 17 --height 17 --horizon 2");
  CHECK(f.code == 0);
  CHECK(std::filesystem::exists(kDir + "/fpp/cluster.csv"));

  auto t = run("--seed 3 --out " + kDir + "/tile lqg-tile --n 32 --gamma 1 --delta 0.01");
  CHECK(t.code == 0);
  CHECK(std::filesystem::exists(kDir + "/tile/tiles.csv"));

  auto e = run("--seed 4 --out " + kDir + "/exp maps explore --m 2 --n 3 --mode eden");
  CHECK(e.code == 0);
  auto rows = read_csv(kDir + "/exp/necklaces.csv");
  CHECK(rows.size() >= 2);

  auto w = run("--seed 4 --out " + kDir + "/ust maps wilson --width 4 --height 4");
  CHECK(w.code == 0);
  auto trows = read_csv(kDir + "/ust/tree.csv");
  CHECK(trows.size() == 17);
}

TEST_CASE("chain subcommands export state and trajectory bundles") {
  auto i = run("--seed 11 --out " + kDir + "/qi qle init --kappa 6 --degree 8");
  CHECK(i.code == 0);
  CHECK(std::filesystem::exists(kDir + "/qi/state.csv"));

  auto r = run("--seed 11 --out " + kDir + "/qr qle run --kappa 6 --delta 0.05 --T 0.1 "
               "--degree 8 --dt 0.005");
  CHECK(r.code == 0);
  CHECK(r.out.find("2 blocks") != std::string::npos);
  for (const char* f : {"states.csv", "hulls.csv", "atoms.csv", "nu_snapshots.csv"})
    CHECK(std::filesystem::exists(kDir + "/qr/trajectory/" + std::string(f)));
  CHECK(std::filesystem::exists(kDir + "/qr/manifest.json"));
}

TEST_CASE("verification subcommands report their statistics") {
  auto g = run("--out " + kDir + "/vg sle verify-green --kind dirichlet");
  CHECK(g.code == 0);
  CHECK(value_after(g.out, "max deviation") < 1e-4);

  auto s = run("--seed 21 --out " + kDir + "/sr sle run --kappa 6 --T 0.05 --dt 0.001 "
               "--probe 0.3");
  CHECK(s.code == 0);
  auto rows = read_csv(kDir + "/sr/run.csv");
  CHECK(rows.size() == 52);  // header + 51 time steps
}

TEST_CASE("error paths use the documented exit codes") {
  CHECK(run("nonsense-subcommand").code == 1);
  CHECK(run("--out " + kDir + "/bad grow nonsense-model").code == 1);
  CHECK(run("--format png --out " + kDir + "/bad scaling curves").code == 1);
  CHECK(run("--out " + kDir + "/bad qle init --kappa 0.5").code == 1);
  CHECK(run("--out " + kDir + "/bad loewner extract --curve missing_file.csv --dt 0.001").code ==
        1);
}

TEST_CASE("cleanup") {
  std::filesystem::remove_all(kDir);
  CHECK(true);
}
