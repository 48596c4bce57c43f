// End-to-end checks of the command-line tool: exit codes, error reports,
// deterministic output, CSV artifacts. argv[1] is the binary under test.
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

#define REQUIRE(cond, msg)                                                       \
  do {                                                                           \
    if (!(cond)) {                                                               \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg << "\n"; \
      std::exit(1);                                                              \
    }                                                                            \
  } while (0)

std::string g_cli;
std::filesystem::path g_dir;

int run(const std::string& args, const std::string& out_file) {
  std::string cmd = g_cli + " " + args + " > " + out_file + " 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1 && WIFEXITED(rc), "process did not exit normally: " + cmd);
  return WEXITSTATUS(rc);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good(), "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
  REQUIRE(out.good(), "cannot write " + p.string());
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

void pass(const std::string& name) { std::cout << "[PASS] " << name << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  REQUIRE(argc >= 2, "usage: test_cli <path-to-cli>");
  g_cli = argv[1];
  g_dir = std::filesystem::temp_directory_path() / "finsler-cli-checks";
  std::filesystem::create_directories(g_dir);

  auto cfg = [&](const char* name) { return (g_dir / name).string(); };

  // --- help and argument parsing -------------------------------------------
  REQUIRE(run("--help", cfg("help.txt")) == 0, "--help should exit 0");
  REQUIRE(run("--no-such-flag", cfg("badflag.txt")) == 2, "unknown flag should exit 2");
  REQUIRE(run("curvature", cfg("noconf.txt")) == 2, "missing --config should exit 2");
  pass("argument parsing");

  // --- curvature report, byte-identical across runs -------------------------
  write(cfg("curv.json"), R"({
    "metric": {"type": "paper", "dim": 3, "b": 0.5},
    "x": [1.0, 1.0, 0.0],
    "y": [0.0, 0.0, 1.5]
  })");
  REQUIRE(run("curvature --config " + cfg("curv.json") + " --out " + cfg("curv1.json"),
              cfg("curv1.log")) == 0,
          "curvature run failed");
  REQUIRE(run("curvature --config " + cfg("curv.json") + " --out " + cfg("curv2.json"),
              cfg("curv2.log")) == 0,
          "curvature rerun failed");
  std::string c1 = slurp(cfg("curv1.json"));
  REQUIRE(c1 == slurp(cfg("curv2.json")), "identical config must give byte-identical output");
  REQUIRE(contains(c1, "\"ric\""), "curvature report missing ric");
  REQUIRE(contains(c1, "e-") || contains(c1, "e+"), "floats must be in scientific notation");
  pass("curvature determinism");

  // --- geodesic: straight line in a flat norm, CSV artifact -----------------
  write(cfg("geo.json"), R"({
    "metric": {"type": "euclidean", "dim": 2},
    "x0": [0.0, 0.0],
    "y0": [3.0, 4.0],
    "T": 1.0
  })");
  REQUIRE(run("geodesic --config " + cfg("geo.json") + " --out " + cfg("geo.out") + " --csv " +
                  cfg("geo.csv"),
              cfg("geo.log")) == 0,
          "geodesic run failed");
  {
    std::istringstream csv(slurp(cfg("geo.csv")));
    std::string line;
    std::getline(csv, line);
    REQUIRE(line == "t,x1,x2,v1,v2,F", "geodesic CSV header mismatch: " + line);
    int rows = 0;
    while (std::getline(csv, line)) {
      if (line.empty()) continue;
      REQUIRE(contains(line, "5.000000000000e+00"), "speed column should stay exactly 5");
      ++rows;
    }
    REQUIRE(rows >= 2, "geodesic CSV has too few rows");
  }
  REQUIRE(contains(slurp(cfg("geo.out")), "\"max_F_drift\""), "geodesic report missing drift");
  pass("geodesic CSV");

  // --- input errors: exit 2 with machine-readable codes ---------------------
  write(cfg("bad_wind.json"), R"({
    "metric": {"type": "randers", "h": {"dim": 3}, "wind": [0.0, 0.0, 1.2]},
    "x": [0.0, 0.0, 0.0],
    "y": [0.0, 0.0, 1.0]
  })");
  REQUIRE(run("curvature --config " + cfg("bad_wind.json"), cfg("bad_wind.out")) == 2,
          "supersonic wind should exit 2");
  REQUIRE(contains(slurp(cfg("bad_wind.out")), "NAVIGATION_DEGENERATE"),
          "missing NAVIGATION_DEGENERATE code");

  REQUIRE(run("curvature --config " + cfg("absent.json"), cfg("absent.out")) == 2,
          "missing config file should exit 2");
  REQUIRE(contains(slurp(cfg("absent.out")), "IO_ERROR"), "missing IO_ERROR code");

  write(cfg("mangled.json"), "{\"metric\": ");
  REQUIRE(run("curvature --config " + cfg("mangled.json"), cfg("mangled.out")) == 2,
          "mangled JSON should exit 2");
  REQUIRE(contains(slurp(cfg("mangled.out")), "CONFIG_INVALID"), "missing CONFIG_INVALID code");

  write(cfg("unknown_key.json"), R"({
    "metric": {"type": "euclidean", "dim": 2},
    "x": [0.0, 0.0],
    "y": [1.0, 0.0],
    "extra": true
  })");
  REQUIRE(run("curvature --config " + cfg("unknown_key.json"), cfg("unknown_key.out")) == 2,
          "unknown key should exit 2");
  REQUIRE(contains(slurp(cfg("unknown_key.out")), "CONFIG_INVALID"),
          "unknown key should report CONFIG_INVALID");
  pass("input error codes");

  // --- hypersurface point report -------------------------------------------
  write(cfg("sphere_pt.json"), R"({
    "metric": {"type": "euclidean", "dim": 3},
    "hypersurface": {
      "kind": "level_set",
      "f": {"sum": [{"product": [{"coord": 0}, {"coord": 0}]},
                    {"product": [{"coord": 1}, {"coord": 1}]},
                    {"product": [{"coord": 2}, {"coord": 2}]}]},
      "value": 4.0,
      "orientation": "anti_gradient"
    },
    "x": [0.0, 0.0, 2.0]
  })");
  REQUIRE(run("hypersurface --config " + cfg("sphere_pt.json") + " --out " + cfg("sphere_pt.out"),
              cfg("sphere_pt.log")) == 0,
          "hypersurface point run failed");
  std::string sp = slurp(cfg("sphere_pt.out"));
  REQUIRE(contains(sp, "\"H_aniso\": 1.000000000000e+00"), "sphere mean curvature should be 1");
  pass("hypersurface point report");

  // --- expectation flags drive exit 1 ---------------------------------------
  write(cfg("expect_fail.json"), R"({
    "metric": {"type": "paper", "dim": 3, "b": 0.5},
    "hypersurface": {"kind": "level_set", "f": {"coord": 2}, "value": 0.0},
    "region": {"lo": [-2.0, -2.0, -0.5], "hi": [2.0, 2.0, 0.5]},
    "t_max": 0.3,
    "samples": 8,
    "expect_isoparametric": true
  })");
  REQUIRE(run("hypersurface --config " + cfg("expect_fail.json"), cfg("expect_fail.out")) == 1,
          "failed expectation should exit 1");
  pass("expectation exit code");

  // --- numerical failure: exit 3 --------------------------------------------
  write(cfg("flat_f.json"), R"({
    "metric": {"type": "euclidean", "dim": 2},
    "f": {"const": 1.0},
    "region": {"lo": [0.0, 0.0], "hi": [1.0, 1.0]}
  })");
  REQUIRE(run("isofunc --config " + cfg("flat_f.json"), cfg("flat_f.out")) == 3,
          "constant f should exit 3");
  REQUIRE(contains(slurp(cfg("flat_f.out")), "INSUFFICIENT_SAMPLES"),
          "missing INSUFFICIENT_SAMPLES code");
  pass("numerical failure exit code");

  // --- parallel flow CSV -----------------------------------------------------
  write(cfg("flow.json"), R"({
    "metric": {"type": "euclidean", "dim": 3},
    "hypersurface": {"kind": "level_set", "f": {"coord": 2}, "value": 0.0, "orientation": "gradient"},
    "seeds": [[0.0, 0.0, 0.0], [0.5, 0.5, 0.0]],
    "t_grid": [0.0, 0.25]
  })");
  REQUIRE(run("parallel-flow --config " + cfg("flow.json") + " --out " + cfg("flow.out") +
                  " --csv " + cfg("flow.csv"),
              cfg("flow.log")) == 0,
          "parallel-flow run failed");
  {
    std::istringstream csv(slurp(cfg("flow.csv")));
    std::string line;
    std::getline(csv, line);
    REQUIRE(line == "t,seed_id,x1,x2,x3,mu_1,mu_2,H_aniso,S_normal,H_mu",
            "flow CSV header mismatch: " + line);
  }
  pass("parallel flow CSV");

  // --- the bundled verification ----------------------------------------------
  REQUIRE(run("verify-paper --out " + cfg("verify.out"), cfg("verify.log")) == 0,
          "verify-paper should exit 0");
  std::string rep = slurp(cfg("verify.out"));
  REQUIRE(contains(rep, "\"overall\": true"), "verification must pass overall");
  REQUIRE(contains(rep, "\"claims\""), "verification report missing claims");
  pass("verify-paper");

  std::cout << "[PASS] all command-line checks\n";
  return 0;
}
