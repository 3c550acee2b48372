#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "hrstat/io.hpp"
#include "hrstat/rng.hpp"

// End-to-end tests against the installed binary. The test runner exports
// HRSTAT_BIN with the path to the freshly built executable.

namespace {

std::string bin_path() {
  const char* env = std::getenv("HRSTAT_BIN");
  REQUIRE_MESSAGE(env != nullptr, "HRSTAT_BIN must point at the hrstat binary");
  return env;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  static int counter = 0;
  const std::string out_path =
      "/tmp/hrstat_cli_out_" + std::to_string(counter++) + ".txt";
  const std::string cmd =
      bin_path() + " " + args + " > " + out_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  std::remove(out_path.c_str());
  return r;
}

std::string write_gaussian_csv(const std::string& name, int n, int p,
                               std::uint64_t seed, double shift = 0.0,
                               bool with_labels = false, int label_split = 0) {
  const std::string path = "/tmp/hrstat_cli_" + name;
  hrstat::Rng rng(seed);
  std::ostringstream out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      if (j) out << ",";
      out << hrstat::format_double(shift + rng.normal());
    }
    if (with_labels) out << "," << (i < label_split ? 1 : 2);
    out << "\n";
  }
  hrstat::write_text(path, out.str());
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and version exit cleanly") {
  CHECK(run("--help").exit_code == 0);
  CHECK(run("test --help").exit_code == 0);
  RunResult v = run("--version");
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("hrstat") != std::string::npos);
}

TEST_CASE("unknown flags and missing subcommands exit 3") {
  CHECK(run("").exit_code == 3);
  CHECK(run("estimate --no-such-flag").exit_code == 3);
  CHECK(run("frobnicate").exit_code == 3);
}

TEST_CASE("estimate emits a well-formed JSON summary") {
  const std::string csv = write_gaussian_csv("est.csv", 40, 6, 11);
  RunResult r = run("estimate --input " + csv + " --bandwidth 2");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"converged\": true") != std::string::npos);
  CHECK(r.out.find("\"n\": 40") != std::string::npos);
  CHECK(r.out.find("\"p\": 6") != std::string::npos);
  CHECK(r.out.find("\"mu\"") != std::string::npos);
  CHECK(r.out.find("\"sigma\"") != std::string::npos);
}

TEST_CASE("estimate maps input problems to exit 1") {
  CHECK(run("estimate --input /tmp/does_not_exist_hrstat.csv").exit_code == 1);
  hrstat::write_text("/tmp/hrstat_cli_bad.csv", "1,2\n3,oops\n");
  RunResult r = run("estimate --input /tmp/hrstat_cli_bad.csv");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("row 2") != std::string::npos);
  std::remove("/tmp/hrstat_cli_bad.csv");
}

TEST_CASE("test subcommand reports the requested methods") {
  const std::string csv = write_gaussian_csv("tst.csv", 40, 8, 13);
  RunResult r = run("test --input " + csv + " --method max,sum --boot-m 0");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"method\": \"max\"") != std::string::npos);
  CHECK(r.out.find("\"method\": \"sum\"") != std::string::npos);
  CHECK(r.out.find("\"max2\"") == std::string::npos);
  CHECK(r.out.find("\"calibration\": \"asymptotic\"") != std::string::npos);

  RunResult boot = run("test --input " + csv +
                       " --method max --boot-m 10 --seed 5");
  CHECK(boot.exit_code == 0);
  CHECK(boot.out.find("\"calibration\": \"bootstrap\"") != std::string::npos);
  CHECK(boot.out.find("\"boot_mean\"") != std::string::npos);

  CHECK(run("test --input " + csv + " --method nope").exit_code == 3);
}

TEST_CASE("qda train and predict round-trip through a model file") {
  const std::string train =
      write_gaussian_csv("train.csv", 60, 5, 17, 0.0, true, 30);
  const std::string model = "/tmp/hrstat_cli_model.json";
  RunResult t = run("qda-train --input " + train + " --labels --out " + model);
  CHECK(t.exit_code == 0);

  RunResult p = run("qda-predict " + model + " --input " + train + " --labels");
  CHECK(p.exit_code == 0);
  CHECK(p.out.find("\"predictions\"") != std::string::npos);
  CHECK(p.out.find("\"metrics\"") != std::string::npos);
  CHECK(p.out.find("\"acc\"") != std::string::npos);

  // Without --labels the training file is rejected: the label column would
  // be read as a feature that the 5-column model cannot accept.
  RunResult mismatch = run("qda-predict " + model + " --input " + train);
  CHECK(mismatch.exit_code == 1);

  // Forgetting --labels on training data is a usage error.
  CHECK(run("qda-train --input " + train).exit_code == 3);
  std::remove(model.c_str());
}

TEST_CASE("qda-predict rejects a corrupt model file") {
  hrstat::write_text("/tmp/hrstat_cli_garbage.json", "{\"format\":\"wrong\"}");
  const std::string q = write_gaussian_csv("query.csv", 5, 5, 29);
  CHECK(run("qda-predict /tmp/hrstat_cli_garbage.json --input " + q).exit_code ==
        1);
  std::remove("/tmp/hrstat_cli_garbage.json");
}

TEST_CASE("simulate needs exactly one of preset or config") {
  CHECK(run("simulate").exit_code == 3);
  CHECK(run("simulate --preset table1-modelI-normal-p120 --config /tmp/x.cfg")
            .exit_code == 3);
  CHECK(run("simulate --preset table9-modelI-normal-p120").exit_code == 3);
  CHECK(run("simulate --config /tmp/does_not_exist_hrstat.cfg").exit_code == 1);
}

TEST_CASE("simulate runs a small config and honors --out") {
  hrstat::write_text("/tmp/hrstat_cli_sim.cfg",
                     "# smoke experiment\n"
                     "experiment = size\n"
                     "model = I\n"
                     "dist = normal\n"
                     "p = 10\n"
                     "n = 30\n"
                     "reps = 100\n"
                     "calibration = asymptotic\n"
                     "methods = max,sum\n");
  const std::string out = "/tmp/hrstat_cli_sim_out.csv";
  RunResult r = run("simulate --config /tmp/hrstat_cli_sim.cfg --out " + out);
  CHECK(r.exit_code == 0);
  const std::string csv = hrstat::read_text(out);
  CHECK(csv.find("# experiment = size") != std::string::npos);
  CHECK(csv.find("model,dist,n,p,method,rate,mc_se,n_reps,n_failed") !=
        std::string::npos);
  CHECK(csv.find("I,normal,30,10,max,") != std::string::npos);
  CHECK(csv.find("# threads") == std::string::npos);
  std::remove("/tmp/hrstat_cli_sim.cfg");
  std::remove(out.c_str());
}

TEST_CASE("simulate rejects unknown config keys with exit 3") {
  hrstat::write_text("/tmp/hrstat_cli_simbad.cfg",
                     "experiment = size\nmodel = I\ndist = normal\n"
                     "p = 10\nn = 30\nreps = 100\ntypo_key = 1\n");
  RunResult r = run("simulate --config /tmp/hrstat_cli_simbad.cfg");
  CHECK(r.exit_code == 3);
  CHECK(r.out.find("typo_key") != std::string::npos);
  std::remove("/tmp/hrstat_cli_simbad.cfg");
}

TEST_CASE("simulate output is byte-identical across thread counts") {
  hrstat::write_text("/tmp/hrstat_cli_simt.cfg",
                     "experiment = size\nmodel = III\ndist = t3\n"
                     "p = 10\nn = 30\nreps = 100\n"
                     "calibration = asymptotic\nmethods = max,max2\n");
  const std::string out1 = "/tmp/hrstat_cli_t1.csv";
  const std::string out8 = "/tmp/hrstat_cli_t8.csv";
  CHECK(run("simulate --config /tmp/hrstat_cli_simt.cfg --threads 1 --out " +
            out1).exit_code == 0);
  CHECK(run("simulate --config /tmp/hrstat_cli_simt.cfg --threads 8 --out " +
            out8).exit_code == 0);
  CHECK(hrstat::read_text(out1) == hrstat::read_text(out8));
  std::remove("/tmp/hrstat_cli_simt.cfg");
  std::remove(out1.c_str());
  std::remove(out8.c_str());
}

TEST_CASE("command line overrides beat config file values") {
  hrstat::write_text("/tmp/hrstat_cli_simo.cfg",
                     "experiment = size\nmodel = I\ndist = normal\n"
                     "p = 10\nn = 30\nreps = 100\n"
                     "calibration = asymptotic\nmethods = max\nseed = 1\n");
  RunResult a = run("simulate --config /tmp/hrstat_cli_simo.cfg --seed 42");
  CHECK(a.exit_code == 0);
  CHECK(a.out.find("# seed = 42") != std::string::npos);
  std::remove("/tmp/hrstat_cli_simo.cfg");
}

TEST_CASE("simulate json format carries the same cells") {
  hrstat::write_text("/tmp/hrstat_cli_simj.cfg",
                     "experiment = size\nmodel = I\ndist = normal\n"
                     "p = 10\nn = 30\nreps = 100\n"
                     "calibration = asymptotic\nmethods = sum\n");
  RunResult r = run("simulate --config /tmp/hrstat_cli_simj.cfg --format json");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"cells\"") != std::string::npos);
  CHECK(r.out.find("\"method\": \"sum\"") != std::string::npos);
  CHECK(run("simulate --config /tmp/hrstat_cli_simj.cfg --format yaml")
            .exit_code == 3);
  std::remove("/tmp/hrstat_cli_simj.cfg");
}

}  // TEST_SUITE
