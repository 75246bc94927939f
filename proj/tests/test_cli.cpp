// End-to-end checks of the command-line binary: golden exit codes, artifact
// determinism, and the verify pass/fail surface.  The binary path comes in via
// the HEBBDUAL_CLI_PATH compile definition.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <doctest.h>

#include "hebbdual/io.hpp"

namespace fs = std::filesystem;
using namespace hebbdual;

namespace {

struct CmdResult {
  int code = -1;
  std::string out;  // stdout and stderr combined
};

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hebbdual_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CmdResult run_cli(const fs::path& dir, const std::string& args) {
  const fs::path log = dir / "cmd.log";
  const std::string cmd =
      std::string(HEBBDUAL_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CmdResult r;
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  r.out = read_file(log);
  return r;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("cli: gen writes a reproducible dataset") {
  const fs::path dir = fresh_dir("gen");
  const std::string flags = "gen --kind regression --n 5 --t 50 --noise 0.1 --seed 42";
  auto r1 = run_cli(dir, flags + " -o " + (dir / "d1.json").string());
  auto r2 = run_cli(dir, flags + " -o " + (dir / "d2.json").string());
  CHECK(r1.code == 0);
  CHECK(r2.code == 0);
  CHECK(contains(r1.out, "regression"));
  CHECK(read_file(dir / "d1.json") == read_file(dir / "d2.json"));

  const Dataset ds = dataset_from_json(read_file(dir / "d1.json"));
  CHECK(ds.meta.kind == "regression");
  CHECK(ds.n() == 5);
  CHECK(ds.t() == 50);
  CHECK(ds.meta.seed == 42);
  REQUIRE(ds.y.has_value());
  CHECK(ds.y->size() == 50);
}

TEST_CASE("cli: gen flag validation exits 2") {
  const fs::path dir = fresh_dir("gen_bad");
  CHECK(run_cli(dir, "gen --kind spiked --m 3 --n 2 -o " + (dir / "x.json").string()).code == 2);
  CHECK(run_cli(dir, "gen --n 4 -o " + (dir / "x.json").string()).code == 2);  // no kind
  CHECK(run_cli(dir, "gen --kind nosuch --n 4 -o " + (dir / "x.json").string()).code == 2);
  CHECK(run_cli(dir, "nosuchcommand").code == 2);
}

TEST_CASE("cli: unwritable output and missing inputs exit 1") {
  const fs::path dir = fresh_dir("io_err");
  CHECK(run_cli(dir, "gen --kind regression --n 3 -o /no_such_dir_zz/d.json").code == 1);
  CHECK(run_cli(dir, "train --model ridge --data " + (dir / "absent.json").string() +
                         " -o " + (dir / "r.json").string())
            .code == 1);
  auto v = run_cli(dir, "verify --data " + (dir / "absent.json").string() +
                            " --report " + (dir / "also_absent.json").string());
  CHECK(v.code == 1);
  CHECK(contains(v.out, "absent.json"));
}

TEST_CASE("cli: zero-epoch train writes a snapshot-only report") {
  const fs::path dir = fresh_dir("train0");
  run_cli(dir, "gen --kind regression --n 4 --t 20 --noise 0.1 --seed 5 -o " +
                   (dir / "d.json").string());
  auto r = run_cli(dir, "train --model ridge --data " + (dir / "d.json").string() +
                            " -o " + (dir / "r.json").string() + " --epochs 0");
  CHECK(r.code == 0);
  const RunReport rep = report_from_json(read_file(dir / "r.json"));
  REQUIRE(rep.epochs.size() == 1);
  CHECK(rep.epochs[0].epoch == 0);
  CHECK(rep.epochs[0].primal_objective.has_value());
  CHECK(rep.epochs[0].train_error.has_value());
  CHECK_FALSE(rep.epochs[0].update_density.has_value());
  REQUIRE(rep.final_w.has_value());
  CHECK(rep.final_w->size() == 4);
  CHECK_FALSE(rep.dual_snapshot.has_value());
  // csv sibling exists with just the header and the snapshot row
  const std::string csv = read_file(dir / "r.csv");
  CHECK(contains(csv, "epoch,primal_objective"));
}

TEST_CASE("cli: model/dataset mismatches exit 2") {
  const fs::path dir = fresh_dir("mismatch");
  run_cli(dir, "gen --kind regression --n 4 --t 20 --noise 0.1 --seed 5 -o " +
                   (dir / "reg.json").string());
  run_cli(dir, "gen --kind spiked --n 6 --t 30 --m 2 --gap 4 --seed 5 -o " +
                   (dir / "sp.json").string());
  // real-valued labels are not acceptable margins for a classifier
  CHECK(run_cli(dir, "train --model svm --data " + (dir / "reg.json").string() +
                         " -o " + (dir / "r.json").string())
            .code == 2);
  // unlabeled data cannot train a supervised model
  CHECK(run_cli(dir, "train --model logistic --data " + (dir / "sp.json").string() +
                         " -o " + (dir / "r.json").string())
            .code == 2);
  // more output channels than inputs
  CHECK(run_cli(dir, "train --model sm --data " + (dir / "sp.json").string() +
                         " -o " + (dir / "r.json").string() + " --m 9")
            .code == 2);
}

TEST_CASE("cli: verify passes a converged ridge run and fails a tampered one") {
  const fs::path dir = fresh_dir("verify");
  run_cli(dir, "gen --kind regression --n 5 --t 50 --noise 0.1 --seed 42 -o " +
                   (dir / "d.json").string());
  auto tr = run_cli(dir, "train --model ridge --data " + (dir / "d.json").string() +
                             " -o " + (dir / "r.json").string() +
                             " --epochs 300 --eta 0.05 --lambda 0.1"
                             " --schedule inverse-time --decay 1.0");
  CHECK(tr.code == 0);
  auto ok = run_cli(dir, "verify --data " + (dir / "d.json").string() +
                             " --report " + (dir / "r.json").string());
  CHECK(ok.code == 0);
  CHECK(contains(ok.out, "PASS weight_distance"));
  CHECK(contains(ok.out, "PASS oracle_duality_gap"));
  CHECK(contains(ok.out, "PASS dual_stationarity"));
  CHECK(contains(ok.out, "PASS span_residual"));
  CHECK(contains(ok.out, "0 failed"));

  RunReport rep = report_from_json(read_file(dir / "r.json"));
  std::fill(rep.final_w->begin(), rep.final_w->end(), 0.0);
  write_file_atomic(dir / "tampered.json", report_to_json(rep));
  auto bad = run_cli(dir, "verify --data " + (dir / "d.json").string() +
                              " --report " + (dir / "tampered.json").string());
  CHECK(bad.code == 1);
  CHECK(contains(bad.out, "FAIL weight_distance value=1"));
}

TEST_CASE("cli: verify solves the batch dual for classifier runs") {
  const fs::path dir = fresh_dir("verify_cls");
  run_cli(dir, "gen --kind classification --n 3 --t 30 --margin 0.4 --seed 19 -o " +
                   (dir / "d.json").string());
  for (const std::string model : {"svm", "logistic"}) {
    run_cli(dir, "train --model " + model + " --data " + (dir / "d.json").string() +
                     " -o " + (dir / "r.json").string() +
                     " --epochs 5 --eta 0.3 --lambda 0.05");
    auto v = run_cli(dir, "verify --data " + (dir / "d.json").string() +
                              " --report " + (dir / "r.json").string());
    CHECK(v.code == 0);
    CHECK(contains(v.out, "PASS batch_kkt"));
    CHECK(contains(v.out, "PASS fixed_point_identity"));
    CHECK(contains(v.out, "PASS span_residual"));
  }
}

TEST_CASE("cli: verify audits expgrad positivity and error") {
  const fs::path dir = fresh_dir("verify_eg");
  run_cli(dir, "gen --kind regression --n 4 --t 40 --noise 0 --positive-w --seed 11 -o " +
                   (dir / "d.json").string());
  run_cli(dir, "train --model expgrad --data " + (dir / "d.json").string() +
                   " -o " + (dir / "r.json").string() + " --epochs 100 --eta 0.1");
  auto v = run_cli(dir, "verify --data " + (dir / "d.json").string() +
                            " --report " + (dir / "r.json").string());
  CHECK(v.code == 0);
  CHECK(contains(v.out, "PASS positivity"));
  CHECK(contains(v.out, "PASS final_mse"));
}

TEST_CASE("cli: verify checks a similarity-matching run against the principal subspace") {
  const fs::path dir = fresh_dir("verify_sm");
  run_cli(dir, "gen --kind spiked --n 8 --t 400 --m 2 --gap 6 --seed 9 -o " +
                   (dir / "d.json").string());
  run_cli(dir, "train --model sm --data " + (dir / "d.json").string() + " -o " +
                   (dir / "r.json").string() +
                   " --epochs 40 --eta 0.02 --schedule inverse-time --decay 1.0 --m 2");
  auto v = run_cli(dir, "verify --data " + (dir / "d.json").string() +
                            " --report " + (dir / "r.json").string());
  CHECK(v.code == 0);
  CHECK(contains(v.out, "PASS subspace_error"));
}

TEST_CASE("cli: report merges runs in model/seed order") {
  const fs::path dir = fresh_dir("merge");
  run_cli(dir, "gen --kind regression --n 4 --t 30 --noise 0.1 --positive-w --seed 3 -o " +
                   (dir / "d.json").string());
  run_cli(dir, "train --model ridge --data " + (dir / "d.json").string() + " -o " +
                   (dir / "ridge.json").string() + " --epochs 20 --lambda 0.1");
  run_cli(dir, "train --model expgrad --data " + (dir / "d.json").string() + " -o " +
                   (dir / "eg.json").string() + " --epochs 20 --eta 0.05");
  auto m = run_cli(dir, "report " + (dir / "ridge.json").string() + " " +
                            (dir / "eg.json").string() + " -o " +
                            (dir / "summary.csv").string());
  CHECK(m.code == 0);
  const std::string csv = read_file(dir / "summary.csv");
  CHECK(contains(csv, "model,seed,epochs"));
  // rows come back sorted by model name regardless of argument order
  CHECK(csv.find("expgrad,") < csv.find("ridge,"));

  auto mj = run_cli(dir, "report " + (dir / "ridge.json").string() + " " +
                             (dir / "eg.json").string() + " -o " +
                             (dir / "summary.json").string() + " --format json");
  CHECK(mj.code == 0);
  CHECK(contains(read_file(dir / "summary.json"), "\"model\":\"expgrad\""));

  write_file_atomic(dir / "broken.json", "this is not json");
  auto bad = run_cli(dir, "report " + (dir / "broken.json").string() + " -o " +
                              (dir / "s2.csv").string());
  CHECK(bad.code == 1);
  CHECK(contains(bad.out, "broken.json"));
}

TEST_CASE("cli: identical invocations produce byte-identical artifacts") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  for (const fs::path& dir : {a, b}) {
    run_cli(dir, "gen --kind classification --n 3 --t 40 --margin 0.4 --seed 19 -o " +
                     (dir / "d.json").string());
    run_cli(dir, "train --model svm --data " + (dir / "d.json").string() + " -o " +
                     (dir / "r.json").string() + " --epochs 15 --eta 0.5 --lambda 0.05");
    run_cli(dir, "report " + (dir / "r.json").string() + " -o " +
                     (dir / "summary.csv").string());
  }
  CHECK(read_file(a / "d.json") == read_file(b / "d.json"));
  CHECK(read_file(a / "r.json") == read_file(b / "r.json"));
  CHECK(read_file(a / "r.csv") == read_file(b / "r.csv"));
  CHECK(read_file(a / "summary.csv") == read_file(b / "summary.csv"));
}

TEST_CASE("cli: help and version exit cleanly") {
  const fs::path dir = fresh_dir("help");
  CHECK(run_cli(dir, "--help").code == 0);
  CHECK(run_cli(dir, "gen --help").code == 0);
  auto v = run_cli(dir, "--version");
  CHECK(v.code == 0);
  CHECK(contains(v.out, "hebbdual 0.1.0"));
}
