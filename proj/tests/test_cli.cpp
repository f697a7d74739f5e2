// Subprocess tests for the boostlab CLI. Run as:
//   test_cli <path-to-boostlab-binary> <path-to-fixture-dir>
// Exercises the exit-code contract (0 success, 1 runtime failure, 2 usage
// error) and the end-to-end train -> model -> inspect and sweep flows.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("%s  %s\n", ok ? "PASS" : "FAIL", what.c_str());
  if (!ok) ++failures;
}

int run(const std::string& command) {
  int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: test_cli <boostlab-binary> <fixture-dir>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path fixtures = argv[2];
  const fs::path work = fs::temp_directory_path() / ("boostlab_cli_" + std::to_string(getpid()));
  fs::create_directories(work);

  const std::string train_csv = (fixtures / "tiny_train.csv").string();
  const std::string test_csv = (fixtures / "tiny_test.csv").string();
  const std::string quiet = " > /dev/null 2>&1";

  check(run(cli + quiet) == 2, "no subcommand is a usage error");
  check(run(cli + " train" + quiet) == 2, "train without --data is a usage error");
  check(run(cli + " train --data " + train_csv + " --algo nonsense" + quiet) == 2,
        "unknown algorithm is a usage error");
  check(run(cli + " adversarial --gamma 0.7" + quiet) == 2,
        "gamma outside (0, 0.5) is a usage error");
  check(run(cli + " sweep --out x.csv" + quiet) == 2,
        "sweep without plan or datasets is a usage error");
  check(run(cli + " sweep --plan /nonexistent.json" + quiet) == 2,
        "unreadable plan is a usage error");
  check(run(cli + " train --data /nonexistent.csv" + quiet) == 1,
        "missing data file is a runtime failure");
  check(run(cli + " --help" + quiet) == 0, "--help exits cleanly");

  const fs::path model = work / "model.json";
  const fs::path accuracy_out = work / "accuracy.txt";
  int code = run(cli + " train --data " + train_csv + " --test " + test_csv +
                 " --algo maj --k 3 --rounds 20 --out " + model.string() + " > " +
                 accuracy_out.string() + " 2> /dev/null");
  check(code == 0, "train maj succeeds");
  check(fs::exists(model), "train writes the model file");
  check(slurp(accuracy_out).rfind("test_accuracy ", 0) == 0,
        "train prints the test accuracy");

  check(run(cli + " inspect --model " + model.string() + " --data " + test_csv + quiet) == 0,
        "inspect reads the model back");
  check(run(cli + " inspect --model /nonexistent.json" + quiet) == 1,
        "inspect on a missing model is a runtime failure");

  const fs::path prep_out = work / "prepared.csv";
  check(run(cli + " prep --dataset generic --in " + train_csv + " --out " +
            prep_out.string() + quiet) == 0,
        "generic prep succeeds");
  check(run(cli + " train --data " + prep_out.string() + " --rounds 5" + quiet) == 0,
        "prepared output trains directly");

  // sweep determinism: identical plans, different worker counts, equal bytes
  const fs::path r1 = work / "r1.csv";
  const fs::path r2 = work / "r2.csv";
  const std::string sweep_base =
      " sweep --datasets synth:64x3 --algos adaboost,maj --k 3 --seeds 2 --rounds 5 "
      "--no-timing";
  check(run(cli + sweep_base + " --workers 1 --out " + r1.string() + quiet) == 0,
        "sweep with one worker succeeds");
  check(run(cli + sweep_base + " --workers 8 --out " + r2.string() + quiet) == 0,
        "sweep with eight workers succeeds");
  check(slurp(r1) == slurp(r2), "sweep output is worker-count invariant");
  check(!slurp(r1).empty(), "sweep results are non-empty");
  check(fs::exists(work / "r1.csv.summary.csv"), "sweep writes the summary CSV");
  check(fs::exists(work / "r1.csv.plan.json"), "sweep echoes the plan");

  // rerunning from the echoed plan reproduces the results byte for byte
  const fs::path replay = work / "replay.csv";
  check(run(cli + " sweep --plan " + (work / "r1.csv.plan.json").string() + " --out " +
            replay.string() + quiet) == 0,
        "sweep accepts its own plan echo");
  check(slurp(replay) == slurp(r1), "plan echo replay reproduces the results");

  const fs::path wide_out = work / "wide.csv";
  check(run(cli + " sweep --datasets synth:64x3 --algos maj --k 3:29:2 --seeds 1 "
                  "--rounds 1 --no-timing --out " +
            wide_out.string() + quiet) == 0,
        "sweep runs the default-style k range");
  {
    std::istringstream lines(slurp(wide_out));
    std::string line;
    int rows = -1;  // header
    while (std::getline(lines, line)) ++rows;
    check(rows == 14, "k range 3:29:2 yields fourteen k values");
  }

  const fs::path range_out = work / "range.csv";
  check(run(cli + " sweep --datasets synth:64x3 --algos maj --k 3:7:2 --seeds 1 "
                  "--rounds 3 --no-timing --out " +
            range_out.string() + quiet) == 0,
        "sweep accepts a from:to:step k range");
  {
    std::istringstream lines(slurp(range_out));
    std::string line;
    int rows = -1;  // header
    while (std::getline(lines, line)) ++rows;
    check(rows == 3, "k range 3:7:2 yields three k values");
  }

  check(run("BOOSTLAB_DATA_DIR=" + fixtures.string() + " " + cli +
            " train --data tiny_train.csv --rounds 5" + quiet) == 0,
        "BOOSTLAB_DATA_DIR resolves relative data paths");

  const fs::path adv_out = work / "adv.csv";
  check(run(cli + " adversarial --algos adaboost --seeds 1 --rounds 10 --rows 256 "
                  "--pool 30 --out " +
            adv_out.string() + quiet) == 0,
        "adversarial benchmark runs");
  check(slurp(adv_out).find("adversarial,adaboost") != std::string::npos,
        "adversarial results mention the dataset and algorithm");

  fs::remove_all(work);
  std::printf("%s (%d failures)\n", failures == 0 ? "OK" : "FAILED", failures);
  return failures == 0 ? 0 : 1;
}
