#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "empg_test_cli";

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  fs::create_directories(kRoot);
  const auto capture = kRoot / "capture.txt";
  const std::string cmd = std::string(EMPG_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::ostringstream os;
  os << in.rdbuf();
  r.out = os.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string config(const std::string& name) { return (fs::path(EMPG_CONFIG_DIR) / name).string(); }

}  // namespace

TEST_CASE("verify") {
  const auto ok = run("verify --probes 200 --samples 20000");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  CHECK(run("verify --probes 50 --samples 2000 --inject-fault 1e-6").code == 1);
  CHECK(run("verify --samples 0").code == 2);
  CHECK(run("no-such-command").code == 2);
}

TEST_CASE("train: strict config and resolved echo") {
  fs::remove_all(kRoot);
  CHECK(run("train --config " + config("fork3x3.cfg") + " --set nonsense.key=1 --out " + (kRoot / "x").string()).code == 2);
  CHECK(run("train --config /no/such/file.cfg --out " + (kRoot / "y").string()).code == 2);

  const auto a = kRoot / "fork_full";
  const auto r = run("train --config " + config("fork3x3.cfg") + " --set ablation=full --set train.iterations=2 --out " +
                     a.string());
  CHECK(r.code == 0);
  CHECK(r.out.find(a.string()) != std::string::npos);
  const auto echo = slurp(a / "config.echo");
  CHECK(echo.find("modulation.zeta = 0.1\n") != std::string::npos);
  CHECK(echo.find("modulation.k = 1\n") != std::string::npos);
  CHECK(echo.find("modulation.k_prime = 1\n") != std::string::npos);

  const auto b = kRoot / "fork_zeta";
  CHECK(run("train --config " + config("fork3x3.cfg") + " --set modulation.zeta=0.05 --set train.iterations=2 --out " +
            b.string())
            .code == 0);
  CHECK(slurp(b / "config.echo").find("modulation.zeta = 0.05\n") != std::string::npos);

  // Reruns into a non-empty directory fail.
  CHECK(run("train --config " + config("fork3x3.cfg") + " --set train.iterations=2 --out " + b.string()).code == 2);

  // The echo is itself a config that reproduces the run.
  const auto c = kRoot / "from_echo";
  CHECK(run("train --config " + (a / "config.echo").string() + " --out " + c.string()).code == 0);
  CHECK(slurp(c / "metrics.jsonl") == slurp(a / "metrics.jsonl"));
  fs::remove_all(kRoot);
}

TEST_CASE("ablate, analyze and export") {
  fs::remove_all(kRoot);
  const auto root = kRoot / "ablate";
  const auto r = run("ablate --config " + config("chain8.cfg") + " --seeds 3 --set train.iterations=4 --out " +
                     root.string());
  REQUIRE(r.code == 0);
  int runs = 0;
  for (const char* v : {"baseline", "scaling_only", "bonus_only", "full"}) {
    CHECK(fs::exists(root / v / "seed_3" / "metrics.jsonl"));
    ++runs;
  }
  CHECK(runs == 4);
  CHECK(fs::exists(root / "comparison.tsv"));
  CHECK(fs::exists(root / "final_window.tsv"));

  // Standalone baseline run with the same seed matches the ablation's baseline row bitwise.
  const auto solo = kRoot / "solo";
  CHECK(run("train --config " + config("chain8.cfg") + " --set ablation=baseline --set train.iterations=4 --seed 3 --out " +
            solo.string())
            .code == 0);
  CHECK(slurp(solo / "metrics.jsonl") == slurp(root / "baseline" / "seed_3" / "metrics.jsonl"));

  // All variants start from the same first batch.
  CHECK(slurp(root / "baseline" / "seed_3" / "ledger" / "iter_0.batch") ==
        slurp(root / "full" / "seed_3" / "ledger" / "iter_0.batch"));

  const auto cmp = run("analyze --runs " + (root / "baseline" / "seed_3").string() + " " +
                       (root / "full" / "seed_3").string() + " --metric success_rate");
  CHECK(cmp.code == 0);
  CHECK(cmp.out.find("iteration\tlabel\tseed\tsuccess_rate") != std::string::npos);
  const auto pct = run("analyze --percentiles " + (root / "full" / "seed_3").string());
  CHECK(pct.code == 0);
  CHECK(pct.out.find("lower\tupper\tcount\tmean_entropy_change") != std::string::npos);

  CHECK(run("export --checkpoint " + (solo / "checkpoints" / "iter_4").string()).code == 0);
  const auto led = run("export --ledger " + (solo / "ledger" / "iter_0.records").string());
  CHECK(led.code == 0);
  CHECK(led.out.find("a_final") != std::string::npos);
  CHECK(run("export").code == 2);
  fs::remove_all(kRoot);
}
