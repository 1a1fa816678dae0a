#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "config.hpp"

namespace fs = std::filesystem;
using adapt::cli::Json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;

  fs::path run_dir() const {
    const auto at = out.rfind("run_dir ");
    REQUIRE(at != std::string::npos);
    auto end = out.find('\n', at);
    return out.substr(at + 8, end - at - 8);
  }
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = adapt::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// A fresh scratch directory per test case.
struct Scratch {
  fs::path root;
  explicit Scratch(const std::string& name) : root(fs::temp_directory_path() / ("adapt_cli_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
  std::string operator/(const std::string& leaf) const { return (root / leaf).string(); }
};

Json resolved(const Result& r) { return Json::parse(slurp(r.run_dir() / "config.json")); }

const std::vector<std::string> kTinyModel{"--set", "model.layer_dims=6,6", "--set", "model.adaptor_hidden=6",
                                          "--set", "model.rwr.max_nodes=8"};

std::vector<std::string> operator+(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and usage errors") {
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"synth", "--help"}).code == 0);
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"synth", "--no-such-flag"}).code == 2);
  }

  TEST_CASE("missing inputs exit 2 and name the path") {
    Scratch s("missing");
    const auto r = cli({"prepare", "--input", s / "absent.tsv", "--run-dir", s / "runs"});
    CHECK(r.code == 2);
    CHECK(r.err.find(s / "absent.tsv") != std::string::npos);
    const auto p = cli({"pretrain", "--corpus", s / "nowhere", "--run-dir", s / "runs"});
    CHECK(p.code == 2);
    CHECK(p.err.find(s / "nowhere") != std::string::npos);
    const auto c = cli({"synth", "--config", s / "cfg.json", "--run-dir", s / "runs"});
    CHECK(c.code == 2);
    CHECK(c.err.find(s / "cfg.json") != std::string::npos);
  }

  TEST_CASE("unknown strategy is a usage error") {
    Scratch s("strategy");
    std::ofstream(s / "x.txt") << "x";
    const auto r = cli({"finetune", "--checkpoint", s / "x.txt", "--manifest", s / "x.txt", "--strategy", "sideways",
                        "--run-dir", s / "runs"});
    CHECK(r.code == 2);
    CHECK(r.err.find("sideways") != std::string::npos);
    const auto viaset = cli({"synth", "--set", "finetune.strategy=sideways", "--run-dir", s / "runs"});
    CHECK(viaset.code == 0);  // synth never reads the strategy
  }

  TEST_CASE("flags override the config file which overrides defaults") {
    Scratch s("precedence");
    std::ofstream(s / "cfg.json") << R"({"synth": {"users": 30, "items": 25, "density": 0.1}})";
    const auto r = cli({"synth", "--config", s / "cfg.json", "--users", "40", "--run-dir", s / "runs"});
    REQUIRE(r.code == 0);
    const auto cfg = resolved(r);
    CHECK(cfg["synth"]["users"] == 40);
    CHECK(cfg["synth"]["items"] == 25);
    CHECK(cfg["synth"]["seed"] == adapt::cli::default_config()["synth"]["seed"]);
    CHECK(r.out.find("users 40\nitems 25\n") != std::string::npos);
  }

  TEST_CASE("environment overrides sit between the config file and flags") {
    Scratch s("env");
    std::ofstream(s / "cfg.json") << R"({"run": {"dir": "elsewhere", "threads": 3}})";
    setenv("ADAPT_RUN_DIR", (s / "env_runs").c_str(), 1);
    setenv("ADAPT_THREADS", "2", 1);
    const auto a = cli({"synth", "--config", s / "cfg.json", "--users", "10", "--items", "10", "--density", "0.3"});
    const auto b = cli({"synth", "--config", s / "cfg.json", "--users", "10", "--items", "10", "--density", "0.3", "--threads", "1",
                        "--run-dir", s / "flag_runs"});
    unsetenv("ADAPT_RUN_DIR");
    unsetenv("ADAPT_THREADS");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.run_dir().parent_path() == fs::path(s / "env_runs"));
    CHECK(resolved(a)["run"]["threads"] == 2);
    CHECK(b.run_dir().parent_path() == fs::path(s / "flag_runs"));
    CHECK(resolved(b)["run"]["threads"] == 1);
  }

  TEST_CASE("bad config files are usage errors") {
    Scratch s("badcfg");
    std::ofstream(s / "typo.json") << R"({"synth": {"userz": 3}})";
    std::ofstream(s / "broken.json") << R"({"synth": )";
    std::ofstream(s / "type.json") << R"({"synth": {"users": "many"}})";
    for (auto f : {"typo.json", "broken.json", "type.json"}) {
      const auto r = cli({"synth", "--config", s / f, "--run-dir", s / "runs"});
      CHECK(r.code == 2);
    }
    CHECK(cli({"synth", "--set", "synth.users", "--run-dir", s / "runs"}).code == 2);
    CHECK(cli({"synth", "--set", "synth.users=-4", "--run-dir", s / "runs"}).code == 2);
  }

  TEST_CASE("run directories are timestamped, unique and hold the resolved config") {
    Scratch s("rundir");
    const auto a = cli({"synth", "--users", "10", "--items", "10", "--density", "0.3", "--run-dir", s / "runs"});
    const auto b = cli({"synth", "--users", "10", "--items", "10", "--density", "0.3", "--run-dir", s / "runs"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.run_dir() != b.run_dir());
    CHECK(a.run_dir().filename().string().rfind("synth-", 0) == 0);
    CHECK(fs::exists(a.run_dir() / "config.json"));
    CHECK(fs::exists(a.run_dir() / "log.txt"));
    CHECK(slurp(a.run_dir() / "graph.tsv") == slurp(b.run_dir() / "graph.tsv"));
  }

  TEST_CASE("props on one graph and on a corpus") {
    Scratch s("props");
    for (int k = 0; k < 3; ++k)
      REQUIRE(cli({"synth", "--users", "20", "--items", "15", "--density", "0.15", "--seed", std::to_string(k),
                   "--out", s / ("corpus/g" + std::to_string(k) + ".tsv"), "--run-dir", s / "runs"})
                  .code == 0);
    const auto one = cli({"props", "--input", s / "corpus/g0.tsv", "--run-dir", s / "runs"});
    REQUIRE(one.code == 0);
    CHECK(one.out.find("node_count 35\n") != std::string::npos);
    const auto all = cli({"props", "--corpus", s / "corpus", "--out", s / "norm.txt", "--run-dir", s / "runs"});
    REQUIRE(all.code == 0);
    CHECK(slurp(s / "norm.txt").find("mean.node_count 35\nstd.node_count 0\n") != std::string::npos);
    CHECK(cli({"props", "--run-dir", s / "runs"}).code == 2);
  }

  TEST_CASE("full pipeline reruns reproduce every metric bit-exactly") {
    Scratch s("pipeline");
    auto pipeline = [&](const std::string& tag) {
      const std::string d = s / tag;
      const std::vector<std::string> runs{"--run-dir", d + "/runs"};
      for (int k = 0; k < 2; ++k)
        REQUIRE(cli(std::vector<std::string>{"synth", "--users", "40", "--items", "70", "--density", "0.08", "--seed",
                                             std::to_string(10 + k), "--out",
                                             d + "/corpus/g" + std::to_string(k) + ".tsv"} +
                    runs)
                    .code == 0);
      REQUIRE(cli(std::vector<std::string>{"synth", "--users", "40", "--items", "70", "--density", "0.08", "--seed",
                                           "3", "--out", d + "/target.tsv"} +
                  runs)
                  .code == 0);
      const auto prep = cli(std::vector<std::string>{"prepare", "--input", d + "/target.tsv", "--val-frac", "0.1",
                                                     "--test-frac", "0.1", "--keep-frac", "0.8", "--out",
                                                     d + "/m.tsv"} +
                            runs);
      REQUIRE(prep.code == 0);
      const auto pre = cli(std::vector<std::string>{"pretrain", "--corpus", d + "/corpus", "--epochs", "2",
                                                    "--batch-size", "8", "--samples-per-epoch", "32", "--out",
                                                    d + "/ck.txt"} +
                           kTinyModel + runs);
      REQUIRE(pre.code == 0);
      const auto ft = cli(std::vector<std::string>{"finetune", "--checkpoint", d + "/ck.txt", "--manifest",
                                                   d + "/m.tsv", "--strategy", "direct", "--epochs", "2",
                                                   "--batch-size", "8", "--out", d + "/model.txt"} +
                          runs);
      REQUIRE(ft.code == 0);
      const auto ev = cli(std::vector<std::string>{"eval", "--model", d + "/model.txt", "--manifest", d + "/m.tsv",
                                                   "--seeds", "1,2", "--out", d + "/summary.txt"} +
                          runs);
      REQUIRE(ev.code == 0);
      return std::vector<std::string>{slurp(d + "/m.tsv"), slurp(d + "/ck.txt"),
                                      slurp(pre.run_dir() / "pretrain_log.tsv"), slurp(d + "/model.txt"),
                                      slurp(ft.run_dir() / "metrics.txt"), slurp(d + "/summary.txt")};
    };
    const auto a = pipeline("a");
    const auto b = pipeline("b");
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
    CHECK(a.back().find("variant=model split=test seed=1 hr=") != std::string::npos);
  }

  TEST_CASE("eval baselines need no checkpoint") {
    Scratch s("baselines");
    REQUIRE(cli({"synth", "--users", "30", "--items", "80", "--density", "0.1", "--out", s / "g.tsv", "--run-dir",
                 s / "runs"})
                .code == 0);
    REQUIRE(cli({"prepare", "--input", s / "g.tsv", "--val-frac", "0.1", "--test-frac", "0.2", "--out", s / "m.tsv",
                 "--run-dir", s / "runs"})
                .code == 0);
    const auto r = cli({"eval", "--scorer", "random", "--manifest", s / "m.tsv", "--run-dir", s / "runs"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("hr@5 ", 0) == 0);
    const auto ri = cli(std::vector<std::string>{"eval", "--scorer", "random-init", "--manifest", s / "m.tsv", "--run-dir", s / "runs"} +
                        kTinyModel);
    CHECK(ri.code == 0);
    CHECK(cli({"eval", "--manifest", s / "m.tsv", "--run-dir", s / "runs"}).code == 2);
  }
}
