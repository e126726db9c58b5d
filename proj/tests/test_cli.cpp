// Behavioral tests of the relgraph binary. The binary path arrives through
// the RELGRAPH_BIN environment variable (set by ctest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "relgraph/dataio.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary() {
  const char* bin = std::getenv("RELGRAPH_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "RELGRAPH_BIN is not set");
  return bin;
}

struct TempDir {
  fs::path dir;
  TempDir() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("relgraph_cli_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& capture_to = "/dev/null") {
  const std::string cmd = binary() + " " + args + " >" + capture_to + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void make_bundle(const TempDir& tmp, const std::string& prefix) {
  REQUIRE(run("gen-sbm --sizes 40,40 --p-intra 0.15 --p-inter 0.01 --seed 7 "
              "--feature-dim 6 --split-fractions 0.2,0.1,0.7 --out " +
              tmp.path(prefix)) == 0);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("lc emits one row per hop plus a manifest") {
  TempDir tmp;
  make_bundle(tmp, "g");
  REQUIRE(run("lc --graph " + tmp.path("g.edges") + " --labels " +
              tmp.path("g.labels") + " --k 4 --out " + tmp.path("lc.csv")) == 0);
  const relgraph::CsvTable t = relgraph::read_csv_report(tmp.path("lc.csv"));
  REQUIRE(t.rows.size() == 4);
  CHECK(t.header[0] == "hop");
  CHECK(t.rows[0][0] == 1.0);
  CHECK(t.rows[3][0] == 4.0);
  CHECK(t.rows[0][1] > 0.5);  // homophilic instance

  const std::string manifest = slurp(tmp.path("lc.csv.manifest.json"));
  CHECK(manifest.find("\"subcommand\": \"lc\"") != std::string::npos);
  CHECK(manifest.find("duration_seconds") != std::string::npos);
}

TEST_CASE("identical command and seed give byte-identical outputs") {
  TempDir tmp;
  const std::string common =
      "gen-sbm --sizes 30,30 --p-intra 0.2 --p-inter 0.02 --seed 11 "
      "--feature-dim 4 --out ";
  REQUIRE(run(common + tmp.path("a")) == 0);
  REQUIRE(run(common + tmp.path("b")) == 0);
  CHECK(slurp(tmp.path("a.edges")) == slurp(tmp.path("b.edges")));
  CHECK(slurp(tmp.path("a.labels")) == slurp(tmp.path("b.labels")));
  CHECK(slurp(tmp.path("a.features")) == slurp(tmp.path("b.features")));

  make_bundle(tmp, "g");
  const std::string lc_cmd = "lc --graph " + tmp.path("g.edges") + " --labels " +
                             tmp.path("g.labels") + " --k 3 --out ";
  REQUIRE(run(lc_cmd + tmp.path("one.csv")) == 0);
  REQUIRE(run(lc_cmd + tmp.path("two.csv")) == 0);
  CHECK(slurp(tmp.path("one.csv")) == slurp(tmp.path("two.csv")));
}

TEST_CASE("outputs are identical across thread counts") {
  TempDir tmp;
  make_bundle(tmp, "g");
  const std::string tail = "walk-sim --graph " + tmp.path("g.edges") + " --labels " +
                           tmp.path("g.labels") +
                           " --start-label 0 --max-k 4 --walks 5000 --seed 3 --out ";
  REQUIRE(run("--threads 1 " + tail + tmp.path("w1.csv")) == 0);
  REQUIRE(run("--threads 6 " + tail + tmp.path("w6.csv")) == 0);
  CHECK(slurp(tmp.path("w1.csv")) == slurp(tmp.path("w6.csv")));
}

TEST_CASE("decay on a heterophilic SBM oscillates") {
  TempDir tmp;
  REQUIRE(run("gen-sbm --sizes 60,60 --p-intra 0.01 --p-inter 0.1 --seed 13 --out " +
              tmp.path("het")) == 0);
  REQUIRE(run("decay --graph " + tmp.path("het.edges") + " --labels " +
              tmp.path("het.labels") + " --max-k 6 --out " + tmp.path("d.csv")) == 0);
  const relgraph::CsvTable t = relgraph::read_csv_report(tmp.path("d.csv"));
  REQUIRE(t.rows.size() == 7);
  // LC_prob(1) < LC_prob(2) is the oscillation signature.
  CHECK(t.rows[1][1] < t.rows[2][1]);
  CHECK(t.rows[0][1] == 1.0);
}

TEST_CASE("count-ops prints the closed-form values") {
  TempDir tmp;
  REQUIRE(run("count-ops --k 2 --hop-sizes 2,4,8 --variant pair",
              tmp.path("pair.txt")) == 0);
  CHECK(slurp(tmp.path("pair.txt")) == "28\n");
  REQUIRE(run("count-ops --k 2 --hop-sizes 2,4,8 --variant list",
              tmp.path("list.txt")) == 0);
  CHECK(slurp(tmp.path("list.txt")) == "26\n");
}

TEST_CASE("train, embed, eval and embed-sim chain together") {
  TempDir tmp;
  make_bundle(tmp, "g");
  std::ofstream cfg(tmp.path("t.cfg"));
  cfg << "epochs=25\nlr=0.01\nvariant=list\nk=2\nalpha=0.9\nembed_dim=4\n"
      << "layers=2\nactivation=prelu\ntau_base=0.5\ntau_spacing=0.1\nseed=5\n";
  cfg.close();

  REQUIRE(run("train --graph " + tmp.path("g.edges") + " --labels " +
              tmp.path("g.labels") + " --features " + tmp.path("g.features") +
              " --config " + tmp.path("t.cfg") + " --out " + tmp.path("run")) == 0);
  CHECK(fs::exists(tmp.path("run.ckpt")));
  CHECK(fs::exists(tmp.path("run.loss.csv")));
  CHECK(fs::exists(tmp.path("run.ckpt.manifest.json")));

  REQUIRE(run("embed --graph " + tmp.path("g.edges") + " --labels " +
              tmp.path("g.labels") + " --features " + tmp.path("g.features") +
              " --checkpoint " + tmp.path("run.ckpt") + " --out " +
              tmp.path("h.emb")) == 0);
  const relgraph::Matrix h = relgraph::read_embeddings(tmp.path("h.emb"));
  CHECK(h.rows == 80);
  CHECK(h.cols == 4);

  REQUIRE(run("eval --embeddings " + tmp.path("h.emb") + " --labels " +
              tmp.path("g.labels") + " --splits " + tmp.path("g.splits") +
              " --seed 2 --out " + tmp.path("eval.csv")) == 0);
  const relgraph::CsvTable ev = relgraph::read_csv_report(tmp.path("eval.csv"));
  CHECK(ev.header ==
        std::vector<std::string>{"accuracy", "nmi", "sim_at_5"});
  CHECK(ev.rows[0][0] > 0.5);

  REQUIRE(run("embed-sim --graph " + tmp.path("g.edges") + " --labels " +
              tmp.path("g.labels") + " --embeddings " + tmp.path("h.emb") +
              " --k 2 --out " + tmp.path("sim.csv") + " --svg " +
              tmp.path("sim.svg")) == 0);
  const relgraph::CsvTable sim = relgraph::read_csv_report(tmp.path("sim.csv"));
  REQUIRE(sim.rows.size() == 3);
  CHECK(slurp(tmp.path("sim.svg")).find("<svg") != std::string::npos);

  // Without splits the probe is skipped and accuracy lands as nan.
  REQUIRE(run("eval --embeddings " + tmp.path("h.emb") + " --labels " +
              tmp.path("g.labels") + " --seed 2 --out " + tmp.path("nosplit.csv")) ==
          0);
  const relgraph::CsvTable ns = relgraph::read_csv_report(tmp.path("nosplit.csv"));
  CHECK(std::isnan(ns.rows[0][0]));
  CHECK(ns.rows[0][1] >= 0.0);
}

TEST_CASE("checkpoint resume reproduces the straight run's history tail") {
  TempDir tmp;
  make_bundle(tmp, "g");
  std::ofstream cfg(tmp.path("t.cfg"));
  cfg << "epochs=10\nlr=0.01\nvariant=pair\nk=2\nalpha=0.9\nembed_dim=4\nseed=5\n"
      << "checkpoint_every=5\n";
  cfg.close();
  const std::string common = "train --graph " + tmp.path("g.edges") + " --labels " +
                             tmp.path("g.labels") + " --features " +
                             tmp.path("g.features") + " --config " + tmp.path("t.cfg");
  REQUIRE(run(common + " --out " + tmp.path("full")) == 0);
  REQUIRE(run(common + " --resume " + tmp.path("full.epoch5.ckpt") + " --out " +
              tmp.path("resumed")) == 0);

  const relgraph::CsvTable full = relgraph::read_csv_report(tmp.path("full.loss.csv"));
  const relgraph::CsvTable part =
      relgraph::read_csv_report(tmp.path("resumed.loss.csv"));
  REQUIRE(full.rows.size() == 10);
  REQUIRE(part.rows.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(part.rows[i][1] == full.rows[5 + i][1]);
  }
}

TEST_CASE("every subcommand answers --help") {
  TempDir tmp;
  for (const char* sub : {"gen-sbm", "lc", "transition", "spectrum", "decay",
                          "walk-sim", "train", "embed", "eval", "embed-sim",
                          "count-ops"}) {
    const std::string out = tmp.path("help.txt");
    REQUIRE(run(std::string(sub) + " --help", out) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("Usage") != std::string::npos);
    CHECK(text.find("--") != std::string::npos);
  }
}

TEST_CASE("failures exit nonzero with a one-line error") {
  TempDir tmp;
  const std::string out = tmp.path("err.txt");
  CHECK(run("lc --graph /nonexistent.edges --labels /nonexistent.labels --k 2 --out " +
                tmp.path("x.csv"),
            out) == 1);
  const std::string text = slurp(out);
  CHECK(text.rfind("error: ", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);

  CHECK(run("lc --grph x", out) != 0);                  // unknown flag
  CHECK(run("definitely-not-a-subcommand", out) != 0);  // unknown subcommand
}

TEST_CASE("gen-sbm split files load back disjoint and complete") {
  TempDir tmp;
  make_bundle(tmp, "g");
  const relgraph::Splits s = relgraph::read_splits(tmp.path("g.splits"), 80);
  CHECK(s.train.size() == 16);
  CHECK(s.valid.size() == 8);
  CHECK(s.test.size() == 56);
}

}  // TEST_SUITE
