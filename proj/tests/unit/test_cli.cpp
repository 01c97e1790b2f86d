#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "choquard/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  static const fs::path p = [] {
    fs::path d = fs::temp_directory_path() / ("choquard_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

Run run(const std::string& args, const std::string& env = "") {
  const fs::path o = work_dir() / "stdout.txt";
  const fs::path e = work_dir() / "stderr.txt";
  const std::string cmd = "env -u CHOQUARD_THREADS " + env + " " + CHOQUARD_CLI + " " + args + " >" + o.string() +
                          " 2>" + e.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = choquard::io::read_file(o);
  r.err = choquard::io::read_file(e);
  return r;
}

std::string out_dir(const std::string& name) { return (work_dir() / name).string(); }

void write_config(const std::string& name, const json& cfg) {
  choquard::io::write_atomic(work_dir() / name, cfg.dump(2));
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("constants") {
    const Run r = run("constants --N 4 --mu 2 --out " + out_dir("c1"));
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["command"] == "constants");
    CHECK(j["result"]["cNmu"].get<double>() == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-14));
    CHECK(j["config"]["params"]["N"] == 4);
    CHECK(j["inputHash"].get<std::string>().size() == 16u);
    CHECK(choquard::io::read_file(fs::path(out_dir("c1")) / "constants.json") == r.out);
  }

  TEST_CASE("parameter errors exit with 2 and a JSON message") {
    const Run r = run("constants --mu 3 --out " + out_dir("c2"));
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    const json e = json::parse(r.err);
    CHECK(e["error"]["exitCode"] == 2);
    CHECK(e["error"]["message"].get<std::string>().find("mu < N") != std::string::npos);
    CHECK(run("").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("constants --N 2").code == 2);
  }

  TEST_CASE("thread count from flag and environment") {
    CHECK(run("constants --out " + out_dir("t1"), "CHOQUARD_THREADS=1").code == 0);
    CHECK(run("constants --out " + out_dir("t2"), "CHOQUARD_THREADS=zero").code == 2);
    CHECK(run("constants --threads 0 --out " + out_dir("t3")).code == 2);
    // The flag wins over the environment.
    CHECK(run("constants --threads 1 --out " + out_dir("t4"), "CHOQUARD_THREADS=zero").code == 0);
  }

  TEST_CASE("config file and flag precedence") {
    write_config("cfg.json", {{"params", {{"N", 5}, {"mu", 1.0}}}, {"outputDir", out_dir("cfg_ignored")}});
    const Run a = run("constants --config " + (work_dir() / "cfg.json").string() + " --out " + out_dir("cfg"));
    REQUIRE(a.code == 0);
    const json j = json::parse(a.out);
    CHECK(j["config"]["params"]["N"] == 5);
    CHECK(j["config"]["outputDir"] == out_dir("cfg"));
    const Run b = run("constants --config " + (work_dir() / "cfg.json").string() + " --N 3 --out " + out_dir("cfg"));
    CHECK(json::parse(b.out)["config"]["params"]["N"] == 3);
    CHECK(json::parse(b.out)["inputHash"] != j["inputHash"]);
    const Run c = run("constants --set params.mu=2 --out " + out_dir("cfg2"));
    CHECK(json::parse(c.out)["config"]["params"]["mu"] == 2.0);

    write_config("bad.json", {{"parms", {{"N", 3}}}});
    const Run bad = run("constants --config " + (work_dir() / "bad.json").string());
    CHECK(bad.code == 2);
    CHECK(bad.err.find("parms") != std::string::npos);
    CHECK(run("constants --config " + (work_dir() / "nope.json").string()).code == 2);
    CHECK(run("constants --set params.mu").code == 2);
  }

  TEST_CASE("energy outputs are byte-identical across runs") {
    const std::string args =
        "energy --L 6 --nodes 21 --set 'field.bubble={\"center\":[0,0,0],\"scale\":1,\"amplitude\":\"solution\"}' --out ";
    const Run a = run(args + out_dir("e1"));
    const std::string first = choquard::io::read_file(fs::path(out_dir("e1")) / "energy.json");
    const Run b = run(args + out_dir("e1"));
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(choquard::io::read_file(fs::path(out_dir("e1")) / "energy.json") == first);
    const json j = json::parse(a.out);
    CHECK(j["result"]["dirichlet"].get<double>() > 0.0);
    CHECK(j["config"]["domain"]["nodes"] == 21);
    CHECK(j["config"]["riesz"]["method"] == "fourier");
  }

  TEST_CASE("field files round trip through the CLI") {
    const std::string dec = "ps-decompose --L 6 --nodes 25 --set 'field.synthesize={\"profiles\":[{\"center\":[0,0,0],\"scale\":1,\"sign\":1}]}' --out ";
    const Run a = run(dec + out_dir("d1"));
    REQUIRE(a.code == 0);
    const json j = json::parse(a.out);
    CHECK(j["result"]["k"] == 1);
    CHECK(j["fieldHashes"].contains("residual.npy"));
    const std::string csv = choquard::io::read_file(fs::path(out_dir("d1")) / "bubbles.csv");
    CHECK(csv.rfind("# command: ps-decompose", 0) == 0);
    CHECK(csv.find("scale [") != std::string::npos);

    const std::string res = (fs::path(out_dir("d1")) / "residual.npy").string();
    const Run e = run("energy --L 6 --nodes 25 --field " + res + " --out " + out_dir("d2"));
    REQUIRE(e.code == 0);
    CHECK(json::parse(e.out)["result"]["dirichlet"].get<double>() < 1e-3);
    CHECK(json::parse(e.out)["inputHash"] != json::parse(run("energy --L 6 --nodes 25 --field " +
                                                             (fs::path(out_dir("d1")) / "v0.npy").string() +
                                                             " --out " + out_dir("d3")).out)["inputHash"]);
    // Wrong grid for the stored field.
    const Run w = run("energy --L 6 --nodes 24 --field " + res + " --out " + out_dir("d4"));
    CHECK(w.code == 2);
    CHECK(run("energy --L 6 --nodes 25 --field " + (work_dir() / "missing.npy").string()).code == 2);
  }

  TEST_CASE("solver non-convergence exits with 3 after writing outputs") {
    const Run r = run("solve --domain ball --nodes 17 --max-iters 2 --out " + out_dir("s1"));
    CHECK(r.code == 3);
    CHECK(json::parse(r.err)["error"]["type"] == "numerical");
    CHECK(fs::exists(fs::path(out_dir("s1")) / "solve.json"));
    CHECK(fs::exists(fs::path(out_dir("s1")) / "trace.csv"));
    CHECK(fs::exists(fs::path(out_dir("s1")) / "manifold_field.npy"));
  }

  TEST_CASE("pohozaev and bubble-check") {
    const std::string field =
        " --L 8 --nodes 33 --set 'field.bubble={\"center\":[0,0,0],\"scale\":1,\"amplitude\":\"solution\"}' --out ";
    const Run p = run("pohozaev" + field + out_dir("p1"));
    REQUIRE(p.code == 0);
    CHECK(json::parse(p.out)["result"].contains("relative"));
    const Run b = run("bubble-check" + field + out_dir("b1"));
    REQUIRE(b.code == 0);
    CHECK(json::parse(b.out)["result"]["isBubble"] == true);
    CHECK(run("pohozaev --pivot 1,2" + field + out_dir("p2")).code == 2);
  }
}
