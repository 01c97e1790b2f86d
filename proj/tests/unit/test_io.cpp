#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include "choquard/config.hpp"
#include "choquard/errors.hpp"
#include "choquard/io.hpp"

using namespace choquard;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("choquard_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("FNV-1a reference vectors") {
    CHECK(io::hex64(io::fnv1a("")) == "cbf29ce484222325");
    CHECK(io::hex64(io::fnv1a("a")) == "af63dc4c8601ec8c");
    CHECK(io::hex64(io::fnv1a("foobar")) == "85944171f73967e8");
    CHECK(io::fnv1a("bar", io::fnv1a("foo")) == io::fnv1a("foobar"));
  }

  TEST_CASE("doubles print with 17 significant digits and round-trip") {
    CHECK(io::format_double(0.0) == "0");
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
      const double x = U(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
      CHECK(std::stod(io::format_double(x)) == x);
    }
  }

  TEST_CASE("CSV layout") {
    io::CsvWriter w({"R []", "quotient []"});
    w.comment("command: test");
    w.row({1.0, 1.0 / 3.0});
    w.row_mixed({"a", "2"});
    CHECK(w.str() == "# command: test\nR [],quotient []\n1,0.33333333333333331\na,2\n");
    CHECK_THROWS_AS(w.row({1.0}), ConfigError);
  }

  TEST_CASE("npy round trip and validation") {
    const DomainPtr d = GridDomain::box({0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}, {9, 10, 11});
    const Field u = Field::sample(d, [](const Point& x) { return std::sin(x[0]) + x[1] * x[2]; });
    const std::string bytes = io::encode_npy(u);
    CHECK(bytes.substr(1, 5) == "NUMPY");
    CHECK(bytes.find("'shape': (9, 10, 11)") != std::string::npos);
    CHECK(bytes.size() % 64 == (9u * 10u * 11u * 8u) % 64);
    CHECK(io::decode_npy(bytes, d).values() == u.values());
    CHECK_THROWS_AS(io::decode_npy(bytes, GridDomain::box({0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}, {9, 10, 12})), ConfigError);
    CHECK_THROWS_AS(io::decode_npy("not a numpy file", d), ConfigError);
    std::string bad = bytes;
    bad.replace(bad.find("<f8"), 3, "<f4");
    CHECK_THROWS_AS(io::decode_npy(bad, d), ConfigError);
    std::string nan = bytes;
    const double q = std::nan("");
    nan.replace(nan.size() - 8, 8, std::string(reinterpret_cast<const char*>(&q), 8));
    CHECK_THROWS_AS(io::decode_npy(nan, d), ConfigError);
  }

  TEST_CASE("atomic writes replace whole files") {
    const fs::path dir = scratch_dir("atomic");
    const fs::path f = dir / "sub" / "out.txt";
    io::write_atomic(f, "first");
    io::write_atomic(f, "second");
    CHECK(io::read_file(f) == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "sub")) ++entries;
    CHECK(entries == 1u);
    CHECK_THROWS(io::read_file(dir / "missing"));
    fs::remove_all(dir);
  }

  TEST_CASE("config resolution fills defaults and rejects unknown keys") {
    config::json cfg = config::json::object();
    const Params p = config::resolve_params(cfg);
    CHECK(p.N == 3);
    CHECK(cfg["params"]["mu"] == 1.0);
    const DomainPtr d = config::resolve_domain(cfg, p);
    CHECK(cfg["domain"]["kind"] == "freespace");
    CHECK(d->nodes(0) == 64);

    config::json bad = {{"params", {{"N", 3}, {"nu", 1.0}}}};
    CHECK_THROWS_AS(config::resolve_params(bad), ConfigError);
    CHECK_THROWS_AS(config::check_top_level({{"whatever", 1}}), ConfigError);
    CHECK_NOTHROW(config::check_top_level({{"params", config::json::object()}, {"globalSeed", 3}}));
    config::json wrongType = {{"params", {{"N", "three"}}}};
    CHECK_THROWS_AS(config::resolve_params(wrongType), ConfigError);
    config::json kind = {{"domain", {{"kind", "torus"}}}};
    CHECK_THROWS_AS(config::resolve_domain(kind, p), ConfigError);
  }

  TEST_CASE("dotted overrides") {
    config::json cfg = {{"params", {{"N", 3}}}};
    config::set_path(cfg, "params.mu", 2.0);
    config::set_path(cfg, "domain.L", 12.0);
    CHECK(cfg["params"]["N"] == 3);
    CHECK(cfg["params"]["mu"] == 2.0);
    CHECK(cfg["domain"]["L"] == 12.0);
    CHECK_THROWS_AS(config::set_path(cfg, "params.N.x", 1), ConfigError);
    CHECK_THROWS_AS(config::set_path(cfg, "", 1), ConfigError);
  }

  TEST_CASE("field sections") {
    const Params p = Params::make(3, 1.0);
    const DomainPtr d = GridDomain::free_space(3, 4.0, 17);
    std::string bytes;
    config::json cfg = {{"field", {{"bubble", {{"center", {0.0, 0.0, 0.0}}, {"scale", 1.0}, {"amplitude", "solution"}}}}}};
    const Field u = config::resolve_field(cfg, "field", d, p, bytes);
    CHECK(u.max() == doctest::Approx(solution_amplitude(p)));
    CHECK(bytes.empty());

    const fs::path dir = scratch_dir("field");
    io::write_atomic(dir / "u.npy", io::encode_npy(u));
    config::json fromFile = {{"field", {{"file", (dir / "u.npy").string()}}}};
    CHECK(config::resolve_field(fromFile, "field", d, p, bytes).values() == u.values());
    CHECK(bytes == io::encode_npy(u));

    config::json two = {{"field", {{"file", "x.npy"}, {"bubble", config::json::object()}}}};
    CHECK_THROWS_AS(config::resolve_field(two, "field", d, p, bytes), ConfigError);
    config::json none = config::json::object();
    CHECK_THROWS_AS(config::resolve_field(none, "field", d, p, bytes), ConfigError);
    fs::remove_all(dir);
  }

  TEST_CASE("energy curve settings") {
    const Params p = Params::make(3, 1.0);
    config::json cfg = config::json::object();
    const config::EnergyCurveSettings s = config::resolve_energy_curve(cfg, p);
    CHECK(s.R == 8.0);
    CHECK(s.h == 0.5);
    CHECK(s.sweep.nSigma == 12);
    config::json bad = {{"energyCurve", {{"R", 8.0}, {"h", 0.3}}}};
    CHECK_THROWS_AS(config::resolve_energy_curve(bad, p), ConfigError);
  }
}
