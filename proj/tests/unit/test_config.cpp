#include <cmath>
#include <filesystem>
#include <fstream>
#include <variant>

#include "doctest.h"
#include "sqt/config.hpp"
#include "sqt/error.hpp"
#include "sqt/io.hpp"

using namespace sqt;

TEST_CASE("config parsing") {
  const auto c = Config::parse(
      "; comment\n"
      "[potential]\n"
      "family = square\n"
      "b = 6\n"
      "d = 2.0\n"
      "V0 = 2e0\n"
      "[run]\n"
      "seed = 20240917\n"
      "fit = yes\n"
      "grid = 1, 2.5 ,3\n");
  CHECK(c.has("potential.b"));
  CHECK_FALSE(c.has("b"));
  CHECK(c.get_double("potential.b") == 6.0);
  CHECK(c.get_double("potential.V0") == 2.0);
  CHECK(c.get_double("potential.d") == 2.0);
  CHECK(c.get_double("potential.missing", 1.5) == 1.5);
  CHECK(c.get_u64("run.seed", 0) == 20240917ULL);
  CHECK(c.get_bool("run.fit", false));
  CHECK(c.get_doubles("run.grid") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(c.get_string("potential.family") == "square");
  CHECK(c.get_string("run.label", "none") == "none");
  CHECK_NOTHROW(c.reject_unused());
}

TEST_CASE("unknown keys are rejected") {
  const auto c = Config::parse("[potential]\nfamily = square\nb = 6\nd = 2\nV0 = 2\ncolour = red\n");
  load_potential(c);
  try {
    c.reject_unused();
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("potential.colour") != std::string::npos);
  }
}

TEST_CASE("malformed values") {
  const auto c = Config::parse("[a]\nx = 1.5q\nn = -3\nf = maybe\nl = 1,,2\ne = \n");
  CHECK_THROWS_AS(c.get_double("a.x"), ConfigError);
  CHECK_THROWS_AS(c.get_u64("a.n", 0), ConfigError);
  CHECK_THROWS_AS(c.get_bool("a.f", false), ConfigError);
  CHECK_THROWS_AS(c.get_doubles("a.l"), ConfigError);
  CHECK_THROWS_AS(c.get_double("a.e"), ConfigError);
  CHECK_THROWS_AS(c.get_double("a.absent"), ConfigError);
  CHECK_THROWS_AS(Config::parse("x = 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("potential sections") {
  SUBCASE("square well") {
    const auto ps = load_potential(Config::parse("[potential]\nfamily = square\nb = 6\nd = 2\nV0 = 2\n"));
    REQUIRE(std::holds_alternative<SquareDoubleWell>(ps.potential));
    CHECK(std::get<SquareDoubleWell>(ps.potential).V0 == 2.0);
    CHECK(ps.units.hbar == 1.0);
  }
  SUBCASE("Rosen-Morse with default masses") {
    const auto ps =
        load_potential(Config::parse("[potential]\nfamily = rosen_morse\nA = 398\nB = 2810\nd = 0.17\nk = 2.22\n"));
    REQUIRE(std::holds_alternative<RosenMorseDouble>(ps.potential));
    CHECK(ps.units.mass == doctest::Approx(UnitSystem::spectroscopic(2.486584056).mass).epsilon(1e-9));
  }
  SUBCASE("Rosen-Morse with an explicit mass") {
    const auto ps = load_potential(
        Config::parse("[potential]\nfamily = rosen_morse\nA = 398\nB = 2810\nd = 0.17\nk = 2.22\nmass_u = 3\n"));
    CHECK(ps.units.mass == UnitSystem::spectroscopic(3.0).mass);
  }
  SUBCASE("unit errors") {
    CHECK_THROWS_AS(
        load_potential(Config::parse("[potential]\nfamily = square\nb = 6\nd = 2\nV0 = 2\nunits = spectroscopic\n")),
        ConfigError);
    CHECK_THROWS_AS(load_potential(Config::parse("[potential]\nfamily = square\nb = 6\nd = 2\nV0 = 2\nmass_u = 1\n")),
                    ConfigError);
    CHECK_THROWS_AS(load_potential(Config::parse("[potential]\nfamily = rosen_morse\nA = 398\nB = 2810\nd = 0.17\n"
                                                 "k = 2.22\nunits = dimensionless\nmass_u = 2\n")),
                    ConfigError);
    CHECK_THROWS_AS(load_potential(Config::parse("[potential]\nfamily = rosen_morse\nA = 398\nB = 2810\nd = 0.17\n"
                                                 "k = 2.22\nunits = furlongs\n")),
                    ConfigError);
    CHECK_THROWS_AS(load_potential(Config::parse("[potential]\nfamily = quartic\n")), ConfigError);
  }
  SUBCASE("invariants surface as domain errors") {
    CHECK_THROWS_AS(load_potential(Config::parse("[potential]\nfamily = square\nb = 2\nd = 2\nV0 = 2\n")),
                    DomainError);
  }
}

TEST_CASE("canonical form is order independent") {
  auto a = Config::parse("[s]\nb = 2\na = 1\n[r]\nz = 0\n");
  auto b = Config::parse("[r]\nz = 0\n[s]\na = 1\nb = 2\n");
  CHECK(a.canonical() == b.canonical());
  CHECK(a.canonical() == "r.z=0\ns.a=1\ns.b=2\n");
  a.set("s.a", "7");
  CHECK(a.get_double("s.a") == 7.0);
  CHECK(a.canonical() != b.canonical());
}

TEST_CASE("config files load from disk") {
  const auto dir = std::filesystem::temp_directory_path() / "sqt_test_config";
  std::filesystem::create_directories(dir);
  const auto path = dir / "x.cfg";
  write_atomic(path, "[potential]\nfamily = square\nb = 6\nd = 2\nV0 = 2\n");
  CHECK_FALSE(std::filesystem::exists(dir / "x.cfg.tmp"));
  const auto c = Config::load(path);
  CHECK(c.get_double("potential.d") == 2.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting and digests") {
  CHECK(fmt17(0.1) == "0.10000000000000001");
  CHECK(std::stod(fmt17(M_PI)) == M_PI);
  CHECK(fmt17(2.0) == "2");
  // FNV-1a 64 reference values.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}
