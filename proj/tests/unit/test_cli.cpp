#include "doctest.h"
#include "minkray/report.hpp"
#include "run_config.hpp"

#include <cmath>

using namespace minkray;
using minkray::cli::ConfigError;
using minkray::cli::RunConfig;

TEST_CASE("config parsing") {
    RunConfig c = RunConfig::parse("# grid\nn = 3\nNx=48  # comment\n\nNt = 32\nLx = 2\nT = 1.2\nt1 = 0.3\nR0 = 0.4\n");
    CHECK(c.integer("n", 0) == 3);
    CHECK(c.num("Lx", 0) == 2.0);
    CHECK(c.str("pipeline", "model") == "model");
    GridSpec g = c.grid();
    CHECK(g.n == 3);
    CHECK(g.Nx == 48);
    CHECK(g.t1 == 0.3);
    CHECK(c.chart(g).size() == 8u * 16u);
    CHECK(c.seed() == 1u);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(RunConfig::parse("Nx = 64\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("Nx = 64\nNx = 32\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("Nx 64\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("Nx =\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("Nx = 6x4\n").integer("Nx", 0), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("quick = maybe\n").flag("quick", false), ConfigError);
    // grid invariants are checked before any computation
    CHECK_THROWS_AS(RunConfig::parse("Nx = 63\n").grid(), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("Nt = 33\n").grid(), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("t1 = 5\n").grid(), ConfigError);
    RunConfig two = RunConfig::parse("n = 2\nscheme = gl\n");
    CHECK_THROWS_AS(two.chart(two.grid()), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("waveA3 = 1\n").wave(2), ConfigError);
    CHECK_THROWS_AS(RunConfig::load("/nonexistent/minkray.cfg"), ConfigError);
    RunConfig c;
    CHECK_THROWS_AS(c.set("nope", "1"), ConfigError);
}

TEST_CASE("wave coefficients from config") {
    RunConfig c = RunConfig::parse("waveA0 = 0.2\nwaveB = 0.1\nwaveBim = -0.3\n");
    WaveCoefficients w = c.wave(2);
    REQUIRE(w.A.size() == 3u);
    CHECK(w.A[0] == 0.2);
    CHECK(w.A[1] == 0.0);
    CHECK(w.B == cplx(0.1, -0.3));
}

TEST_CASE("report rendering") {
    Report r;
    r.set("a", 1.5);
    r.set("b", "text");
    r.set("c", true);
    r.set("d", 7);
    CHECK(r.check_le("e", 0.5, 1.0));
    CHECK_FALSE(r.check_ge("f", 0.5, 1.0));
    CHECK_FALSE(r.check_le("g", std::nan(""), 1.0));
    CHECK(r.failures() == 2);
    CHECK_FALSE(r.passed());
    CHECK(*r.find("a") == "1.500000000e+00");
    CHECK(*r.find("c") == "true");
    CHECK(*r.find("e.pass") == "true");
    CHECK(r.find("missing") == nullptr);
    r.set("a", 2.0);
    CHECK(*r.find("a") == "2.000000000e+00");
    CHECK(r.str().rfind("a = 2.000000000e+00\nb = text\n", 0) == 0);

    Report outer;
    outer.merge("inner", r);
    CHECK(*outer.find("inner.b") == "text");
    CHECK(outer.failures() == 2);
    CHECK(Report::format(1.0 / 0.0) == "inf");
}
