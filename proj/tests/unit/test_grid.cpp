#include "doctest.h"
#include "minkray/grid.hpp"
#include "minkray/oracles.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace minkray;

namespace {

GridSpec make(int n, int Nx, int Nt, double Lx, double T, double t1) {
    GridSpec g;
    g.n = n;
    g.Nx = Nx;
    g.Nt = Nt;
    g.Lx = Lx;
    g.T = T;
    g.t1 = t1;
    g.R0 = 1.0;
    g.validate();
    return g;
}

SpatialField gaussian(const GridSpec& g) {
    SpatialField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto x = position(g, i);
        double r2 = 0;
        for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
        f[i] = std::exp(-r2);
    }
    return f;
}

std::string tmp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("fft_friendly sizes") {
    CHECK(fft_friendly(64));
    CHECK(fft_friendly(48));
    CHECK(fft_friendly(1000));
    CHECK_FALSE(fft_friendly(33));
    CHECK_FALSE(fft_friendly(129));
    CHECK_FALSE(fft_friendly(0));
}

TEST_CASE("grid validation") {
    GridSpec g = make(2, 64, 64, 4, 2, 0.5);
    CHECK(g.dx() == doctest::Approx(0.125));
    CHECK(g.x(0) == -4.0);
    CHECK(g.t(g.Nt - 1) == doctest::Approx(2.0));
    CHECK(g.spatial_size() == 64u * 64u);

    auto bad = g;
    bad.Nx = 63;
    CHECK_THROWS_AS(bad.validate(), ContractError);
    bad = g;
    bad.Nt = 33;
    CHECK_THROWS_AS(bad.validate(), ContractError);
    bad = g;
    bad.t1 = 2.0;
    CHECK_THROWS_AS(bad.validate(), ContractError);
    bad = g;
    bad.n = 4;
    CHECK_THROWS_AS(bad.validate(), ContractError);

    CHECK_NOTHROW(g.validate_support());
    bad = g;
    bad.Lx = 2.5;
    bad.Nx = 64;
    CHECK_THROWS_AS(bad.validate_support(), ContractError);
}

TEST_CASE("t1 snaps to the nearest time sample") {
    GridSpec g = make(2, 16, 16, 4, 1.5, 0.33);
    CHECK(g.t1_index() == 3);
    CHECK(g.t1_grid() == doctest::Approx(0.3));
}

TEST_CASE("fft roundtrip and Parseval") {
    for (int n : {2, 3}) {
        GridSpec g = make(n, n == 2 ? 64 : 16, 8, 3, 1, 0.5);
        SpatialField f(g);
        std::mt19937_64 rng(7);
        std::normal_distribution<double> N;
        for (auto& v : f.v) v = {N(rng), N(rng)};
        SpatialField back = ifft_spatial(fft_spatial(f));
        double err = 0, ref = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            err += std::norm(back[i] - f[i]);
            ref += std::norm(f[i]);
        }
        CHECK(std::sqrt(err / ref) <= 1e-12);
        CHECK(std::abs(sobolev_norm(f, 0.0) - l2_norm(f)) <= 1e-10 * l2_norm(f));
    }
}

TEST_CASE("single mode spectrum") {
    GridSpec g = make(2, 32, 8, 2, 1, 0.5);
    SpatialField f(g);
    const int m = 3;
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(cplx(0, g.xi(m) * position(g, i)[0]));
    Spectrum F = fft_spatial(f);
    // slot (m, 0) carries the full mass (2 Lx)^n
    std::size_t slot = static_cast<std::size_t>(m) * g.Nx;
    if (std::abs(F[slot]) < 1.0) slot = m;
    CHECK(std::abs(F[slot]) == doctest::Approx(std::pow(2 * g.Lx, 2)).epsilon(1e-12));
    double rest = 0;
    for (std::size_t i = 0; i < F.size(); ++i)
        if (i != slot) rest = std::max(rest, std::abs(F[i]));
    CHECK(rest <= 1e-9);
}

TEST_CASE("Gaussian spectrum matches the continuous transform") {
    GridSpec g = make(2, 64, 8, 6, 1, 0.5);
    Spectrum F = fft_spatial(gaussian(g));
    double worst = 0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        double r2 = frequency_norm2(g, i);
        if (r2 > std::pow(g.nyquist() / 2, 2)) continue;
        worst = std::max(worst, std::abs(F[i] - kPi * std::exp(-r2 / 4)));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("Sobolev norms") {
    GridSpec g = make(2, 64, 8, 6, 1, 0.5);
    SpatialField f = gaussian(g);
    // H^0 and H^1 norms of exp(-|x|^2) in the plane: pi/2 and 3 pi/2
    CHECK(std::pow(sobolev_norm(f, 0), 2) == doctest::Approx(kPi / 2).epsilon(1e-8));
    CHECK(std::pow(sobolev_norm(f, 1), 2) == doctest::Approx(1.5 * kPi).epsilon(1e-8));
    double prev = 0;
    for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
        double v = sobolev_norm(f, s);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("non-finite values are rejected") {
    std::vector<cplx> v{1.0, std::nan("")};
    CHECK_THROWS_AS(check_finite(v, "test"), ContractError);
}

TEST_CASE("field files roundtrip") {
    GridSpec g = make(2, 16, 8, 2, 1, 0.5);
    ScalarField f = oracles::random_smooth_field(g, 3, 0.0, 1.0, 0.5, 0.3);
    std::string p = tmp_path("minkray_unit_field.fld");
    write_field(p, f);
    ScalarField r = read_field(p);
    CHECK(r.spec == g);
    CHECK(r.v == f.v);

    SpatialField s = f.slice_field(2);
    write_field(p, s);
    SpatialField rs = read_spatial_field(p);
    CHECK(rs.v == s.v);
    CHECK_THROWS(read_field(p));

    {
        std::ofstream out(p, std::ios::binary);
        out << "NOTAFILE";
    }
    CHECK_THROWS(read_field(p));
    std::remove(p.c_str());
    CHECK_THROWS(read_field(tmp_path("minkray_unit_missing.fld")));
}
