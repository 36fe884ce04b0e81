#include "doctest.h"
#include "minkray/lightray.hpp"
#include "minkray/oracles.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace minkray;

namespace {

GridSpec grid2(int Nx = 64, int Nt = 64) {
    GridSpec g;
    g.n = 2;
    g.Nx = Nx;
    g.Nt = Nt;
    g.Lx = 3.0;
    g.T = 1.5;
    g.t1 = 0.75;
    g.R0 = 1.0;
    g.validate();
    return g;
}

GridSpec grid3() {
    GridSpec g;
    g.n = 3;
    g.Nx = 16;
    g.Nt = 16;
    g.Lx = 2.0;
    g.T = 0.75;
    g.t1 = 0.4;
    g.R0 = 0.5;
    g.validate();
    return g;
}

ScalarField gaussian_st(const GridSpec& g, double alpha, double beta, double tc) {
    ScalarField f(g);
    for (int k = 0; k < g.Nt; ++k)
        for (std::size_t i = 0; i < f.slice_size(); ++i) {
            auto x = position(g, i);
            double r2 = 0;
            for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
            f.slice(k)[i] = std::exp(-alpha * (g.t(k) - tc) * (g.t(k) - tc) - beta * r2);
        }
    return f;
}

// compactly supported in |x| < rad, all times
ScalarField compact_bump(const GridSpec& g, double rad, std::array<double, 3> c = {}) {
    ScalarField f(g);
    for (int k = 0; k < g.Nt; ++k)
        for (std::size_t i = 0; i < f.slice_size(); ++i) {
            auto x = position(g, i);
            double r2 = 0;
            for (int d = 0; d < g.n; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
            double q = 1.0 - r2 / (rad * rad);
            f.slice(k)[i] = q > 0 ? std::pow(q, 4) * (1.0 + g.t(k)) : 0.0;
        }
    return f;
}

double max_abs_diff(const Sinogram& a, const Sinogram& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

double max_abs(const Sinogram& a) {
    double m = 0;
    for (auto& v : a.v) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_CASE("chart invariants") {
    GridSpec g = grid2();
    RayChart c = make_chart_uniform(g, 24);
    CHECK_NOTHROW(c.validate());
    double w = 0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        auto& th = c.directions[j];
        CHECK(std::hypot(th[0], th[1]) == doctest::Approx(1.0).epsilon(1e-14));
        w += c.weights[j];
    }
    CHECK(w == doctest::Approx(2 * kPi).epsilon(1e-13));
    CHECK(c.sStep <= 0.5 * g.dx() * (1 + 1e-12));

    GridSpec g3 = grid3();
    RayChart c3 = make_chart_gl(g3, 4, 8);
    double w3 = 0;
    for (std::size_t j = 0; j < c3.size(); ++j) {
        auto& th = c3.directions[j];
        CHECK(std::sqrt(th[0] * th[0] + th[1] * th[1] + th[2] * th[2]) == doctest::Approx(1.0).epsilon(1e-14));
        w3 += c3.weights[j];
    }
    CHECK(w3 == doctest::Approx(4 * kPi).epsilon(1e-13));
    CHECK(sphere_area(3) == doctest::Approx(4 * kPi));

    CHECK_THROWS_AS(make_chart_uniform(g3, 8), ContractError);
    CHECK_THROWS_AS(make_chart_gl(g, 2, 4), ContractError);
    RayChart bad = c;
    bad.sStep = g.dx();
    CHECK_THROWS_AS(bad.validate(), ContractError);
}

TEST_CASE("Gaussian ray integrals match the closed form") {
    GridSpec g = grid2(128, 128);
    const double alpha = 4, beta = 4, tc = 0.4;
    ScalarField f = gaussian_st(g, alpha, beta, tc);
    RayChart c = make_chart_uniform(g, 8);
    Sinogram S = ray_transform(f, c);
    double worst = 0, peak = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t i = 0; i < S.row_size(); i += 7) {
            auto y = position(g, i);
            double ref = oracles::gaussian_ray_integral(alpha, beta, tc, y, c.directions[j], 0.0, g.t1_grid(), 2);
            worst = std::max(worst, std::abs(S.row(j)[i] - ref));
            peak = std::max(peak, ref);
        }
    CHECK(worst / peak <= 5e-3);
}

TEST_CASE("zero and off-support rays") {
    GridSpec g = grid2();
    RayChart c = make_chart_uniform(g, 12);
    ScalarField z(g);
    CHECK(max_abs(ray_transform(z, c)) == 0.0);

    const double rad = 0.5;
    Sinogram S = ray_transform(compact_bump(g, rad), c);
    double outside = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t i = 0; i < S.row_size(); ++i) {
            auto y = position(g, i);
            if (std::hypot(y[0], y[1]) > rad + g.t1_grid() + 2 * g.dx()) outside = std::max(outside, std::abs(S.row(j)[i]));
        }
    CHECK(outside == 0.0);
    CHECK(max_abs(S) > 0.0);
}

TEST_CASE("linearity") {
    GridSpec g = grid2();
    RayChart c = make_chart_uniform(g, 12);
    ScalarField a = oracles::random_smooth_field(g, 1, 0, g.t1_grid(), 1.0, 0.3);
    ScalarField b = oracles::random_smooth_field(g, 2, 0, g.t1_grid(), 1.0, 0.3);
    const cplx alpha(0.7, -0.2), beta(-1.3, 0.5);
    ScalarField ab(g);
    for (std::size_t i = 0; i < ab.v.size(); ++i) ab.v[i] = alpha * a.v[i] + beta * b.v[i];
    Sinogram Sa = ray_transform(a, c), Sb = ray_transform(b, c), Sab = ray_transform(ab, c);
    for (std::size_t i = 0; i < Sa.v.size(); ++i) Sa.v[i] = alpha * Sa.v[i] + beta * Sb.v[i];
    CHECK(max_abs_diff(Sa, Sab) <= 1e-12 * max_abs(Sab));
}

TEST_CASE("translation equivariance on grid shifts") {
    GridSpec g = grid2();
    RayChart c = make_chart_uniform(g, 12);
    const int m = 5;
    Sinogram S0 = ray_transform(compact_bump(g, 0.5), c);
    Sinogram S1 = ray_transform(compact_bump(g, 0.5, {m * g.dx(), 0, 0}), c);
    double worst = 0;
    // layout is row-major with x1 slowest: shifting x1 by m cells moves by m * Nx entries
    const std::size_t stride = static_cast<std::size_t>(m) * g.Nx;
    for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t i = 0; i + stride < S0.row_size(); ++i)
            worst = std::max(worst, std::abs(S1.row(j)[i + stride] - S0.row(j)[i]));
    CHECK(worst <= 1e-12 * max_abs(S0));
}

TEST_CASE("backprojection of a constant sinogram") {
    GridSpec g = grid2();
    RayChart c = make_chart_uniform(g, 16);
    Sinogram S(c);
    for (auto& v : S.v) v = 1.0;
    ScalarField B = backproject(S, g, 0, g.t1_index() + 1);
    std::size_t centre = (g.Nx / 2) * g.Nx + g.Nx / 2;
    for (int k = 0; k <= g.t1_index(); ++k) CHECK(std::abs(B.slice(k)[centre] - 2 * kPi) <= 1e-12);
    CHECK(std::abs(B.slice(g.t1_index() + 1)[centre]) == 0.0);
}

TEST_CASE("adjoint pairing is exact on small grids") {
    GridSpec g = grid2(32, 32);
    auto r = oracles::adjoint_test_lightray(g, make_chart_uniform(g, 8), 2, 11);
    CHECK(r.maxDeviation <= 1e-12);
    GridSpec g3 = grid3();
    auto r3 = oracles::adjoint_test_lightray(g3, make_chart_gl(g3, 2, 4), 2, 12);
    CHECK(r3.maxDeviation <= 1e-12);
}

TEST_CASE("normal operator is positive when sStep equals dt") {
    GridSpec g = grid2(32, 32);
    RayChart c = make_chart_uniform(g, 8);
    c.sStep = g.dt();
    REQUIRE_NOTHROW(c.validate());
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        ScalarField f = oracles::random_smooth_field(g, seed, 0, g.t1_grid(), 1.0, 0.3);
        Sinogram S = ray_transform(f, c);
        ScalarField b = backproject(S, g, 0, g.t1_index() + 1);
        CHECK(inner(b, f).real() > 0.0);
        CHECK(l2_norm(S) > 0.0);
    }
}

TEST_CASE("Fourier slice for a band-limited Gaussian") {
    GridSpec g = grid2(64, 64);
    ScalarField f = gaussian_st(g, 30, 4, 0.35);
    for (int k = g.t1_index() + 1; k < g.Nt; ++k)
        for (std::size_t i = 0; i < f.slice_size(); ++i) f.slice(k)[i] = 0;
    RayChart c = make_chart_uniform(g, 8);
    for (std::size_t j = 0; j < c.size(); j += 3) CHECK(fourier_slice_check(f, c, j) <= 1e-2);
}

TEST_CASE("sinogram norms and files") {
    GridSpec g = grid2(32, 32);
    RayChart c = make_chart_uniform(g, 6);
    Sinogram S = oracles::random_smooth_sinogram(c, 4, 1.0, 0.3);
    CHECK(sobolev_norm_sinogram(S, 0.0) == doctest::Approx(l2_norm(S)).epsilon(1e-10));
    CHECK(sobolev_norm_sinogram(S, 1.0) > sobolev_norm_sinogram(S, 0.0));
    CHECK(sobolev_norm_sinogram(Sinogram(c), 1.0) == 0.0);

    std::string p = (std::filesystem::temp_directory_path() / "minkray_unit.sin").string();
    write_sinogram(p, S);
    Sinogram R = read_sinogram(p);
    CHECK(R.v == S.v);
    CHECK(R.chart.directions == S.chart.directions);
    CHECK(R.chart.weights == S.chart.weights);
    std::remove(p.c_str());
}
