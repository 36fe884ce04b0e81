#include "doctest.h"
#include "minkray/microlocal.hpp"
#include "minkray/oracles.hpp"

#include <cmath>

using namespace minkray;

namespace {

GridSpec grid(int n, int Nx, int Nt, double Lx, double T, double t1) {
    GridSpec g;
    g.n = n;
    g.Nx = Nx;
    g.Nt = Nt;
    g.Lx = Lx;
    g.T = T;
    g.t1 = t1;
    g.R0 = 0.5;
    g.validate();
    return g;
}

ScalarField st_gaussian(const GridSpec& g, double a, double tc) {
    ScalarField f(g);
    for (int k = 0; k < g.Nt; ++k)
        for (std::size_t i = 0; i < f.slice_size(); ++i) {
            auto x = position(g, i);
            double r2 = 0;
            for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
            f.slice(k)[i] = std::exp(-a * ((g.t(k) - tc) * (g.t(k) - tc) + r2));
        }
    return f;
}

}  // namespace

TEST_CASE("normal constant and k symbol") {
    CHECK(normal_constant(2) == doctest::Approx(4 * kPi));
    CHECK(normal_constant(3) == doctest::Approx(4 * kPi * kPi));
    CHECK(k_symbol(0.0, 2.0, 3) == doctest::Approx(2 * kPi * kPi));
    CHECK(k_symbol(0.0, 2.0, 2) == doctest::Approx(2 * kPi));
    CHECK(k_symbol(3.0, 2.0, 3) == 0.0);
    CHECK(k_symbol(3.0, 2.0, 2) == 0.0);
    CHECK_THROWS_AS(k_symbol(0.0, 0.0, 3), ContractError);
    // order -1 for n = 3
    CHECK(k_symbol(1.5, 4.0, 3) == doctest::Approx(0.5 * k_symbol(0.75, 2.0, 3)));
    // the n = 2 cap keeps the symbol finite on the light cone
    CHECK(std::isfinite(k_symbol(2.0, 2.0, 2, 0.1)));
}

TEST_CASE("time kernel is the inverse temporal transform of k") {
    for (double r : {0.5, 2.0, 7.0})
        for (double s : {0.0, 0.3, 1.7}) {
            double rs = r * s;
            double n3 = rs == 0 ? 4 * kPi : 4 * kPi * std::sin(rs) / rs;
            CHECK(normal_time_kernel(s, r, 3) == doctest::Approx(n3).epsilon(1e-13));
            CHECK(normal_time_kernel(s, r, 2) == doctest::Approx(2 * kPi * std::cyl_bessel_j(0.0, rs)).epsilon(1e-12));
        }
    CHECK(normal_time_kernel(0.4, 0.0, 3) == doctest::Approx(4 * kPi));
}

TEST_CASE("normal operator matches the analytic Gaussian") {
    for (int n : {2, 3}) {
        GridSpec g = n == 2 ? grid(2, 64, 64, 2, 1.5, 0.5) : grid(3, 32, 48, 2, 1.5, 0.5);
        const double a = 40, tc = 0.75;
        ScalarField Nf = apply_normal_multiplier(st_gaussian(g, a, tc));
        double worst = 0, peak = 0;
        for (int k : {g.Nt / 3, g.Nt / 2, (2 * g.Nt) / 3})
            for (std::size_t i = 0; i < Nf.slice_size(); i += 37) {
                double ref = oracles::gaussian_normal_oracle(a, tc, g.t(k), position(g, i), n);
                worst = std::max(worst, std::abs(Nf.slice(k)[i] - ref));
                peak = std::max(peak, std::abs(ref));
            }
        CHECK(worst <= 1e-3 * peak);
    }
}

TEST_CASE("normal operator is symmetric and nonnegative") {
    GridSpec g = grid(2, 32, 32, 2, 1, 0.5);
    ScalarField a = oracles::random_smooth_field(g, 1, 0.2, 0.8, 0.6, 0.3);
    ScalarField b = oracles::random_smooth_field(g, 2, 0.2, 0.8, 0.6, 0.3);
    ScalarField Na = apply_normal_multiplier(a), Nb = apply_normal_multiplier(b);
    cplx l = inner(Na, b), r = inner(a, Nb);
    CHECK(std::abs(l - r) <= 1e-10 * std::abs(l));
    CHECK(inner(Na, a).real() > 0);
    CHECK(std::abs(inner(Na, a).imag()) <= 1e-10 * inner(Na, a).real());

    NormalOptions bad;
    bad.scheme = NormalScheme::FrequencyCapped;
    bad.padFactor = 1;
    CHECK_THROWS_AS(apply_normal_multiplier(a, bad), ContractError);
}

TEST_CASE("direct n = 3 kernel") {
    GridSpec g = grid(3, 24, 24, 2, 1.2, 0.5);
    ScalarField f = st_gaussian(g, 8, 0.3);
    // zero outside the double cone of a compact support
    ScalarField cut = f;
    for (int k = 0; k < g.Nt; ++k)
        for (std::size_t i = 0; i < cut.slice_size(); ++i) {
            auto x = position(g, i);
            if (std::abs(g.t(k) - 0.3) > 0.1 || x[0] * x[0] + x[1] * x[1] + x[2] * x[2] > 0.25) cut.slice(k)[i] = 0;
        }
    std::vector<std::array<double, 4>> far = {{0.3, 1.5, 0, 0}, {0.3, 0, -1.5, 0}};
    for (cplx v : normal_kernel_apply_n3(cut, far)) CHECK(v == cplx(0.0));
    // matches the multiplier near the source
    ScalarField Nf = apply_normal_multiplier(f);
    std::vector<std::array<double, 4>> pts;
    std::vector<cplx> ref;
    for (int k : {8, 12})
        for (std::size_t i : {std::size_t{12 * 24 * 24 + 12 * 24 + 12}, std::size_t{13 * 24 * 24 + 11 * 24 + 12}}) {
            auto x = position(g, i);
            pts.push_back({g.t(k), x[0], x[1], x[2]});
            ref.push_back(Nf.slice(k)[i]);
        }
    auto direct = normal_kernel_apply_n3(f, pts, 16);
    for (std::size_t q = 0; q < pts.size(); ++q) CHECK(std::abs(direct[q] - ref[q]) <= 5e-2 * std::abs(ref[q]));
    CHECK_THROWS_AS(normal_kernel_apply_n3(ScalarField(grid(2, 16, 16, 2, 1, 0.5)), pts), ContractError);
}

TEST_CASE("symbol A") {
    // zero at sigma |xi| = pi for n = 3
    CHECK(std::abs(symbol_A(kPi / 2.0, 2.0, 3)) <= 1e-10);
    // sigma -> 0 limits: 8 pi^2 (n = 3) and 16 pi^3 / 3 (n = 5)
    CHECK(std::abs(symbol_A(1e-12, 1.0, 3) - 8 * kPi * kPi) <= 1e-9);
    CHECK(std::abs(symbol_A(1e-12, 1.0, 5) - 16 * kPi * kPi * kPi / 3) <= 1e-9);
    for (int n : {3, 5})
        for (double sigma : {0.05, 0.9, 13.0})
            for (double r : {0.1, 1.3, 20.0}) {
                cplx c = symbol_A(sigma, r, n), q = symbol_A_quad(sigma, r, n);
                CHECK(std::abs(c - q) <= 1e-8 * std::max(std::abs(q), symbol_A_scale(r, n)));
            }
    CHECK_THROWS_AS(symbol_A(1.0, 1.0, 4), ContractError);
    CHECK_THROWS_AS(symbol_A(1.0, 0.0, 3), ContractError);
}

TEST_CASE("time cutoff") {
    GridSpec g = grid(2, 16, 64, 2, 2, 0.5);
    TimeCutoff chi = TimeCutoff::for_grid(g);
    CHECK(chi.lo() > chi.t1);
    double peak = 0;
    for (int k = 0; k < g.Nt; ++k) {
        double v = chi.samples[k];
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        if (g.t(k) <= chi.lo() || g.t(k) >= chi.hi()) CHECK(v == 0.0);
        if (k <= g.t1_index()) CHECK(v == 0.0);
        peak = std::max(peak, v);
    }
    CHECK(peak > 0.99);
    CHECK(chi(0.5 * (chi.lo() + chi.hi())) == doctest::Approx(1.0));
}

TEST_CASE("space-like cutoff") {
    SpacelikeCutoff c{0.2};
    CHECK(c(0.0, 1.0) == 1.0);
    CHECK(c(1.0, 1.0) == 0.0);
    CHECK(c(2.0, 1.0) == 0.0);
    CHECK(c(0.0, 0.0) == 0.0);
    for (double tau : {0.1, 0.5, 0.8})
        CHECK(c(3.0 * tau, 3.0) == doctest::Approx(c(tau, 1.0)).epsilon(1e-14));
    double prev = 1.0;
    for (double tau = 0.0; tau < 1.2; tau += 0.05) {
        CHECK(c(tau, 1.0) <= prev + 1e-15);
        prev = c(tau, 1.0);
    }
}

TEST_CASE("leading symbol c0") {
    TimeCutoff chi;
    chi.t1 = 0.5;
    chi.T = 2.0;
    chi.eps = 0.05;
    for (int n : {3, 5}) {
        cplx c = leading_symbol_c0(7.0, chi, n);
        CHECK(std::abs(c) > 0);
        CHECK((cplx(0, 1) * c).real() > 0);
        const int m = (n - 3) / 2;
        cplx scaled = leading_symbol_c0(14.0, chi, n) * std::pow(2.0, m + 1);
        CHECK(std::abs(scaled - c) <= 1e-14 * std::abs(c));
    }
    CHECK_THROWS_AS(leading_symbol_c0(0.0, chi, 3), ContractError);
}

TEST_CASE("transport symbols") {
    std::vector<double> s = {-0.4, 0.0, 0.3, 0.9};
    WaveCoefficients zero;
    for (int branch : {1, -1}) {
        auto e1 = transport_symbol(zero, {0, 0, 0}, {1, 0, 0}, branch, 1, s, 2);
        auto e2 = transport_symbol(zero, {0, 0, 0}, {1, 0, 0}, branch, 2, s, 2);
        for (std::size_t q = 0; q < s.size(); ++q) {
            CHECK(e1[q] == 1.0);
            CHECK(e2[q] == static_cast<double>(branch));
        }
    }
    WaveCoefficients a0;
    a0.A = {1.0};
    auto e = transport_symbol(a0, {0, 0, 0}, {0, 1, 0}, 1, 1, s, 2);
    for (std::size_t q = 0; q < s.size(); ++q) CHECK(std::abs(e[q] - std::exp(s[q])) <= 1e-10);

    GridSpec g = grid(2, 16, 8, 2, 1, 0.5);
    WaveCoefficients cplxA;
    cplxA.variableA = std::vector<ScalarField>(3, ScalarField(g));
    (*cplxA.variableA)[0].v[5] = cplx(0.1, 0.2);
    CHECK_THROWS_AS(transport_symbol(cplxA, {0, 0, 0}, {1, 0, 0}, 1, 1, s, 2), ContractError);
    CHECK_THROWS_AS(transport_symbol(zero, {0, 0, 0}, {1, 0, 0}, 1, 3, s, 2), ContractError);
}
