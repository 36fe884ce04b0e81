#include "doctest.h"
#include "minkray/oracles.hpp"

#include <cmath>

using namespace minkray;

TEST_CASE("ray quadrature oracle") {
    const double alpha = 3, beta = 5, tc = 0.4;
    auto f = [&](double t, const std::array<double, 3>& x) -> cplx {
        return std::exp(-alpha * (t - tc) * (t - tc) - beta * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
    };
    for (int n : {2, 3})
        for (auto y : {std::array<double, 3>{0.1, -0.2, 0.05}, std::array<double, 3>{-0.6, 0.3, 0.2}}) {
            std::array<double, 3> th = n == 2 ? std::array<double, 3>{0.6, 0.8, 0} : std::array<double, 3>{0.48, 0.64, 0.6};
            double ref = oracles::gaussian_ray_integral(alpha, beta, tc, y, th, 0.0, 1.0, n);
            cplx q = oracles::ray_quadrature_oracle(f, y, th, 0.0, 1.0, n);
            CHECK(std::abs(q - ref) <= 1e-10 * std::abs(ref));
        }
    auto zero = [](double, const std::array<double, 3>&) -> cplx { return 0.0; };
    CHECK(oracles::ray_quadrature_oracle(zero, {0, 0, 0}, {1, 0, 0}, 0, 1, 2) == cplx(0.0));
    auto compact = [](double, const std::array<double, 3>& x) -> cplx {
        double r2 = x[0] * x[0] + x[1] * x[1];
        return r2 < 0.25 ? 1.0 - 4 * r2 : 0.0;
    };
    CHECK(oracles::ray_quadrature_oracle(compact, {0, 2.0, 0}, {1, 0, 0}, 0, 1, 2) == cplx(0.0));
}

TEST_CASE("adjoint oracle on zero trials") {
    GridSpec g;
    g.n = 2;
    g.Nx = 16;
    g.Nt = 16;
    g.Lx = 2;
    g.T = 1;
    g.t1 = 0.5;
    g.R0 = 0.5;
    auto r = oracles::adjoint_test_lightray(g, make_chart_uniform(g, 4), 0, 1);
    CHECK(r.maxDeviation == 0.0);
    CHECK(r.deviations.empty());
}

TEST_CASE("ODE mode oracle") {
    std::vector<double> times = {0.0, 0.5, 1.3, 2.0};
    auto zero = oracles::ode_mode_oracle([](double) { return cplx(0.0); }, 2.0, times, 0.01);
    for (cplx v : zero) CHECK(v == cplx(0.0));

    // w = 1 from t = 0: u = -(1 - cos(r t)) / r^2
    const double r = 3.0;
    auto exact = [&](double t) { return -(1.0 - std::cos(r * t)) / (r * r); };
    auto u = oracles::ode_mode_oracle([](double) { return cplx(1.0); }, r, times, 1e-3);
    for (std::size_t q = 0; q < times.size(); ++q) CHECK(std::abs(u[q] - exact(times[q])) <= 1e-12);
    // r = 0: u = -t^2 / 2
    auto u0 = oracles::ode_mode_oracle([](double) { return cplx(1.0); }, 0.0, times, 1e-2);
    for (std::size_t q = 0; q < times.size(); ++q) CHECK(std::abs(u0[q] + 0.5 * times[q] * times[q]) <= 1e-12);

    // fourth order: halving the step cuts the error by about 16
    auto w = [](double t) { return cplx(std::sin(5 * t), 0.0); };
    auto fine = oracles::ode_mode_oracle(w, r, {2.0}, 1e-4);
    auto e1 = std::abs(oracles::ode_mode_oracle(w, r, {2.0}, 0.1)[0] - fine[0]);
    auto e2 = std::abs(oracles::ode_mode_oracle(w, r, {2.0}, 0.05)[0] - fine[0]);
    CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("c0 double quadrature oracle") {
    TimeCutoff chi;
    chi.t1 = 0.5;
    chi.T = 2.0;
    chi.eps = 0.05;
    for (int n : {3, 5}) {
        cplx a = oracles::quad2d_c0_oracle(chi, 7.0, n, 0), b = oracles::quad2d_c0_oracle(chi, 7.0, n, 1);
        CHECK(std::abs(a - b) <= 1e-8 * std::abs(a));
        CHECK(std::abs(a) > 0);
        CHECK((cplx(0, 1) * a).real() > 0);
        CHECK(std::abs(a - leading_symbol_c0(7.0, chi, n)) <= 1e-8 * std::abs(a));
        const int m = (n - 3) / 2;
        cplx s = oracles::quad2d_c0_oracle(chi, 3.5, n, 0) * std::pow(0.5, m + 1);
        CHECK(std::abs(s - a) <= 1e-12 * std::abs(a));
    }
}

TEST_CASE("Gaussian normal oracle symmetry") {
    // radial in x and symmetric about tc
    const double a = 10, tc = 0.5;
    double v1 = oracles::gaussian_normal_oracle(a, tc, 0.6, {0.2, 0.1, 0}, 2);
    double v2 = oracles::gaussian_normal_oracle(a, tc, 0.4, {-0.1, 0.2, 0}, 2);
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-10));
    CHECK(v1 > 0);
}

TEST_CASE("random fields are reproducible") {
    GridSpec g;
    g.n = 2;
    g.Nx = 16;
    g.Nt = 8;
    g.Lx = 2;
    g.T = 1;
    g.t1 = 0.5;
    auto a = oracles::random_smooth_field(g, 5, 0.0, 0.5, 0.5, 0.3);
    auto b = oracles::random_smooth_field(g, 5, 0.0, 0.5, 0.5, 0.3);
    auto c = oracles::random_smooth_field(g, 6, 0.0, 0.5, 0.5, 0.3);
    CHECK(a.v == b.v);
    CHECK(a.v != c.v);
}
