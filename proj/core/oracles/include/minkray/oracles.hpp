#pragma once

// Brute-force references for the test suites. Nothing here is used by the library itself.

#include "minkray/grid.hpp"
#include "minkray/lightray.hpp"
#include "minkray/microlocal.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace minkray::oracles {

struct OracleConfig {
    double tol = 1e-12;        // adaptive quadrature target
    int refine = 2;            // refinement factor for convergence studies
    std::uint64_t seed = 20240917;
};

using SpacetimeFn = std::function<cplx(double t, const std::array<double, 3>& x)>;

// Adaptive Gauss-Kronrod integral of f(s, y + s theta) over [s0, s1].
cplx ray_quadrature_oracle(const SpacetimeFn& f, const std::array<double, 3>& y, const std::array<double, 3>& theta,
                           double s0, double s1, int n, double tol = 1e-12);

// Closed form of int_{s0}^{s1} exp(-alpha (s - tc)^2 - beta |y + s theta|^2) ds.
double gaussian_ray_integral(double alpha, double beta, double tc, const std::array<double, 3>& y,
                             const std::array<double, 3>& theta, double s0, double s1, int n);

// Random smooth test fields: sums of Gaussian bumps with random centres and phases.
ScalarField random_smooth_field(const GridSpec& g, std::uint64_t seed, double tMin, double tMax, double radius,
                                double width);
Sinogram random_smooth_sinogram(const RayChart& chart, std::uint64_t seed, double radius, double width);
SpatialField random_smooth_spatial(const GridSpec& g, std::uint64_t seed, double radius, double width);

struct AdjointResult {
    double maxDeviation = 0.0;
    std::vector<double> deviations;
};

// |<Lf, g> - <f, L*g>| / (|Lf| |g|) over random smooth pairs.
AdjointResult adjoint_test_lightray(const GridSpec& g, const RayChart& chart, int trials, std::uint64_t seed);
// |<E h, v> - <h, E* v>| / (|E h| |v|), unit time weight.
AdjointResult adjoint_test_halfwave(const GridSpec& g, int sign, int trials, std::uint64_t seed);

// Classical RK4 for u'' + r^2 u = -w(t), u(0) = u'(0) = 0, sampled at the requested times.
std::vector<cplx> ode_mode_oracle(const std::function<cplx(double)>& w, double r, const std::vector<double>& times,
                                  double step);

// c0 by nested adaptive quadrature of the full double integral. rule 0: tanh-sinh, rule 1: Gauss-Kronrod.
cplx quad2d_c0_oracle(const TimeCutoff& chi, double eta, int n, int rule);

// N of f(t, x) = exp(-a((t - tc)^2 + |x|^2)) over the whole line in t, with the s integral in
// closed form and the sphere integral by a fine product rule.
double gaussian_normal_oracle(double a, double tc, double t, const std::array<double, 3>& x, int n, int nodes = 400);

}  // namespace minkray::oracles
