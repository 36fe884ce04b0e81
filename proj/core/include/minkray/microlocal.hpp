#pragma once

#include "minkray/grid.hpp"
#include "minkray/wave.hpp"

#include <array>
#include <vector>

namespace minkray {

// C_n = 2 pi |S^{n-2}|
double normal_constant(int n);

// k(tau, xi) = C_n (|xi|^2 - tau^2)_+^{(n-3)/2} / |xi|^{n-2}; for n = 2 the square root is
// capped below by epsReg. r = |xi|.
double k_symbol(double tau, double r, int n, double epsReg = 0.0);

// Time-domain form of the same multiplier on one spatial mode:
// K(s, r) = (1/2pi) int k(tau, r) e^{i tau s} d tau = int_{S^{n-1}} e^{i s theta.xi} d theta.
double normal_time_kernel(double s, double r, int n);

enum class NormalScheme {
    TimeKernel,      // per-mode convolution in t with K(s, r), trapezoid weights
    FrequencyCapped  // zero-padded temporal FFT with the capped k(tau, xi)
};

struct NormalOptions {
    NormalScheme scheme = NormalScheme::TimeKernel;
    int padFactor = 2;
    double epsReg = -1.0;  // < 0 selects (dxi)^2
};

ScalarField apply_normal_multiplier(const ScalarField& f, const NormalOptions& opt = {});

// One spatial mode, time kernel: out(t_k) = sum_j w_j K(t_k - t_j, r) in(t_j).
// Output length may differ from input length (same time origin and spacing).
std::vector<cplx> apply_normal_mode(const std::vector<cplx>& in, double r, int n, double dt, std::size_t outLen);

// Direct evaluation of the n = 3 kernel at the requested (t, x, y, z) points:
// Nf(t, x) = int dt' int_{S^2} f(t', x + |t - t'| w) dw, trapezoid in t', Gauss-Legendre x azimuth
// on the sphere, tensor 4-point Lagrange interpolation in space.
std::vector<cplx> normal_kernel_apply_n3(const ScalarField& f, const std::vector<std::array<double, 4>>& points,
                                         int sphereOrder = 12);

// A(sigma, xi) = C_n 2^{n-2} int_{-1}^{0} e^{2 i sigma r u} (-u(1+u))^{(n-3)/2} du for odd n,
// by repeated integration by parts (exact for the polynomial weight) or a Taylor series for small sigma r.
cplx symbol_A(double sigma, double r, int n);
// The same integral in the original variable, int_{-2r}^{0} e^{i sigma s} k(s + r, r) ds, adaptive quadrature.
cplx symbol_A_quad(double sigma, double r, int n);
// int |integrand|, used to scale errors near zeros of A
double symbol_A_scale(double r, int n);

// chi: smooth bump on (t1 + eps, T - eps), peak 1.
struct TimeCutoff {
    double t1 = 0, T = 0, eps = 0;
    std::vector<double> samples;

    static TimeCutoff for_grid(const GridSpec& g);
    double operator()(double t) const;
    double lo() const { return t1 + eps; }
    double hi() const { return T - eps; }
};

// Conic smooth cutoff: 1 where |xi|^2 - tau^2 >= delta (tau^2 + |xi|^2), 0 where <= delta/2 (...).
struct SpacelikeCutoff {
    double delta = 0.2;
    double operator()(double tau, double r) const;
};

// c0(eta) = int int C_n / (i (t - t')^{m+1}) |eta|^{-m-1} chi(t) dt' dt, m = (n-3)/2,
// t' in [0, t1], t in supp chi.
cplx leading_symbol_c0(double eta, const TimeCutoff& chi, int n);

// e_k(s) along the flat light ray through (0, x0) on branch sign; requires real A.
std::vector<double> transport_symbol(const WaveCoefficients& c, const std::array<double, 3>& x0,
                                     const std::array<double, 3>& theta, int branch, int k,
                                     const std::vector<double>& sGrid, int n);

}  // namespace minkray
