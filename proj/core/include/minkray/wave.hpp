#pragma once

#include "minkray/grid.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace minkray {

// Initial value f1 and initial time derivative f2 (= d/dt u at t = 0).
struct CauchyData {
    SpatialField f1;
    SpatialField f2;
    double R0 = 0.0;

    CauchyData() = default;
    explicit CauchyData(const GridSpec& g) : f1(g), f2(g), R0(g.R0) {}
};

// h1, h2 with f1 = h1 + h2 and f2^ = i|xi|(h1^ - h2^) away from xi = 0.
// meanRate is the xi = 0 coefficient of f2^, which the split cannot represent.
struct ModePair {
    SpatialField h1;
    SpatialField h2;
    cplx meanRate = 0.0;
};

// P = box + sum_j A_j d_j + B with box = -d_t^2 + Laplacian and d_0 = d_t.
struct WaveCoefficients {
    std::vector<double> A;  // A_0 ... A_n
    cplx B = 0.0;
    // forward-only finite-difference mode: n+1 fields for A and one for B
    std::optional<std::vector<ScalarField>> variableA;
    std::optional<ScalarField> variableB;

    bool constant() const { return !variableA && !variableB; }
    double a(int j) const { return j < static_cast<int>(A.size()) ? A[j] : 0.0; }
};

ModePair split_cauchy(const CauchyData& d);
CauchyData merge_modes(const ModePair& m);

// u^(t, xi) = e^{sign i t |xi|} h^(xi) on the time grid of spec.
ScalarField half_wave(const SpatialField& h, int sign, const GridSpec& spec);
// g^(xi) = sum_k w_k weight(t_k) e^{-sign i t_k |xi|} v^(t_k, xi), trapezoid w_k.
SpatialField half_wave_adjoint(const ScalarField& v, int sign, const std::vector<double>& timeWeight);

// u = E+ h1 + E- h2 plus the mean mode t * meanRate.
ScalarField solve_cauchy_flat(const CauchyData& d, const GridSpec& spec);
// Exact d/dt of solve_cauchy_flat.
ScalarField solve_cauchy_flat_dt(const CauchyData& d, const GridSpec& spec);

// Roots in tau of tau^2 - |xi|^2 + i A_0 tau + i A'.xi + B, ordered by (Re, Im) descending.
std::pair<cplx, cplx> mode_roots(const std::array<double, 3>& xi, const WaveCoefficients& c);
// P applied to e^{i(t tau + x.xi)} divided by the plane wave.
cplx wave_symbol(double tau, const std::array<double, 3>& xi, const WaveCoefficients& c);
cplx wave_symbol(cplx tau, const std::array<double, 3>& xi, const WaveCoefficients& c);

struct ConstCauchySolution {
    ScalarField u;
    ScalarField u1p, u1m, u2p, u2m;  // E1+ f1, E1- f1, E2+ f2, E2- f2
};

// Per-frequency exact evolution for constant coefficients.
class ConstCauchySolver {
public:
    ConstCauchySolver(const CauchyData& d, const WaveCoefficients& c);

    // Spectrum of the k-th time derivative of u at time t (k = 0, 1, 2).
    Spectrum spectrum_at(double t, int derivative = 0) const;
    ConstCauchySolution sample(const GridSpec& spec) const;

    // Per-mode factors: u1+ = e^{it tau+} p1[i] f1^, u2+ = e^{it tau+} p2[i] f2^, etc.
    struct Mode {
        cplx tp, tm;
        cplx c1p, c1m, c2p, c2m;
        bool doubleRoot = false;
    };
    static Mode mode(const std::array<double, 3>& xi, const WaveCoefficients& c);

private:
    GridSpec spec_;
    Spectrum F1_, F2_;
    std::vector<Mode> modes_;
};

// Parts (E1+ f1, E1- f1, E2+ f2, E2- f2) of one mode at time t, differentiated deriv times.
void const_mode_parts(const ConstCauchySolver::Mode& m, cplx f1, cplx f2, double t, int deriv, cplx out[4]);

ConstCauchySolution solve_cauchy_const(const CauchyData& d, const WaveCoefficients& c, const GridSpec& spec);

// Causal solution of box u = f with u = 0 before the support of f.
ScalarField solve_source_flat(const ScalarField& f);

// One spatial mode of the source problem: u'' + r^2 u = -fhat, u(0) = u'(0) = 0,
// with fhat given on the time grid (spacing dt) and vanishing near both ends.
// Returns u at the requested times.
std::vector<cplx> source_mode_response(const std::vector<cplx>& fhat, double r, double dt,
                                       const std::vector<double>& times);

// Second-order leapfrog for variable (or constant) coefficients on the grid of d.
ScalarField solve_cauchy_fd(const CauchyData& d, const WaveCoefficients& c, const GridSpec& spec);

}  // namespace minkray
