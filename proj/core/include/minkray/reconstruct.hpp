#pragma once

#include "minkray/grid.hpp"
#include "minkray/lightray.hpp"
#include "minkray/microlocal.hpp"
#include "minkray/report.hpp"
#include "minkray/wave.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace minkray {

// One factor of a translation-invariant operator chain.
enum class StageKind {
    Identity,
    HalfWave,         // E+ / E-
    ConstPart,        // E1+, E1-, E2+, E2- of the constant-coefficient solver
    Cutoff,           // multiply by chi(t)
    DataMask,         // multiply by 1_[0, t1] (trapezoid half weight at t1)
    Normal,           // N, time-kernel form
    HalfWaveAdjoint,  // E+* / E-*, trapezoid in t
    ConstPartAdjoint, // E1+*, ..., trapezoid in t
    Slice,            // restriction to t = T~ (snapped to the grid)
    SliceRate         // centred time derivative at t = T~
};

struct Stage {
    StageKind kind = StageKind::Identity;
    int sign = 1;  // branch of E, E*, or the constant-coefficient part
    int part = 1;  // 1 or 2 for ConstPart
};

// Chain written left to right as an operator product, e.g. "E+*.chi.N.1.E+".
// Tokens: id, E+, E-, E1+, E1-, E2+, E2-, chi, 1, N, E+*, E-*, E1+*, E1-*, E2+*, E2-*, rho, drho.
struct Pipeline {
    std::string label;
    std::vector<Stage> stages;  // rightmost factor first
    double sliceTime = 0.0;     // for rho / drho

    static Pipeline parse(const std::string& label);
};

struct MeasuredMultiplier {
    std::string label;
    GridSpec spec;
    std::vector<cplx> m;         // one entry per spatial frequency index
    double mMin = 0.0;           // 1e-3 x median |m| over the band [Nyquist/16, Nyquist/4]
    std::vector<unsigned char> invertible;
};

double band_median_abs(const GridSpec& g, const std::vector<cplx>& m);

// Per-mode evaluation of the chain: each factor is diagonal in xi, so the chain is the
// multiplier m(xi). Variable coefficients are refused.
MeasuredMultiplier measure_multiplier(const Pipeline& p, const GridSpec& spec,
                                      const WaveCoefficients& c = {});

// The same chain run with the grid operators on a spatial field.
SpatialField apply_pipeline(const Pipeline& p, const SpatialField& h, const WaveCoefficients& c = {});

struct ReconOptions {
    double mMinFactor = 1e-3;   // determinant threshold relative to its band median
    bool diagonal = false;      // drop the cross multipliers (model pipeline only)
    double bandLimit = -1.0;    // <= 0 selects Nyquist/2
};

struct CauchyReconstruction {
    CauchyData data;
    Report report;
    std::vector<unsigned char> admitted;  // per frequency
};

// Model operator: g+- = E+-* chi N 1 E(h), solved per frequency for (h1, h2).
CauchyReconstruction reconstruct_cauchy_model(const Sinogram& S, const GridSpec& spec,
                                              const ReconOptions& opt = {}, const CauchyData* truth = nullptr);
// Constant coefficients: g+- = E1+-* chi N u = M11+- f1 + M12+- f2, solved per frequency.
// The report carries sign.plus / sign.minus = median over the band of Re(i|xi| m12 / m11) for
// the same-branch chains E1+-* chi N 1 E2+- and E1+-* chi N 1 E1+-.
CauchyReconstruction reconstruct_cauchy_const(const Sinogram& S, const GridSpec& spec, const WaveCoefficients& c,
                                              const ReconOptions& opt = {}, const CauchyData* truth = nullptr);
// Slice variant: b(T~) and d/dt b(T~) in place of the E* projections.
CauchyReconstruction reconstruct_cauchy_restriction(const Sinogram& S, const GridSpec& spec, double Ttilde,
                                                    const ReconOptions& opt = {},
                                                    const CauchyData* truth = nullptr);

struct SourceOptions {
    double delta = 0.2;  // space-like sector parameter
    int padFactor = 2;   // temporal zero padding
};

struct SourceReconstruction {
    ScalarField f;
    Report report;
};

// f^ = (tau^2 - |xi|^2) / k(tau, xi) * FT(L*S) * chi_sp(tau, xi)
SourceReconstruction reconstruct_source(const Sinogram& S, const GridSpec& spec, const SourceOptions& opt = {},
                                        const ScalarField* truth = nullptr);

// Fraction of spacetime spectral energy of f outside the space-like sector |xi|^2 - tau^2 > (delta/2)(tau^2+|xi|^2).
double outside_spacelike_fraction(const ScalarField& f, double delta, int padFactor = 2);

// || E-* chi N 1 E+ h || / || E+* chi N 1 E+ h || for h = Gaussian-windowed e^{i kappa x1}.
double cross_term_probe(double kappa, const GridSpec& spec, double window = 0.25);

struct StabilityOptions {
    std::vector<double> bands = {4.0, 8.0, 16.0};
    int samplesPerBand = 7;
    double s = 0.0;
    std::uint64_t seed = 1;
    int nTheta = 0;  // 0 selects a default chart size
};

// Ratio ||(f1, f2)||_{H^{s+1} x H^s} / ||Lu||_{H^{s+n/2+delta}(C)} over random band-limited data.
Report stability_ratio(const GridSpec& spec, const StabilityOptions& opt);

// Band-limited test data: Gaussian envelope of width sigma times cos(kappa (x1 - c1) - phase).
// phase = pi/2 gives an odd carrier with zero mean; the xi = 0 mode is not recoverable from light-ray data.
SpatialField gaussian_carrier(const GridSpec& g, double sigma, double kappa, const std::array<double, 3>& center = {},
                              double phase = 0.0);

double relative_error(const SpatialField& a, const SpatialField& truth);
double relative_error(const ScalarField& a, const ScalarField& truth);

void write_multiplier_csv(const std::string& path, const MeasuredMultiplier& m,
                          const std::vector<double>* overlay = nullptr);

}  // namespace minkray
