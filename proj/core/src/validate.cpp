#include "minkray/validate.hpp"

#include "minkray/grid.hpp"
#include "minkray/lightray.hpp"
#include "minkray/microlocal.hpp"
#include "minkray/oracles.hpp"
#include "minkray/reconstruct.hpp"
#include "minkray/wave.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace minkray {

namespace {

constexpr cplx I(0.0, 1.0);

GridSpec grid(int n, int Nx, int Nt, double Lx, double T, double t1, double R0) {
    GridSpec g;
    g.n = n;
    g.Nx = Nx;
    g.Nt = Nt;
    g.Lx = Lx;
    g.T = T;
    g.t1 = t1;
    g.R0 = R0;
    g.validate();
    return g;
}

std::string dim(int n) { return "n" + std::to_string(n); }

// exp(-a (t - t1/2)^2 - b |x|^2) on [0, t1], zero afterwards
ScalarField gaussian_bump(const GridSpec& g, double a, double b) {
    ScalarField f(g);
    const double tc = 0.5 * g.t1_grid();
    const int k1 = g.t1_index();
    for (int k = 0; k <= k1; ++k) {
        double t = g.t(k);
        for (std::size_t i = 0; i < f.slice_size(); ++i) {
            auto x = position(g, i);
            double r2 = 0;
            for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
            f.slice(k)[i] = std::exp(-a * (t - tc) * (t - tc) - b * r2);
        }
    }
    return f;
}

RayChart chart_for(const GridSpec& g, int size) {
    return g.n == 2 ? make_chart_uniform(g, size) : make_chart_gl(g, size, 2 * size);
}

double rel_diff(const ScalarField& a, const ScalarField& b) { return relative_error(a, b); }

double bump(double t, double a, double b) {
    if (t <= a || t >= b) return 0.0;
    double z = (2.0 * t - a - b) / (b - a);
    return std::exp(1.0 - 1.0 / (1.0 - z * z));
}

bool in_band(const GridSpec& g, double r) { return r >= g.nyquist() / 16.0 && r <= g.nyquist() / 4.0; }

// Band-limited Cauchy pair: f1 a Gaussian carrier, f2 a shifted carrier scaled by kappa.
CauchyData carrier_data(const GridSpec& g, double sigma, double kappa, bool withF1, bool withF2) {
    CauchyData d(g);
    // odd carriers: the mean of (f1, f2) is invisible to the transform
    if (withF1) d.f1 = gaussian_carrier(g, sigma, kappa, {}, 0.5 * kPi);
    if (withF2) {
        std::array<double, 3> c{0.1, -0.1, 0.05};
        SpatialField h = gaussian_carrier(g, sigma, kappa, c, 0.5 * kPi);
        for (std::size_t i = 0; i < h.size(); ++i) d.f2[i] = 0.5 * kappa * h[i];
    }
    return d;
}

}  // namespace

Report suite_adjoint(const ValidateConfig& cfg) {
    Report rep;
    const int trials = cfg.quick ? std::min(cfg.trials, 3) : cfg.trials;
    rep.set("trials", trials);
    {
        GridSpec g = cfg.quick ? grid(2, 64, 64, 3.0, 1.5, 0.75, 1.0) : grid(2, 128, 128, 3.0, 1.5, 0.75, 1.0);
        auto r = oracles::adjoint_test_lightray(g, make_chart_uniform(g, 64), trials, cfg.seed);
        rep.check_le("lightray.n2.max_deviation", r.maxDeviation, 1e-3);
    }
    {
        GridSpec g = cfg.quick ? grid(3, 24, 32, 2.0, 1.2, 0.6, 0.5) : grid(3, 48, 64, 2.0, 1.2, 0.6, 0.5);
        auto r = oracles::adjoint_test_lightray(g, make_chart_gl(g, 4, 8), trials, cfg.seed + 1000);
        rep.check_le("lightray.n3.max_deviation", r.maxDeviation, 1e-3);
    }
    {
        GridSpec g = grid(2, 64, 48, 3.0, 1.5, 0.75, 1.0);
        for (int sign : {1, -1}) {
            auto r = oracles::adjoint_test_halfwave(g, sign, 5, cfg.seed + 2000);
            rep.check_le(std::string("halfwave.") + (sign > 0 ? "plus" : "minus") + ".max_deviation",
                         r.maxDeviation, 1e-10);
        }
        // zero vectors
        ScalarField z(g);
        Sinogram Lz = ray_transform(z, make_chart_uniform(g, 16));
        rep.check("lightray.zero", l2_norm(Lz) == 0.0);
    }
    return rep;
}

Report suite_slice(const ValidateConfig& cfg) {
    Report rep;
    struct Case {
        GridSpec g;
        int dirs;
    };
    std::vector<std::pair<Case, Case>> cases = {
        {{grid(2, 64, 64, 3.0, 1.5, 0.75, 1.0), 16}, {grid(2, 128, 128, 3.0, 1.5, 0.75, 1.0), 32}},
        {{grid(3, 24, 24, 2.0, 1.2, 0.6, 0.5), 4}, {grid(3, 48, 48, 2.0, 1.2, 0.6, 0.5), 6}},
    };
    if (cfg.quick) cases.resize(1);
    for (auto& [base, fine] : cases) {
        double dev[2];
        const Case* cs[2] = {&base, &fine};
        for (int q = 0; q < 2; ++q) {
            const GridSpec& g = cs[q]->g;
            ScalarField f = gaussian_bump(g, 30.0, 4.0);
            RayChart chart = chart_for(g, cs[q]->dirs);
            double m = 0;
            for (std::size_t j = 0; j < chart.size(); ++j) m = std::max(m, fourier_slice_check(f, chart, j));
            dev[q] = m;
        }
        std::string k = dim(base.g.n);
        rep.set(k + ".base.max_deviation", dev[0]);
        rep.check_le(k + ".refined.max_deviation", dev[1], 1e-2);
        rep.check_le(k + ".refinement_ratio", dev[1] / dev[0], 0.5);
        ScalarField z(base.g);
        rep.check_le(k + ".zero", fourier_slice_check(z, chart_for(base.g, 2), 0), 0.0);
    }
    return rep;
}

Report suite_normal(const ValidateConfig& cfg) {
    Report rep;
    struct Case {
        GridSpec g;
        int dirs;
    };
    std::vector<std::pair<Case, Case>> cases = {
        {{grid(2, 64, 64, 2.0, 1.0, 0.6, 0.6), 32}, {grid(2, 128, 128, 2.0, 1.0, 0.6, 0.6), 64}},
        {{grid(3, 24, 16, 2.0, 1.0, 0.6, 0.6), 6}, {grid(3, 48, 32, 2.0, 1.0, 0.6, 0.6), 8}},
    };
    if (cfg.quick) cases.resize(1);
    for (auto& [base, fine] : cases) {
        const Case* cs[2] = {&base, &fine};
        double err[2], kerr[2] = {0, 0};
        for (int q = 0; q < 2; ++q) {
            const GridSpec& g = cs[q]->g;
            ScalarField f = gaussian_bump(g, 40.0, 3.0);
            ScalarField LsL = backproject(ray_transform(f, chart_for(g, cs[q]->dirs)), g);
            ScalarField Nf = apply_normal_multiplier(f);
            err[q] = rel_diff(LsL, Nf);
            if (g.n == 3) {
                // direct light-cone quadrature on a sparse deterministic subset of points
                std::vector<std::array<double, 4>> pts;
                std::vector<std::size_t> idx;
                const std::size_t stride = 997;
                for (int k = 0; k < g.Nt; k += 2)
                    for (std::size_t i = (k * 131) % stride; i < f.slice_size(); i += stride) {
                        auto x = position(g, i);
                        pts.push_back({g.t(k), x[0], x[1], x[2]});
                        idx.push_back(static_cast<std::size_t>(k) * f.slice_size() + i);
                    }
                auto K = normal_kernel_apply_n3(f, pts);
                double num = 0, den = 0;
                for (std::size_t p = 0; p < pts.size(); ++p) {
                    num += std::norm(K[p] - Nf.v[idx[p]]);
                    den += std::norm(Nf.v[idx[p]]);
                }
                kerr[q] = std::sqrt(num / den);
            }
        }
        std::string k = dim(base.g.n);
        rep.set(k + ".base.ray_vs_multiplier", err[0]);
        rep.check_le(k + ".refined.ray_vs_multiplier", err[1], 2e-2);
        rep.check(k + ".ray_vs_multiplier_decreases", err[1] < err[0]);
        if (base.g.n == 3) {
            rep.set(k + ".base.kernel_vs_multiplier", kerr[0]);
            rep.check_le(k + ".refined.kernel_vs_multiplier", kerr[1], 5e-2);
            rep.check(k + ".kernel_vs_multiplier_decreases", kerr[1] < kerr[0]);
        }
    }
    {
        // symmetry <Nf, g> = <f, Ng>
        GridSpec g = grid(2, 32, 32, 2.0, 1.0, 0.5, 0.5);
        ScalarField f = oracles::random_smooth_field(g, cfg.seed, 0.0, 1.0, 0.5, 0.3);
        ScalarField h = oracles::random_smooth_field(g, cfg.seed + 1, 0.0, 1.0, 0.5, 0.3);
        cplx a = inner(apply_normal_multiplier(f), h), b = inner(f, apply_normal_multiplier(h));
        rep.check_le("symmetry", std::abs(a - b) / std::max(std::abs(a), 1e-300), 1e-10);
        ScalarField z(g);
        rep.check("zero", l2_norm(apply_normal_multiplier(z)) == 0.0);
    }
    return rep;
}

Report suite_symbols(const ValidateConfig& cfg) {
    Report rep;
    const int grid20 = cfg.quick ? 6 : 20;
    for (int n : {3, 5}) {
        double worst = 0;
        const double scale = symbol_A_scale(1.0, n);
        for (int i = 0; i < grid20; ++i)
            for (int j = 0; j < grid20; ++j) {
                double sigma = 0.05 * std::pow(400.0, i / (grid20 - 1.0));
                double r = 0.1 * std::pow(200.0, j / (grid20 - 1.0));
                cplx a = symbol_A(sigma, r, n), b = symbol_A_quad(sigma, r, n);
                worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), scale));
            }
        rep.check_le("A." + dim(n) + ".closed_vs_quadrature", worst, 1e-8);
    }
    {
        double worst = 0;
        for (double r : {0.5, 1.0, 3.0, 10.0})
            worst = std::max(worst, std::abs(symbol_A(kPi / r, r, 3)) / symbol_A_scale(r, 3));
        rep.check_le("A.n3.zero_at_pi", worst, 1e-10);
        rep.check_le("A.n3.limit_zero_sigma", std::abs(symbol_A(0.0, 2.0, 3) - 8.0 * kPi * kPi) / (8.0 * kPi * kPi),
                     1e-12);
    }
    rep.check_le("k.n3.tau0", std::abs(k_symbol(0.0, 1.0, 3) - 4.0 * kPi * kPi), 1e-12);
    rep.check_le("k.n3.timelike", std::abs(k_symbol(2.0, 1.0, 3)), 0.0);
    rep.check_le("k.n2.tau0", std::abs(k_symbol(0.0, 2.0, 2) - 2.0 * kPi), 1e-12);
    for (int n : {3, 5}) {
        TimeCutoff chi;
        chi.t1 = 0.5;
        chi.T = 2.0;
        chi.eps = 0.05;
        const double eta = 7.0;
        cplx q0 = oracles::quad2d_c0_oracle(chi, eta, n, 0);
        cplx q1 = oracles::quad2d_c0_oracle(chi, eta, n, 1);
        cplx c = leading_symbol_c0(eta, chi, n);
        std::string k = "c0." + dim(n);
        rep.check_le(k + ".rule_agreement", std::abs(q0 - q1) / std::abs(q0), 1e-8);
        rep.check_le(k + ".closed_inner_vs_quadrature", std::abs(c - q0) / std::abs(q0), 1e-8);
        rep.check(k + ".nonzero", std::abs(c) > 0.0);
        // C_n / i times a positive integral: i c0 > 0
        rep.check(k + ".orientation", (I * c).real() > 0.0);
        int m = (n - 3) / 2;
        cplx ratio = leading_symbol_c0(2.0 * eta, chi, n) / c;
        rep.check_le(k + ".homogeneity", std::abs(ratio - std::pow(2.0, -(m + 1))), 1e-14);
    }
    return rep;
}

Report suite_wave(const ValidateConfig& cfg) {
    Report rep;
    (void)cfg;
    GridSpec g = grid(2, 32, 32, 4.0, 1.0, 0.5, 0.5);
    {
        // plane waves through E+ and the flat solver
        std::array<double, 3> xi0{g.dxi() * 3, g.dxi() * -2, 0};
        double r = std::hypot(xi0[0], xi0[1]);
        SpatialField h(g);
        for (std::size_t i = 0; i < h.size(); ++i) {
            auto x = position(g, i);
            h[i] = std::exp(I * (x[0] * xi0[0] + x[1] * xi0[1]));
        }
        CauchyData d(g);
        d.f1 = h;
        for (std::size_t i = 0; i < h.size(); ++i) d.f2[i] = I * r * h[i];
        ScalarField up = half_wave(h, 1, g);
        ScalarField u = solve_cauchy_flat(d, g);
        double e1 = 0, e2 = 0;
        for (int k = 0; k < g.Nt; ++k)
            for (std::size_t i = 0; i < h.size(); ++i) {
                cplx ex = h[i] * std::exp(I * (r * g.t(k)));
                e1 = std::max(e1, std::abs(up.slice(k)[i] - ex));
                e2 = std::max(e2, std::abs(u.slice(k)[i] - ex));
            }
        rep.check_le("plane_wave.half_wave", e1, 1e-12);
        rep.check_le("plane_wave.flat", e2, 1e-12);
    }
    {
        // energy ||u_t||^2 + ||grad u||^2 along the flat evolution
        CauchyData d(g);
        d.f1 = gaussian_carrier(g, 0.4, 3.0);
        SpatialField f2 = gaussian_carrier(g, 0.3, 2.0, {0.2, 0.1, 0});
        d.f2 = f2;
        ScalarField u = solve_cauchy_flat(d, g), ut = solve_cauchy_flat_dt(d, g);
        fft_slices(u);
        fft_slices(ut);
        double E0 = 0, drift = 0;
        for (int k = 0; k < g.Nt; ++k) {
            double E = 0;
            for (std::size_t i = 0; i < g.spatial_size(); ++i)
                E += std::norm(ut.slice(k)[i]) + frequency_norm2(g, i) * std::norm(u.slice(k)[i]);
            if (k == 0) E0 = E;
            drift = std::max(drift, std::abs(E - E0) / E0);
        }
        rep.check_le("energy.drift", drift, 1e-10);
    }
    {
        // constant coefficients: residual of P on the sampled spectrum and the initial traces
        WaveCoefficients c;
        c.A = {0.2, 0.1, -0.15};
        c.B = 0.1;
        CauchyData d(g);
        d.f1 = gaussian_carrier(g, 0.4, 3.0);
        d.f2 = gaussian_carrier(g, 0.35, 2.0, {0.1, 0.2, 0});
        ConstCauchySolver solver(d, c);
        double worst = 0;
        for (double t : {0.0, 0.3, 0.77, 1.0}) {
            Spectrum u0 = solver.spectrum_at(t, 0), u1 = solver.spectrum_at(t, 1), u2 = solver.spectrum_at(t, 2);
            double num = 0, den = 0;
            for (std::size_t i = 0; i < u0.size(); ++i) {
                auto xi = frequency(g, i);
                cplx p = -u2[i] - frequency_norm2(g, i) * u0[i] + c.a(0) * u1[i] + c.B * u0[i];
                for (int j = 1; j <= g.n; ++j) p += c.a(j) * I * xi[j - 1] * u0[i];
                num += std::norm(p);
                den += std::norm(u0[i]);
            }
            worst = std::max(worst, std::sqrt(num / den));
        }
        rep.check_le("const.residual", worst, 1e-8);
        SpatialField a0 = ifft_spatial(solver.spectrum_at(0.0, 0)), a1 = ifft_spatial(solver.spectrum_at(0.0, 1));
        rep.check_le("const.trace_f1", relative_error(a0, d.f1), 1e-8);
        rep.check_le("const.trace_f2", relative_error(a1, d.f2), 1e-8);
        // A = 0, B = 0 reduces to the flat solver
        ScalarField uf = solve_cauchy_flat(d, g);
        ScalarField uc = solve_cauchy_const(d, WaveCoefficients{}, g).u;
        rep.check_le("const.reduces_to_flat", relative_error(uc, uf), 1e-12);
    }
    {
        // source solver against the ODE oracle, mode by mode
        GridSpec gs = grid(2, 16, 512, 4.0, 2.0, 1.0, 0.5);
        const double wa = 0.1, wb = 0.9;
        double worst = 0;
        for (int q = 0; q < 3; ++q) {
            std::array<double, 3> xi0{gs.dxi() * (q + 1), gs.dxi() * (q == 2 ? 0 : 2 - q), 0};
            double r = std::hypot(xi0[0], xi0[1]);
            ScalarField f(gs);
            for (int k = 0; k < gs.Nt; ++k)
                for (std::size_t i = 0; i < f.slice_size(); ++i) {
                    auto x = position(gs, i);
                    f.slice(k)[i] = bump(gs.t(k), wa, wb) * std::exp(I * (x[0] * xi0[0] + x[1] * xi0[1]));
                }
            ScalarField u = solve_source_flat(f);
            std::vector<double> times;
            for (int k = 0; k < gs.Nt; ++k) times.push_back(gs.t(k));
            auto ref = oracles::ode_mode_oracle([&](double t) { return cplx(bump(t, wa, wb)); }, r, times, 2e-4);
            double umax = 0, err = 0;
            const std::size_t origin = gs.spatial_size() / 2 + gs.Nx / 2;  // x = 0
            for (int k = 0; k < gs.Nt; ++k) {
                // the mode amplitude is the value at x = 0
                cplx v = u.slice(k)[origin];
                umax = std::max(umax, std::abs(ref[k]));
                err = std::max(err, std::abs(v - ref[k]));
            }
            worst = std::max(worst, err / umax);
        }
        rep.check_le("source.vs_ode", worst, 1e-8);
    }
    return rep;
}

Report suite_transport(const ValidateConfig& cfg) {
    Report rep;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> sGrid;
    for (int q = 0; q <= 20; ++q) sGrid.push_back(0.05 * q);
    const int samples = cfg.quick ? 10 : 50;
    int violations = 0;
    GridSpec g = grid(2, 16, 9, 2.0, 1.0, 0.5, 0.5);
    for (int q = 0; q < samples; ++q) {
        WaveCoefficients c;
        if (q % 2 == 0) {
            c.A = {U(rng), U(rng), U(rng)};
        } else {
            // smooth variable fields
            std::vector<ScalarField> A;
            for (int j = 0; j <= 2; ++j) {
                ScalarField F(g);
                double a = U(rng), kx = 2.0 * U(rng), ky = 2.0 * U(rng), kt = 2.0 * U(rng);
                for (int k = 0; k < g.Nt; ++k)
                    for (std::size_t i = 0; i < F.slice_size(); ++i) {
                        auto x = position(g, i);
                        F.slice(k)[i] = a * std::cos(kx * x[0] + ky * x[1] + kt * g.t(k));
                    }
                A.push_back(std::move(F));
            }
            c.variableA = std::move(A);
        }
        double ang = kPi * U(rng);
        std::array<double, 3> theta{std::cos(ang), std::sin(ang), 0}, x0{0.5 * U(rng), 0.5 * U(rng), 0};
        for (int branch : {1, -1})
            for (int k : {1, 2}) {
                auto e = transport_symbol(c, x0, theta, branch, k, sGrid, 2);
                double want = (k == 2 && branch < 0) ? -1.0 : 1.0;
                for (double v : e)
                    if (!(v * want > 0.0)) ++violations;
            }
    }
    rep.set("samples", samples);
    rep.check("sign_pattern", violations == 0);
    {
        WaveCoefficients c;
        c.A = {1.0, 0.0, 0.0};
        auto e = transport_symbol(c, {0, 0, 0}, {1, 0, 0}, 1, 1, sGrid, 2);
        double err = 0;
        for (std::size_t q = 0; q < sGrid.size(); ++q) err = std::max(err, std::abs(e[q] - std::exp(sGrid[q])));
        rep.check_le("constant_A0.exponential", err, 1e-10);
        auto z = transport_symbol(WaveCoefficients{}, {0, 0, 0}, {0, 1, 0}, -1, 2, sGrid, 2);
        double dz = 0;
        for (double v : z) dz = std::max(dz, std::abs(v + 1.0));
        rep.check_le("zero_A.constant", dz, 0.0);
    }
    return rep;
}

Report suite_ellipticity(const ValidateConfig& cfg) {
    Report rep;
    std::vector<GridSpec> grids = {grid(2, 128, 128, 3.6, 2.0, 0.6, 1.0), grid(3, 48, 32, 2.0, 1.2, 0.3, 0.4)};
    if (cfg.quick) grids = {grid(2, 64, 64, 3.6, 2.0, 0.6, 1.0), grid(3, 24, 24, 2.0, 1.2, 0.3, 0.4)};
    for (const GridSpec& g : grids) {
        std::string k = dim(g.n);
        auto mpp = measure_multiplier(Pipeline::parse("E+*.chi.N.1.E+"), g);
        auto mmm = measure_multiplier(Pipeline::parse("E-*.chi.N.1.E-"), g);
        double lowest = INFINITY, orient = INFINITY, conjDev = 0;
        for (std::size_t i = 0; i < g.spatial_size(); ++i) {
            double r = std::sqrt(frequency_norm2(g, i));
            if (!in_band(g, r)) continue;
            lowest = std::min({lowest, std::abs(mpp.m[i]) / mpp.mMin, std::abs(mmm.m[i]) / mmm.mMin});
            orient = std::min(orient, (I * mpp.m[i]).real() / std::abs(mpp.m[i]));
            conjDev = std::max(conjDev, std::abs(mmm.m[i] - std::conj(mpp.m[i])) / std::abs(mpp.m[i]));
        }
        rep.check_ge(k + ".band.min_over_mmin", lowest, 1.0);
        rep.set(k + ".conjugate_symmetry", conjDev);
        if (g.n == 3) {
            // i m++ > 0: the leading symbol is C_n / i times a positive integral
            rep.check_ge(k + ".orientation.min", orient, 0.0);
            // leading symbol: m++ = c0 / (2 pi) + O(|xi|^-2), the 2 pi from the time-kernel normalization of N
            TimeCutoff chi = TimeCutoff::for_grid(g);
            double dev[2];
            const double fracs[2] = {0.125, 0.25};
            for (int q = 0; q < 2; ++q) {
                int m = static_cast<int>(std::lround(fracs[q] * g.nyquist() / g.dxi()));
                std::size_t idx = static_cast<std::size_t>(m) * g.Nx * g.Nx;
                double r = m * g.dxi();
                dev[q] = std::abs(2.0 * kPi * mpp.m[idx] / leading_symbol_c0(r, chi, 3) - 1.0);
                rep.set(k + ".c0.eta_" + std::to_string(m) + ".rel_deviation", dev[q]);
            }
            rep.check(k + ".c0.deviation_decreases", dev[1] < dev[0]);
            rep.check_le(k + ".c0.top_of_band", dev[1], 0.05);
        }
        // sign structure of the constant-coefficient chains
        WaveCoefficients c;
        c.A = {0.2};
        c.B = 0.1;
        auto m11p = measure_multiplier(Pipeline::parse("E1+*.chi.N.1.E1+"), g, c).m;
        auto m12p = measure_multiplier(Pipeline::parse("E1+*.chi.N.1.E2+"), g, c).m;
        auto m11m = measure_multiplier(Pipeline::parse("E1-*.chi.N.1.E1-"), g, c).m;
        auto m12m = measure_multiplier(Pipeline::parse("E1-*.chi.N.1.E2-"), g, c).m;
        double pmin = INFINITY, mmax = -INFINITY;
        for (std::size_t i = 0; i < g.spatial_size(); ++i) {
            double r = std::sqrt(frequency_norm2(g, i));
            if (!in_band(g, r)) continue;
            pmin = std::min(pmin, (I * r * m12p[i] / m11p[i]).real());
            mmax = std::max(mmax, (I * r * m12m[i] / m11m[i]).real());
        }
        rep.check_ge(k + ".sign.plus_min", pmin, 0.0);
        rep.check_le(k + ".sign.minus_max", mmax, 0.0);
    }
    return rep;
}

Report suite_crossterm(const ValidateConfig& cfg) {
    Report rep;
    GridSpec g = cfg.quick ? grid(3, 32, 64, 1.5, 1.0, 0.3, 0.3) : grid(3, 48, 128, 1.5, 1.0, 0.3, 0.3);
    std::vector<double> kappas = cfg.quick ? std::vector<double>{4, 8, 16} : std::vector<double>{4, 8, 16, 32};
    std::vector<double> ratio;
    for (double k : kappas) {
        ratio.push_back(cross_term_probe(k, g, 0.25));
        rep.set("ratio.kappa_" + std::to_string(static_cast<int>(k)), ratio.back());
    }
    rep.check("ratio.nonnegative", *std::min_element(ratio.begin(), ratio.end()) >= 0.0);
    for (std::size_t q = 1; q + 1 < ratio.size(); ++q)
        rep.check_ge("octave_factor.kappa_" + std::to_string(static_cast<int>(kappas[q])), ratio[q] / ratio[q + 1],
                     2.0);
    return rep;
}

namespace {

struct CauchyCase {
    GridSpec g;
    int dirs;
    double sigma, kappa;
};

Sinogram cauchy_sinogram(const CauchyCase& cs, const CauchyData& d, const WaveCoefficients* c) {
    ScalarField u = c ? solve_cauchy_const(d, *c, cs.g).u : solve_cauchy_flat(d, cs.g);
    return ray_transform(u, chart_for(cs.g, cs.dirs));
}

}  // namespace

Report suite_cauchy(const ValidateConfig& cfg) {
    Report rep;
    std::vector<std::pair<CauchyCase, CauchyCase>> cases = {
        {{grid(2, 64, 64, 3.6, 2.0, 0.6, 1.0), 48, 0.35, 6.0}, {grid(2, 128, 128, 3.6, 2.0, 0.6, 1.0), 96, 0.35, 6.0}},
        {{grid(3, 32, 16, 2.5, 1.2, 0.3, 0.4), 3, 0.35, 4.0}, {grid(3, 64, 32, 2.5, 1.2, 0.3, 0.4), 6, 0.35, 4.0}},
    };
    if (cfg.quick) cases.resize(1);
    WaveCoefficients c;
    c.A = {0.2};
    c.B = 0.1;
    for (auto& [base, fine] : cases) {
        const std::string k = dim(fine.g.n);
        // refinement study on the model pipeline
        double errs[2];
        const CauchyCase* cs[2] = {&base, &fine};
        for (int q = 0; q < 2; ++q) {
            CauchyData d = carrier_data(cs[q]->g, cs[q]->sigma, cs[q]->kappa, true, true);
            auto rec = reconstruct_cauchy_model(cauchy_sinogram(*cs[q], d, nullptr), cs[q]->g, {}, &d);
            errs[q] = relative_error(rec.data.f1, d.f1) + relative_error(rec.data.f2, d.f2);
            if (q == 1) {
                rep.check_le(k + ".model.f1.rel_error", relative_error(rec.data.f1, d.f1), 0.05);
                rep.check_le(k + ".model.f2.rel_error", relative_error(rec.data.f2, d.f2), 0.05);
                rep.set(k + ".model.band.admitted_fraction", *rec.report.find("band.admitted_fraction"));
            }
        }
        rep.set(k + ".model.base.error_sum", errs[0]);
        rep.check(k + ".model.refinement_decreases", errs[1] < errs[0]);

        const CauchyCase& cs1 = fine;
        {
            CauchyData d = carrier_data(cs1.g, cs1.sigma, cs1.kappa, true, true);
            auto rec = reconstruct_cauchy_const(cauchy_sinogram(cs1, d, &c), cs1.g, c, {}, &d);
            rep.check_le(k + ".const.f1.rel_error", relative_error(rec.data.f1, d.f1), 0.10);
            rep.check_le(k + ".const.f2.rel_error", relative_error(rec.data.f2, d.f2), 0.10);
        }
        {
            CauchyData d = carrier_data(cs1.g, cs1.sigma, cs1.kappa, false, true);
            Sinogram S = cauchy_sinogram(cs1, d, nullptr);
            auto rec = reconstruct_cauchy_model(S, cs1.g, {}, &d);
            rep.check_le(k + ".crosstalk.f1_over_f2", std::stod(*rec.report.find("crosstalk.f1_over_f2")), 0.02);
            // restriction variant against the model error on the same data
            double Tt = 0.5 * (cs1.g.t1_grid() + cs1.g.T);
            auto rr = reconstruct_cauchy_restriction(S, cs1.g, Tt, {}, &d);
            double em = relative_error(rec.data.f2, d.f2), er = relative_error(rr.data.f2, d.f2);
            rep.set(k + ".restriction.f2.rel_error", er);
            rep.check_le(k + ".restriction.vs_model", er / std::max(em, 1e-3), 2.0);
        }
    }
    return rep;
}

namespace {

// f(t, x) = w(t) psi(x) cos(kappa x1) with a Gaussian w centred in the data window
ScalarField source_probe(const GridSpec& g, double kappa, double sigmaX, bool timelike) {
    ScalarField f(g);
    const double tc = 0.5 * g.t1_grid(), st = g.t1_grid() / 6.0;
    for (int k = 0; k < g.Nt; ++k) {
        double t = g.t(k);
        double w = std::exp(-0.5 * (t - tc) * (t - tc) / (st * st));
        for (std::size_t i = 0; i < f.slice_size(); ++i) {
            auto x = position(g, i);
            double r2 = 0;
            for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
            double psi = std::exp(-0.5 * r2 / (sigmaX * sigmaX));
            f.slice(k)[i] = timelike ? w * std::cos(kappa * (t - tc)) * psi : w * psi * std::cos(kappa * x[0]);
        }
    }
    return f;
}

}  // namespace

Report suite_source(const ValidateConfig& cfg) {
    Report rep;
    GridSpec g = cfg.quick ? grid(2, 128, 64, 4.0, 2.0, 1.96, 1.0) : grid(2, 256, 128, 4.0, 2.0, 1.96, 1.0);
    RayChart chart = make_chart_uniform(g, cfg.quick ? 96 : 200);
    std::vector<double> kappas = cfg.quick ? std::vector<double>{8} : std::vector<double>{8, 16};
    std::vector<double> errs;
    for (double kappa : kappas) {
        ScalarField f = source_probe(g, kappa, 0.5, false);
        auto rec = reconstruct_source(ray_transform(solve_source_flat(f), chart), g, {}, &f);
        double e = std::stod(*rec.report.find("error.rel"));
        errs.push_back(e);
        const std::string key = "spacelike.kappa_" + std::to_string(static_cast<int>(kappa)) + ".rel_error";
        if (kappa == 16.0) rep.check_le(key, e, 0.10);
        else rep.set(key, e);
    }
    if (!cfg.quick) rep.check("spacelike.error_decreases", errs[1] < errs[0]);
    {
        ScalarField f = source_probe(g, 16.0, 0.5, true);
        auto rec = reconstruct_source(ray_transform(solve_source_flat(f), chart), g, {}, &f);
        double ratio = l2_norm(rec.f) / l2_norm(f);
        rep.check_le("timelike.energy_ratio", ratio * ratio, 0.10);
    }
    {
        ScalarField z(g);
        auto rec = reconstruct_source(ray_transform(z, chart), g);
        rep.check("zero", l2_norm(rec.f) == 0.0);
    }
    return rep;
}

Report suite_stability(const ValidateConfig& cfg) {
    Report rep;
    StabilityOptions opt;
    opt.seed = cfg.seed;
    opt.samplesPerBand = cfg.quick ? 2 : 7;
    {
        GridSpec g = cfg.quick ? grid(2, 96, 16, 2.5, 1.0, 0.5, 1.0) : grid(2, 128, 32, 2.5, 1.0, 0.5, 1.0);
        Report r = stability_ratio(g, opt);
        rep.merge("n2", r);
        rep.check_le("n2.max_over_min", std::stod(*r.find("ratio.max_over_min")), 2.0);
    }
    if (!cfg.quick) {
        GridSpec g = grid(3, 64, 16, 3.0, 1.0, 0.5, 1.4);
        StabilityOptions o3 = opt;
        o3.samplesPerBand = 4;
        o3.nTheta = 8;
        Report r = stability_ratio(g, o3);
        rep.merge("n3", r);
        rep.check_le("n3.max_over_min", std::stod(*r.find("ratio.max_over_min")), 2.0);
    }
    return rep;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"adjoint",   "slice",     "normal", "symbols",
                                                   "wave",      "ellipticity", "transport", "crossterm",
                                                   "cauchy",    "source",    "stability"};
    return names;
}

bool is_suite(const std::string& name) {
    const auto& v = suite_names();
    return name == "all" || std::find(v.begin(), v.end(), name) != v.end();
}

Report run_suite(const std::string& name, const ValidateConfig& cfg) {
    if (name == "all") {
        Report rep;
        for (const auto& s : suite_names()) rep.merge(s, run_suite(s, cfg));
        return rep;
    }
    if (name == "adjoint") return suite_adjoint(cfg);
    if (name == "slice") return suite_slice(cfg);
    if (name == "normal") return suite_normal(cfg);
    if (name == "symbols") return suite_symbols(cfg);
    if (name == "wave") return suite_wave(cfg);
    if (name == "ellipticity") return suite_ellipticity(cfg);
    if (name == "transport") return suite_transport(cfg);
    if (name == "crossterm") return suite_crossterm(cfg);
    if (name == "cauchy") return suite_cauchy(cfg);
    if (name == "source") return suite_source(cfg);
    if (name == "stability") return suite_stability(cfg);
    throw ContractError("unknown suite: " + name);
}

}  // namespace minkray
