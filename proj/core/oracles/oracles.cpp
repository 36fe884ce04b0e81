#include "minkray/oracles.hpp"

#include "minkray/wave.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <random>

namespace minkray::oracles {

namespace {
using GK = boost::math::quadrature::gauss_kronrod<double, 21>;

double rel_dev(cplx a, cplx b, double scale) { return scale > 0 ? std::abs(a - b) / scale : std::abs(a - b); }
}  // namespace

cplx ray_quadrature_oracle(const SpacetimeFn& f, const std::array<double, 3>& y, const std::array<double, 3>& theta,
                           double s0, double s1, int n, double tol) {
    auto point = [&](double s) {
        std::array<double, 3> x{};
        for (int d = 0; d < n; ++d) x[d] = y[d] + s * theta[d];
        return f(s, x);
    };
    // panels keep the adaptive rule away from deep recursion on peaked integrands
    const int panels = 16;
    double h = (s1 - s0) / panels, re = 0, im = 0;
    for (int p = 0; p < panels; ++p) {
        double a = s0 + p * h, b = a + h;
        re += GK::integrate([&](double s) { return point(s).real(); }, a, b, 20, tol);
        im += GK::integrate([&](double s) { return point(s).imag(); }, a, b, 20, tol);
    }
    return {re, im};
}

double gaussian_ray_integral(double alpha, double beta, double tc, const std::array<double, 3>& y,
                             const std::array<double, 3>& theta, double s0, double s1, int n) {
    // exponent -(A s^2 - 2 B s + C)
    double yy = 0, yt = 0, tt = 0;
    for (int d = 0; d < n; ++d) {
        yy += y[d] * y[d];
        yt += y[d] * theta[d];
        tt += theta[d] * theta[d];
    }
    double A = alpha + beta * tt;
    double B = alpha * tc - beta * yt;
    double C = alpha * tc * tc + beta * yy;
    double m = B / A;
    double pref = std::exp(-(C - B * B / A)) * 0.5 * std::sqrt(kPi / A);
    double sa = std::sqrt(A);
    return pref * (std::erf(sa * (s1 - m)) - std::erf(sa * (s0 - m)));
}

namespace {

struct Bump {
    std::array<double, 4> c;
    double amp, phase;
    std::array<double, 3> k;
};

std::vector<Bump> draw_bumps(std::mt19937_64& rng, int count, int n, double tMin, double tMax, double radius,
                             double width) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<Bump> out;
    for (int q = 0; q < count; ++q) {
        Bump b{};
        b.c[0] = 0.5 * (tMin + tMax) + 0.5 * (tMax - tMin) * U(rng);
        for (int d = 0; d < n; ++d) b.c[1 + d] = radius * U(rng);
        b.amp = U(rng);
        b.phase = kPi * U(rng);
        for (int d = 0; d < n; ++d) b.k[d] = 1.5 / width * U(rng);
        out.push_back(b);
    }
    (void)width;
    return out;
}

}  // namespace

ScalarField random_smooth_field(const GridSpec& g, std::uint64_t seed, double tMin, double tMax, double radius,
                                double width) {
    std::mt19937_64 rng(seed);
    // time profile width keeps the bumps inside [tMin, tMax]
    double tw = 0.15 * (tMax - tMin);
    auto bumps = draw_bumps(rng, 4, g.n, tMin + 3.5 * tw, tMax - 3.5 * tw, radius, width);
    ScalarField f(g);
    const int N = g.Nx;
    // each bump factors into per-axis terms
    for (const auto& b : bumps) {
        std::vector<std::vector<cplx>> ax(g.n, std::vector<cplx>(N));
        for (int d = 0; d < g.n; ++d)
            for (int j = 0; j < N; ++j) {
                double x = g.x(j), e = (x - b.c[1 + d]) * (x - b.c[1 + d]) / (2 * width * width);
                ax[d][j] = std::exp(-e) * std::exp(cplx(0, b.k[d] * x));
            }
        const cplx ph = b.amp * std::exp(cplx(0, b.phase));
        for (int k = 0; k < g.Nt; ++k) {
            double t = g.t(k), et = std::exp(-(t - b.c[0]) * (t - b.c[0]) / (2 * tw * tw));
            if (et < 1e-300) continue;
            cplx* s = f.slice(k);
            cplx a0 = ph * et;
            if (g.n == 2) {
                for (int i0 = 0; i0 < N; ++i0) {
                    cplx a1 = a0 * ax[0][i0];
                    for (int i1 = 0; i1 < N; ++i1) s[i0 * N + i1] += a1 * ax[1][i1];
                }
            } else {
                for (int i0 = 0; i0 < N; ++i0)
                    for (int i1 = 0; i1 < N; ++i1) {
                        cplx a2 = a0 * ax[0][i0] * ax[1][i1];
                        cplx* row = s + (static_cast<std::size_t>(i0) * N + i1) * N;
                        for (int i2 = 0; i2 < N; ++i2) row[i2] += a2 * ax[2][i2];
                    }
            }
        }
    }
    return f;
}

Sinogram random_smooth_sinogram(const RayChart& chart, std::uint64_t seed, double radius, double width) {
    const GridSpec& g = chart.ySpec;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Sinogram S(chart);
    // smooth in y, smooth in theta via a low-order dependence on the direction
    std::array<double, 3> c{}, a{};
    for (int d = 0; d < g.n; ++d) {
        c[d] = radius * U(rng);
        a[d] = U(rng);
    }
    double phase = kPi * U(rng);
    for (std::size_t j = 0; j < chart.size(); ++j) {
        double ta = 0;
        for (int d = 0; d < g.n; ++d) ta += a[d] * chart.directions[j][d];
        for (std::size_t i = 0; i < S.row_size(); ++i) {
            auto y = position(g, i);
            double e = 0;
            for (int d = 0; d < g.n; ++d) e += (y[d] - c[d]) * (y[d] - c[d]);
            S.row(j)[i] = std::exp(-e / (2 * width * width)) * std::exp(cplx(0, phase + ta + 2.0 * y[0]));
        }
    }
    return S;
}

SpatialField random_smooth_spatial(const GridSpec& g, std::uint64_t seed, double radius, double width) {
    std::mt19937_64 rng(seed);
    auto bumps = draw_bumps(rng, 4, g.n, 0.0, 0.0, radius, width);
    SpatialField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto x = position(g, i);
        cplx acc = 0;
        for (const auto& b : bumps) {
            double e = 0, ph = b.phase;
            for (int d = 0; d < g.n; ++d) {
                e += (x[d] - b.c[1 + d]) * (x[d] - b.c[1 + d]) / (2 * width * width);
                ph += b.k[d] * x[d];
            }
            acc += b.amp * std::exp(-e) * std::exp(cplx(0, ph));
        }
        f[i] = acc;
    }
    return f;
}

AdjointResult adjoint_test_lightray(const GridSpec& g, const RayChart& chart, int trials, std::uint64_t seed) {
    AdjointResult res;
    const double t1 = g.t1_grid();
    const double radius = 0.3 * std::max(0.0, g.Lx - t1);
    for (int q = 0; q < trials; ++q) {
        ScalarField f = random_smooth_field(g, seed + 2 * q, 0.0, t1, radius, 0.25);
        // rays only see [0, t1]; the pairing uses f restricted there
        for (int k = g.t1_index() + 1; k < g.Nt; ++k)
            std::fill(f.slice(k), f.slice(k) + f.slice_size(), cplx(0.0));
        Sinogram h = random_smooth_sinogram(chart, seed + 2 * q + 1, radius, 0.35);
        Sinogram Lf = ray_transform(f, chart);
        ScalarField Lsh = backproject(h, g, 0, g.t1_index() + 1);
        // <f, L*h> over [0, t1] with the trapezoid matching the ray rule
        cplx rhs = 0;
        const int k1 = g.t1_index();
        for (int k = 0; k <= k1; ++k) {
            double w = (k == 0 || k == k1) ? 0.5 * g.dt() : g.dt();
            cplx sk = 0;
            for (std::size_t i = 0; i < f.slice_size(); ++i) sk += f.slice(k)[i] * std::conj(Lsh.slice(k)[i]);
            rhs += w * sk;
        }
        rhs *= g.cell_volume();
        cplx lhs = inner(Lf, h);
        double dev = rel_dev(lhs, rhs, l2_norm(Lf) * l2_norm(h));
        res.deviations.push_back(dev);
        res.maxDeviation = std::max(res.maxDeviation, dev);
    }
    return res;
}

AdjointResult adjoint_test_halfwave(const GridSpec& g, int sign, int trials, std::uint64_t seed) {
    AdjointResult res;
    for (int q = 0; q < trials; ++q) {
        SpatialField h = random_smooth_spatial(g, seed + 2 * q, 0.3 * g.Lx, 0.3);
        ScalarField v = random_smooth_field(g, seed + 2 * q + 1, 0.0, g.T, 0.3 * g.Lx, 0.3);
        ScalarField Eh = half_wave(h, sign, g);
        SpatialField Ev = half_wave_adjoint(v, sign, std::vector<double>(g.Nt, 1.0));
        cplx lhs = inner(Eh, v);
        cplx rhs = 0;
        for (std::size_t i = 0; i < h.size(); ++i) rhs += h[i] * std::conj(Ev[i]);
        rhs *= g.cell_volume();
        double dev = rel_dev(lhs, rhs, l2_norm(Eh) * l2_norm(v));
        res.deviations.push_back(dev);
        res.maxDeviation = std::max(res.maxDeviation, dev);
    }
    return res;
}

std::vector<cplx> ode_mode_oracle(const std::function<cplx(double)>& w, double r, const std::vector<double>& times,
                                  double step) {
    // y = (u, u'), y' = (u', -r^2 u - w)
    std::vector<cplx> out;
    out.reserve(times.size());
    double t = 0;
    cplx u = 0, v = 0;
    auto rhs = [&](double tt, cplx uu, cplx vv, cplx& du, cplx& dv) {
        du = vv;
        dv = -r * r * uu - w(tt);
    };
    for (double target : times) {
        if (target < t) throw ContractError("ode_mode_oracle: times must be increasing");
        int steps = static_cast<int>(std::ceil((target - t) / step - 1e-12));
        double h = steps > 0 ? (target - t) / steps : 0.0;
        for (int s = 0; s < steps; ++s) {
            cplx k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
            rhs(t, u, v, k1u, k1v);
            rhs(t + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
            rhs(t + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
            rhs(t + h, u + h * k3u, v + h * k3v, k4u, k4v);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            t += h;
        }
        out.push_back(u);
    }
    return out;
}

cplx quad2d_c0_oracle(const TimeCutoff& chi, double eta, int n, int rule) {
    if (n < 3 || n % 2 == 0) throw ContractError("quad2d_c0_oracle: odd n >= 3 only");
    const double m1 = 0.5 * (n - 3) + 1.0;
    const double t1 = chi.t1;
    // 2 pi |S^{n-2}|, |S^{k-1}| = 2 pi^{k/2} / Gamma(k/2)
    const double Cn = 2.0 * kPi * 2.0 * std::pow(kPi, 0.5 * (n - 1)) / std::tgamma(0.5 * (n - 1));
    auto integrand = [&](double t, double tp) { return chi(t) / std::pow(t - tp, m1); };
    double val;
    if (rule == 0) {
        boost::math::quadrature::tanh_sinh<double> ts;
        auto outer = [&](double t) {
            return ts.integrate([&](double tp) { return integrand(t, tp); }, 0.0, t1, 1e-13);
        };
        val = ts.integrate(outer, chi.lo(), chi.hi(), 1e-12);
    } else {
        auto outer = [&](double t) {
            return GK::integrate([&](double tp) { return integrand(t, tp); }, 0.0, t1, 10, 1e-13);
        };
        // split the outer range so the adaptive rule resolves both bump flanks
        const int panels = 8;
        double h = (chi.hi() - chi.lo()) / panels;
        val = 0;
        for (int p = 0; p < panels; ++p)
            val += GK::integrate(outer, chi.lo() + p * h, chi.lo() + (p + 1) * h, 10, 1e-12);
    }
    // C_n / (i (t - t')^{m+1}) |eta|^{-m-1}
    return cplx(0.0, -1.0) * Cn * std::pow(eta, -m1) * val;
}

double gaussian_normal_oracle(double a, double tc, double t, const std::array<double, 3>& x, int n, int nodes) {
    double xx = 0;
    for (int d = 0; d < n; ++d) xx += x[d] * x[d];
    auto along = [&](const std::array<double, 3>& th) {
        double tx = 0;
        for (int d = 0; d < n; ++d) tx += th[d] * x[d];
        double q = (t - tc) * (t - tc) + xx - 0.5 * (t - tc + tx) * (t - tc + tx);
        return std::sqrt(kPi / (2.0 * a)) * std::exp(-a * q);
    };
    double acc = 0;
    if (n == 2) {
        for (int j = 0; j < nodes; ++j) {
            double ang = 2.0 * kPi * j / nodes;
            acc += along({std::cos(ang), std::sin(ang), 0.0});
        }
        return acc * 2.0 * kPi / nodes;
    }
    // Gauss-Legendre in cos(polar) via Golub-Welsch-free Newton nodes
    std::vector<double> z(nodes / 2), w(nodes / 2);
    int m = nodes / 2;
    for (int i = 0; i < m; ++i) {
        double xg = std::cos(kPi * (i + 0.75) / (m + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = xg;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2 * k - 1) * xg * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = m * (xg * p1 - p0) / (xg * xg - 1);
            double dx = p1 / dp;
            xg -= dx;
            if (std::abs(dx) < 1e-16) {
                w[i] = 2.0 / ((1 - xg * xg) * dp * dp);
                break;
            }
            w[i] = 2.0 / ((1 - xg * xg) * dp * dp);
        }
        z[i] = xg;
    }
    for (int i = 0; i < m; ++i) {
        double rho = std::sqrt(std::max(0.0, 1 - z[i] * z[i]));
        for (int j = 0; j < nodes; ++j) {
            double ang = 2.0 * kPi * (j + 0.5) / nodes;
            acc += w[i] * (2.0 * kPi / nodes) * along({rho * std::cos(ang), rho * std::sin(ang), z[i]});
        }
    }
    return acc;
}

}  // namespace minkray::oracles
