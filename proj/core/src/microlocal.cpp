#include "minkray/microlocal.hpp"

#include "minkray/lightray.hpp"
#include "minkray/parallel.hpp"
#include "minkray/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace minkray {

namespace {
constexpr cplx I(0.0, 1.0);
}

double normal_constant(int n) {
    return 2.0 * kPi * sphere_area(n - 1);
}

double k_symbol(double tau, double r, int n, double epsReg) {
    if (tau == 0.0 && r == 0.0) throw ContractError("k_symbol: undefined at the zero covector");
    double q = r * r - tau * tau;
    if (q <= 0.0 || r == 0.0) return 0.0;
    double C = normal_constant(n);
    if (n == 2) return C / std::sqrt(std::max(q, epsReg));
    if (n == 3) return C / r;
    return C * std::pow(q, 0.5 * (n - 3)) / std::pow(r, n - 2);
}

double normal_time_kernel(double s, double r, int n) {
    double x = std::abs(s) * r;
    if (n == 2) return 2.0 * kPi * std::cyl_bessel_j(0.0, x);
    if (n == 3) return x < 1e-8 ? 4.0 * kPi * (1.0 - x * x / 6.0) : 4.0 * kPi * std::sin(x) / x;
    if (x < 1e-8) return sphere_area(n);
    double nu = 0.5 * n - 1.0;
    return std::pow(2.0 * kPi, 0.5 * n) * std::pow(x, -nu) * std::cyl_bessel_j(nu, x);
}

std::vector<cplx> apply_normal_mode(const std::vector<cplx>& in, double r, int n, double dt, std::size_t outLen) {
    std::size_t L = std::max(in.size(), outLen);
    std::vector<double> K(L);
    for (std::size_t d = 0; d < L; ++d) K[d] = normal_time_kernel(d * dt, r, n);
    std::vector<cplx> out(outLen, 0.0);
    const std::size_t Nin = in.size();
    for (std::size_t k = 0; k < outLen; ++k) {
        cplx acc = 0;
        for (std::size_t j = 0; j < Nin; ++j) {
            double w = (j == 0 || j + 1 == Nin) ? 0.5 : 1.0;
            std::size_t d = k > j ? k - j : j - k;
            acc += w * K[d] * in[j];
        }
        out[k] = acc * dt;
    }
    return out;
}

namespace {

ScalarField normal_time_kernel_apply(const ScalarField& f) {
    const GridSpec& g = f.spec;
    ScalarField F = f;
    fft_slices(F);
    const std::size_t M = g.spatial_size(), Nt = g.Nt;
    const double dt = g.dt();
    // kernel rows shared by all modes with the same |m|^2
    std::map<long, std::vector<double>> table;
    std::vector<long> keys(M);
    for (std::size_t i = 0; i < M; ++i) {
        keys[i] = frequency_key(g, i);
        table.emplace(keys[i], std::vector<double>());
    }
    std::vector<std::pair<long, std::vector<double>*>> entries;
    for (auto& [key, row] : table) entries.push_back({key, &row});
    parallel_for(entries.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) {
            double r = std::sqrt(static_cast<double>(entries[q].first)) * g.dxi();
            auto& row = *entries[q].second;
            row.resize(Nt);
            for (std::size_t d = 0; d < Nt; ++d) row[d] = normal_time_kernel(d * dt, r, g.n);
        }
    });
    ScalarField out(g);
    std::vector<double> w(Nt, dt);
    w.front() *= 0.5;
    w.back() *= 0.5;
    parallel_for(M, [&](std::size_t b, std::size_t e) {
        std::vector<cplx> col(Nt);
        for (std::size_t i = b; i < e; ++i) {
            const auto& K = table.at(keys[i]);
            for (std::size_t j = 0; j < Nt; ++j) col[j] = w[j] * F.slice(static_cast<int>(j))[i];
            for (std::size_t k = 0; k < Nt; ++k) {
                cplx acc = 0;
                for (std::size_t j = 0; j < Nt; ++j) acc += K[k > j ? k - j : j - k] * col[j];
                out.slice(static_cast<int>(k))[i] = acc;
            }
        }
    });
    ifft_slices(out);
    out.supportRadius = f.supportRadius;
    return out;
}

ScalarField normal_frequency_apply(const ScalarField& f, const NormalOptions& opt) {
    const GridSpec& g = f.spec;
    if (opt.padFactor < 2) throw ContractError("apply_normal_multiplier: temporal padding factor must be >= 2");
    const std::size_t Nt = g.Nt, P = static_cast<std::size_t>(opt.padFactor) * Nt;
    const double dt = g.dt();
    const double eps = opt.epsReg < 0 ? g.dxi() * g.dxi() : opt.epsReg;
    ScalarField F = f;
    fft_slices(F);
    ScalarField out(g);
    const std::size_t M = g.spatial_size();
    parallel_for(M, [&](std::size_t b, std::size_t e) {
        std::vector<cplx> a(P);
        for (std::size_t i = b; i < e; ++i) {
            double r = std::sqrt(frequency_norm2(g, i));
            std::fill(a.begin(), a.end(), 0.0);
            for (std::size_t k = 0; k < Nt; ++k) a[k] = F.slice(static_cast<int>(k))[i];
            dft1d(a, true);
            for (std::size_t m = 0; m < P; ++m) {
                long ms = m < P / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(P);
                double tau = 2.0 * kPi * ms / (P * dt);
                a[m] *= (r == 0.0 && tau == 0.0) ? 0.0 : k_symbol(tau, r, g.n, eps);
            }
            dft1d(a, false);
            for (std::size_t k = 0; k < Nt; ++k) out.slice(static_cast<int>(k))[i] = a[k] / static_cast<double>(P);
        }
    });
    ifft_slices(out);
    out.supportRadius = f.supportRadius;
    return out;
}

}  // namespace

ScalarField apply_normal_multiplier(const ScalarField& f, const NormalOptions& opt) {
    if (f.v.size() != f.spec.spacetime_size()) throw ContractError("apply_normal_multiplier: shape mismatch");
    check_finite(f.v, "apply_normal_multiplier");
    if (opt.scheme == NormalScheme::FrequencyCapped) return normal_frequency_apply(f, opt);
    return normal_time_kernel_apply(f);
}

std::vector<cplx> normal_kernel_apply_n3(const ScalarField& f, const std::vector<std::array<double, 4>>& points,
                                         int sphereOrder) {
    const GridSpec& g = f.spec;
    if (g.n != 3) throw ContractError("normal_kernel_apply_n3: n must be 3");
    QuadRule polar = gauss_legendre(sphereOrder);
    const int nAz = 2 * sphereOrder;
    std::vector<std::array<double, 3>> dirs;
    std::vector<double> wts;
    for (int i = 0; i < sphereOrder; ++i) {
        double z = polar.x[i], rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int j = 0; j < nAz; ++j) {
            double a = 2.0 * kPi * (j + 0.5) / nAz;
            dirs.push_back({rho * std::cos(a), rho * std::sin(a), z});
            wts.push_back(polar.w[i] * 2.0 * kPi / nAz);
        }
    }
    const int N = g.Nx;
    const double dx = g.dx();
    auto sample = [&](int k, double x, double y, double z) -> cplx {
        const double c[3] = {(x + g.Lx) / dx, (y + g.Lx) / dx, (z + g.Lx) / dx};
        int base[3];
        double wl[3][4];
        for (int d = 0; d < 3; ++d) {
            int b = static_cast<int>(std::floor(c[d])) - 1;
            double u = c[d] - b;  // in [1, 2)
            base[d] = b;
            // Lagrange weights for nodes 0..3
            wl[d][0] = -(u - 1) * (u - 2) * (u - 3) / 6.0;
            wl[d][1] = u * (u - 2) * (u - 3) / 2.0;
            wl[d][2] = -u * (u - 1) * (u - 3) / 2.0;
            wl[d][3] = u * (u - 1) * (u - 2) / 6.0;
        }
        const cplx* s = f.slice(k);
        cplx acc = 0;
        for (int a = 0; a < 4; ++a) {
            int i0 = base[0] + a;
            if (i0 < 0 || i0 >= N) continue;
            for (int b = 0; b < 4; ++b) {
                int i1 = base[1] + b;
                if (i1 < 0 || i1 >= N) continue;
                double w01 = wl[0][a] * wl[1][b];
                const cplx* row = s + (static_cast<std::size_t>(i0) * N + i1) * N;
                for (int q = 0; q < 4; ++q) {
                    int i2 = base[2] + q;
                    if (i2 < 0 || i2 >= N) continue;
                    acc += w01 * wl[2][q] * row[i2];
                }
            }
        }
        return acc;
    };
    std::vector<cplx> out(points.size());
    parallel_for(points.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            const auto& pt = points[p];
            cplx total = 0;
            for (int k = 0; k < g.Nt; ++k) {
                double w = (k == 0 || k == g.Nt - 1) ? 0.5 * g.dt() : g.dt();
                double rad = std::abs(pt[0] - g.t(k));
                cplx sph = 0;
                for (std::size_t q = 0; q < dirs.size(); ++q)
                    sph += wts[q] * sample(k, pt[1] + rad * dirs[q][0], pt[2] + rad * dirs[q][1], pt[3] + rad * dirs[q][2]);
                total += w * sph;
            }
            out[p] = total;
        }
    });
    return out;
}

namespace {

double binom(int m, int j) {
    double b = 1;
    for (int i = 1; i <= j; ++i) b = b * (m - j + i) / i;
    return b;
}

// Coefficients of p(u) = (-u(1+u))^m in powers of u.
std::vector<double> weight_poly(int m) {
    std::vector<double> c(2 * m + 1, 0.0);
    double sg = (m % 2) ? -1.0 : 1.0;
    for (int j = 0; j <= m; ++j) c[m + j] = sg * binom(m, j);
    return c;
}

int odd_order(int n) {
    if (n < 3 || n % 2 == 0) throw ContractError("symbol_A: closed form needs odd n >= 3");
    return (n - 3) / 2;
}

}  // namespace

cplx symbol_A(double sigma, double r, int n) {
    int m = odd_order(n);
    if (!(r > 0)) throw ContractError("symbol_A: need |xi| > 0");
    double pref = normal_constant(n) * std::pow(2.0, n - 2);
    double lam = 2.0 * sigma * r;
    auto c = weight_poly(m);
    const int deg = 2 * m;
    if (n == 3 && std::abs(lam) >= 1e-3) {
        // (1 - e^{-i lam}) / (i lam) with the numerator written without cancellation
        double h = std::sin(0.5 * lam);
        cplx num(2.0 * h * h, std::sin(lam));
        return pref * num / (I * lam);
    }
    if (std::abs(lam) < 2.0) {
        // int_{-1}^0 e^{i lam u} p(u) du = sum_k (i lam)^k / k! M_k
        cplx acc = 0, term = 1.0;
        for (int k = 0; k < 60; ++k) {
            if (k > 0) term *= I * lam / static_cast<double>(k);
            double Mk = 0;
            for (int j = 0; j <= deg; ++j) {
                if (c[j] == 0.0) continue;
                int p = k + j;
                // int_{-1}^0 u^p du = -(-1)^{p+1}/(p+1)
                Mk += c[j] * ((p % 2) ? -1.0 : 1.0) / (p + 1);
            }
            acc += term * Mk;
            if (std::abs(term) < 1e-20) break;
        }
        return pref * acc;
    }
    // repeated integration by parts: sum_j (-1)^j [p^{(j)}(u) e^{i lam u}]_{-1}^{0} / (i lam)^{j+1}
    std::vector<double> d = c;
    cplx acc = 0;
    cplx il = I * lam;
    cplx ilpow = il;
    cplx em = std::exp(-il);
    for (int j = 0; j <= deg; ++j) {
        double at0 = d[0];
        double atm1 = 0;
        for (std::size_t q = 0; q < d.size(); ++q) atm1 += d[q] * ((q % 2) ? -1.0 : 1.0);
        double sj = (j % 2) ? -1.0 : 1.0;
        acc += sj * (at0 - atm1 * em) / ilpow;
        ilpow *= il;
        std::vector<double> dd(d.size() > 1 ? d.size() - 1 : 1, 0.0);
        for (std::size_t q = 1; q < d.size(); ++q) dd[q - 1] = d[q] * static_cast<double>(q);
        d = dd;
    }
    return pref * acc;
}

cplx symbol_A_quad(double sigma, double r, int n) {
    if (!(r > 0)) throw ContractError("symbol_A_quad: need |xi| > 0");
    const double a = -2.0 * r, b = 0.0;
    int panels = std::max(4, static_cast<int>(std::ceil(std::abs(sigma) * (b - a) / kPi)) * 2);
    double h = (b - a) / panels;
    auto kk = [&](double s) { return k_symbol(s + r, r, n); };
    double re = 0, im = 0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * h, hi = lo + h;
        re += GK::integrate([&](double s) { return std::cos(sigma * s) * kk(s); }, lo, hi, 5, 1e-13);
        im += GK::integrate([&](double s) { return std::sin(sigma * s) * kk(s); }, lo, hi, 5, 1e-13);
    }
    return {re, im};
}

double symbol_A_scale(double r, int n) {
    (void)r;
    return std::abs(symbol_A(0.0, 1.0, n));
}

TimeCutoff TimeCutoff::for_grid(const GridSpec& g) {
    TimeCutoff c;
    c.t1 = g.t1_grid();
    c.T = g.T;
    c.eps = 2.0 * g.dt();
    c.samples.resize(g.Nt);
    for (int k = 0; k < g.Nt; ++k) c.samples[k] = c(g.t(k));
    return c;
}

double TimeCutoff::operator()(double t) const {
    double a = lo(), b = hi();
    if (!(b > a)) return 0.0;
    double z = (t - 0.5 * (a + b)) / (0.5 * (b - a));
    if (std::abs(z) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - z * z));
}

double SpacelikeCutoff::operator()(double tau, double r) const {
    double den = tau * tau + r * r;
    if (den == 0.0) return 0.0;
    double q = (r * r - tau * tau) / den;
    double x = (q - 0.5 * delta) / (0.5 * delta);
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

cplx leading_symbol_c0(double eta, const TimeCutoff& chi, int n) {
    int m = odd_order(n);
    if (!(eta > 0)) throw ContractError("leading_symbol_c0: need |eta| > 0");
    if (!(chi.lo() > chi.t1)) throw ContractError("leading_symbol_c0: cutoff must vanish on [0, t1]");
    const double t1 = chi.t1;
    // inner integral over t' in [0, t1] in closed form
    auto inner = [&](double t) {
        if (m == 0) return std::log(t / (t - t1));
        return (std::pow(t - t1, -m) - std::pow(t, -m)) / m;
    };
    QuadRule q = composite_gauss_legendre(64, 12, chi.lo(), chi.hi());
    double acc = 0;
    for (std::size_t i = 0; i < q.x.size(); ++i) acc += q.w[i] * chi(q.x[i]) * inner(q.x[i]);
    return normal_constant(n) / I * std::pow(eta, -(m + 1)) * acc;
}

std::vector<double> transport_symbol(const WaveCoefficients& c, const std::array<double, 3>& x0,
                                     const std::array<double, 3>& theta, int branch, int k,
                                     const std::vector<double>& sGrid, int n) {
    if (k != 1 && k != 2) throw ContractError("transport_symbol: k must be 1 or 2");
    const double tau = branch >= 0 ? 1.0 : -1.0;
    // zeta = (tau, theta) is fixed along the flat bicharacteristic; the base point moves
    // with the Hamilton field of -tau^2 + |xi|^2: (t, x)(s) = (-2 tau s, x0 + 2 s theta).
    auto Aat = [&](int j, double s) -> double {
        if (!c.variableA) return c.a(j);
        const ScalarField& F = (*c.variableA)[j];
        const GridSpec& g = F.spec;
        double t = std::clamp(-2.0 * tau * s, 0.0, g.T);
        double tc = t / g.dt();
        int kk = std::min(static_cast<int>(tc), g.Nt - 2);
        double at = tc - kk;
        double pos[3];
        for (int d = 0; d < n; ++d) pos[d] = x0[d] + 2.0 * s * theta[d];
        auto spatial = [&](int slice) {
            // multilinear, clamped to the box
            int base[3];
            double fr[3];
            for (int d = 0; d < n; ++d) {
                double cc = std::clamp((pos[d] + g.Lx) / g.dx(), 0.0, g.Nx - 1.000001);
                base[d] = static_cast<int>(cc);
                fr[d] = cc - base[d];
            }
            double acc = 0;
            for (int corner = 0; corner < (1 << n); ++corner) {
                double w = 1;
                std::size_t idx = 0;
                for (int d = 0; d < n; ++d) {
                    int bit = (corner >> d) & 1;
                    w *= bit ? fr[d] : 1.0 - fr[d];
                    idx = idx * g.Nx + static_cast<std::size_t>(base[d] + bit);
                }
                acc += w * F.slice(slice)[idx].real();
            }
            return acc;
        };
        return (1.0 - at) * spatial(kk) + at * spatial(kk + 1);
    };
    if (c.variableA) {
        for (const auto& F : *c.variableA)
            for (const auto& z : F.v)
                if (z.imag() != 0.0) throw ContractError("transport_symbol: A must be real valued");
    }
    auto a = [&](double s) {
        double acc = Aat(0, s) * tau;
        for (int j = 1; j <= n; ++j) acc += Aat(j, s) * theta[j - 1];
        return -acc;
    };
    double e0 = (k == 1) ? 1.0 : tau;
    std::vector<double> out(sGrid.size());
    // cumulative trapezoid from s = 0 to each grid value
    for (std::size_t q = 0; q < sGrid.size(); ++q) {
        double s = sGrid[q];
        int steps = std::max(1, static_cast<int>(std::ceil(std::abs(s) / 1e-3)));
        double h = s / steps, integral = 0;
        for (int i = 0; i <= steps; ++i) {
            double w = (i == 0 || i == steps) ? 0.5 : 1.0;
            integral += w * a(i * h);
        }
        integral *= h;
        out[q] = e0 * std::exp(-integral);
    }
    return out;
}

}  // namespace minkray
