#include "minkray/wave.hpp"

#include "minkray/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace minkray {

namespace {

constexpr cplx I(0.0, 1.0);

void require_same(const GridSpec& a, const GridSpec& b, const char* what) {
    if (a.n != b.n || a.Nx != b.Nx || a.Lx != b.Lx) throw ContractError(std::string(what) + ": spatial grids differ");
}

std::vector<double> trapezoid_weights(const GridSpec& g) {
    std::vector<double> w(g.Nt, g.dt());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

}  // namespace

ModePair split_cauchy(const CauchyData& d) {
    require_same(d.f1.spec, d.f2.spec, "split_cauchy");
    Spectrum F1 = fft_spatial(d.f1), F2 = fft_spatial(d.f2);
    Spectrum H1(d.f1.spec), H2(d.f1.spec);
    ModePair m;
    for (std::size_t i = 0; i < F1.size(); ++i) {
        double r = std::sqrt(frequency_norm2(F1.spec, i));
        if (r == 0.0) {
            H1[i] = H2[i] = 0.5 * F1[i];
            m.meanRate = F2[i];
        } else {
            cplx q = F2[i] / (I * r);
            H1[i] = 0.5 * (F1[i] + q);
            H2[i] = 0.5 * (F1[i] - q);
        }
    }
    m.h1 = ifft_spatial(H1);
    m.h2 = ifft_spatial(H2);
    return m;
}

CauchyData merge_modes(const ModePair& m) {
    require_same(m.h1.spec, m.h2.spec, "merge_modes");
    Spectrum H1 = fft_spatial(m.h1), H2 = fft_spatial(m.h2);
    Spectrum F1(m.h1.spec), F2(m.h1.spec);
    for (std::size_t i = 0; i < H1.size(); ++i) {
        double r = std::sqrt(frequency_norm2(H1.spec, i));
        F1[i] = H1[i] + H2[i];
        F2[i] = r == 0.0 ? m.meanRate : I * r * (H1[i] - H2[i]);
    }
    CauchyData d;
    d.f1 = ifft_spatial(F1);
    d.f2 = ifft_spatial(F2);
    d.R0 = m.h1.spec.R0;
    return d;
}

namespace {

std::vector<double> radii(const GridSpec& g) {
    std::vector<double> r(g.spatial_size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::sqrt(frequency_norm2(g, i));
    return r;
}

// Fills each time slice from a per-slice spectrum builder, then inverts.
template <class Fill>
ScalarField evolve(const GridSpec& spec, Fill fill) {
    ScalarField u(spec);
    parallel_for(static_cast<std::size_t>(spec.Nt), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) fill(static_cast<int>(k), u.slice(static_cast<int>(k)));
    });
    ifft_slices(u);
    return u;
}

}  // namespace

ScalarField half_wave(const SpatialField& h, int sign, const GridSpec& spec) {
    require_same(h.spec, spec, "half_wave");
    Spectrum H = fft_spatial(h);
    auto r = radii(spec);
    double sg = sign >= 0 ? 1.0 : -1.0;
    return evolve(spec, [&](int k, cplx* out) {
        double t = spec.t(k);
        for (std::size_t i = 0; i < r.size(); ++i) out[i] = std::polar(1.0, sg * t * r[i]) * H[i];
    });
}

SpatialField half_wave_adjoint(const ScalarField& v, int sign, const std::vector<double>& timeWeight) {
    const GridSpec& g = v.spec;
    if (static_cast<int>(timeWeight.size()) != g.Nt) throw ContractError("half_wave_adjoint: weight length differs from Nt");
    auto w = trapezoid_weights(g);
    auto r = radii(g);
    double sg = sign >= 0 ? 1.0 : -1.0;
    Spectrum G(g);
    SpatialField slice(g);
    for (int k = 0; k < g.Nt; ++k) {
        double wk = w[k] * timeWeight[k];
        if (wk == 0.0) continue;
        std::copy(v.slice(k), v.slice(k) + v.slice_size(), slice.v.begin());
        Spectrum Vk = fft_spatial(slice);
        double t = g.t(k);
        for (std::size_t i = 0; i < r.size(); ++i) G[i] += wk * std::polar(1.0, -sg * t * r[i]) * Vk[i];
    }
    return ifft_spatial(G);
}

ScalarField solve_cauchy_flat(const CauchyData& d, const GridSpec& spec) {
    require_same(d.f1.spec, spec, "solve_cauchy_flat");
    GridSpec s = spec;
    s.R0 = d.R0;
    s.validate_support();
    ModePair m = split_cauchy(d);
    Spectrum H1 = fft_spatial(m.h1), H2 = fft_spatial(m.h2);
    auto r = radii(spec);
    ScalarField u = evolve(spec, [&](int k, cplx* out) {
        double t = spec.t(k);
        for (std::size_t i = 0; i < r.size(); ++i) {
            cplx e = std::polar(1.0, t * r[i]);
            out[i] = e * H1[i] + std::conj(e) * H2[i];
            if (r[i] == 0.0) out[i] += t * m.meanRate;
        }
    });
    u.supportRadius = d.R0;
    return u;
}

ScalarField solve_cauchy_flat_dt(const CauchyData& d, const GridSpec& spec) {
    require_same(d.f1.spec, spec, "solve_cauchy_flat_dt");
    ModePair m = split_cauchy(d);
    Spectrum H1 = fft_spatial(m.h1), H2 = fft_spatial(m.h2);
    auto r = radii(spec);
    return evolve(spec, [&](int k, cplx* out) {
        double t = spec.t(k);
        for (std::size_t i = 0; i < r.size(); ++i) {
            cplx e = std::polar(1.0, t * r[i]);
            out[i] = I * r[i] * (e * H1[i] - std::conj(e) * H2[i]);
            if (r[i] == 0.0) out[i] = m.meanRate;
        }
    });
}

cplx wave_symbol(cplx tau, const std::array<double, 3>& xi, const WaveCoefficients& c) {
    double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    cplx lower = I * c.a(0) * tau + c.B;
    for (int j = 0; j < 3; ++j) lower += I * c.a(j + 1) * xi[j];
    return tau * tau - r2 + lower;
}

cplx wave_symbol(double tau, const std::array<double, 3>& xi, const WaveCoefficients& c) {
    return wave_symbol(cplx(tau, 0.0), xi, c);
}

std::pair<cplx, cplx> mode_roots(const std::array<double, 3>& xi, const WaveCoefficients& c) {
    double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    cplx q = c.B - r2;
    for (int j = 0; j < 3; ++j) q += I * c.a(j + 1) * xi[j];
    // tau^2 + i A0 tau + q = 0
    cplx b = I * c.a(0);
    cplx disc = std::sqrt(b * b - 4.0 * q);
    cplx r1 = 0.5 * (-b + disc), r2b = 0.5 * (-b - disc);
    // product form avoids cancellation in the smaller root
    if (std::abs(r1) > std::abs(r2b) && std::abs(r1) > 0) r2b = q / r1;
    else if (std::abs(r2b) > 0) r1 = q / r2b;
    auto before = [](cplx a, cplx z) {
        return a.real() > z.real() || (a.real() == z.real() && a.imag() >= z.imag());
    };
    if (before(r1, r2b)) return {r1, r2b};
    return {r2b, r1};
}

ConstCauchySolver::Mode ConstCauchySolver::mode(const std::array<double, 3>& xi, const WaveCoefficients& c) {
    Mode m;
    auto [tp, tm] = mode_roots(xi, c);
    m.tp = tp;
    m.tm = tm;
    double scale = std::max(1.0, std::abs(tp) + std::abs(tm));
    if (std::abs(tp - tm) <= 1e-10 * scale) {
        bool origin = xi[0] == 0.0 && xi[1] == 0.0 && xi[2] == 0.0;
        if (!origin)
            throw ContractError("solve_cauchy_const: degenerate characteristic roots at |xi| = " +
                                std::to_string(std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2])));
        m.doubleRoot = true;
        m.tp = m.tm = 0.5 * (tp + tm);
        return m;
    }
    cplx den = tp - tm;
    m.c1p = -tm / den;
    m.c2p = 1.0 / (I * den);
    m.c1m = tp / den;
    m.c2m = -1.0 / (I * den);
    return m;
}

ConstCauchySolver::ConstCauchySolver(const CauchyData& d, const WaveCoefficients& c)
    : spec_(d.f1.spec), F1_(fft_spatial(d.f1)), F2_(fft_spatial(d.f2)) {
    require_same(d.f1.spec, d.f2.spec, "solve_cauchy_const");
    if (!c.constant()) throw ContractError("solve_cauchy_const: coefficients must be constant");
    modes_.resize(F1_.size());
    for (std::size_t i = 0; i < modes_.size(); ++i) modes_[i] = mode(frequency(spec_, i), c);
}

void const_mode_parts(const ConstCauchySolver::Mode& m, cplx f1, cplx f2, double t, int deriv, cplx out[4]) {
    if (m.doubleRoot) {
        // u = e^{it tau}(f1 + t (f2 - i tau f1)), split evenly between the branches
        cplx tau = m.tp;
        cplx e = std::exp(I * tau * t);
        cplx a = I * tau;
        cplx g1, g2;
        if (deriv == 0) {
            g1 = e * f1 * (1.0 - a * t);
            g2 = e * f2 * t;
        } else if (deriv == 1) {
            g1 = e * f1 * (a * (1.0 - a * t) - a);
            g2 = e * f2 * (1.0 + a * t);
        } else {
            g1 = e * f1 * (a * a * (1.0 - a * t) - 2.0 * a * a);
            g2 = e * f2 * (2.0 * a + a * a * t);
        }
        out[0] = out[1] = 0.5 * g1;
        out[2] = out[3] = 0.5 * g2;
        return;
    }
    cplx ap = I * m.tp, am = I * m.tm;
    cplx ep = std::exp(ap * t), em = std::exp(am * t);
    cplx dp = deriv == 0 ? 1.0 : (deriv == 1 ? ap : ap * ap);
    cplx dm = deriv == 0 ? 1.0 : (deriv == 1 ? am : am * am);
    out[0] = dp * ep * m.c1p * f1;
    out[1] = dm * em * m.c1m * f1;
    out[2] = dp * ep * m.c2p * f2;
    out[3] = dm * em * m.c2m * f2;
}

Spectrum ConstCauchySolver::spectrum_at(double t, int derivative) const {
    if (derivative < 0 || derivative > 2) throw ContractError("spectrum_at: derivative order must be 0, 1 or 2");
    Spectrum U(spec_);
    cplx p[4];
    for (std::size_t i = 0; i < U.size(); ++i) {
        const_mode_parts(modes_[i], F1_[i], F2_[i], t, derivative, p);
        U[i] = (p[0] + p[1]) + (p[2] + p[3]);
    }
    return U;
}

ConstCauchySolution ConstCauchySolver::sample(const GridSpec& spec) const {
    require_same(spec_, spec, "solve_cauchy_const");
    ConstCauchySolution s;
    s.u = ScalarField(spec);
    s.u1p = ScalarField(spec);
    s.u1m = ScalarField(spec);
    s.u2p = ScalarField(spec);
    s.u2m = ScalarField(spec);
    parallel_for(static_cast<std::size_t>(spec.Nt), [&](std::size_t b, std::size_t e) {
        cplx p[4];
        for (std::size_t kk = b; kk < e; ++kk) {
            int k = static_cast<int>(kk);
            double t = spec.t(k);
            cplx* u = s.u.slice(k);
            cplx* q[4] = {s.u1p.slice(k), s.u1m.slice(k), s.u2p.slice(k), s.u2m.slice(k)};
            for (std::size_t i = 0; i < modes_.size(); ++i) {
                const_mode_parts(modes_[i], F1_[i], F2_[i], t, 0, p);
                for (int j = 0; j < 4; ++j) q[j][i] = p[j];
                u[i] = (p[0] + p[1]) + (p[2] + p[3]);
            }
        }
    });
    for (ScalarField* f : {&s.u, &s.u1p, &s.u1m, &s.u2p, &s.u2m}) ifft_slices(*f);
    return s;
}

ConstCauchySolution solve_cauchy_const(const CauchyData& d, const WaveCoefficients& c, const GridSpec& spec) {
    GridSpec s = spec;
    s.R0 = d.R0;
    s.validate_support();
    ConstCauchySolver solver(d, c);
    auto out = solver.sample(spec);
    out.u.supportRadius = d.R0;
    return out;
}

std::vector<cplx> source_mode_response(const std::vector<cplx>& fhat, double r, double dt,
                                       const std::vector<double>& times) {
    // u(t) = -(1/(2ir)) [e^{irt} G-(t) - e^{-irt} G+(t)],  G-+(t) = int_0^t e^{-+irs} f(s) ds,
    // each antiderivative taken from the trigonometric interpolant on a doubled period.
    const std::size_t Nt = fhat.size();
    const std::size_t P = 2 * Nt;
    const double period = P * dt;
    auto antiderivative = [&](const std::vector<cplx>& g) {
        std::vector<cplx> a(P, 0.0);
        std::copy(g.begin(), g.end(), a.begin());
        dft1d(a, true);
        // evaluate at arbitrary times by direct summation
        std::vector<cplx> out(times.size());
        for (std::size_t q = 0; q < times.size(); ++q) {
            double t = times[q];
            cplx acc = a[0] * t;
            for (std::size_t m = 1; m < P; ++m) {
                if (2 * m == P) continue;
                long ms = m < P / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(P);
                double w = 2.0 * kPi * ms / period;
                acc += a[m] * (std::polar(1.0, w * t) - 1.0) / (I * w);
            }
            out[q] = acc / static_cast<double>(P);
        }
        return out;
    };
    std::vector<cplx> u(times.size());
    if (r == 0.0) {
        // u = -(t G0 - G1), G1 = int s f
        std::vector<cplx> g1(Nt);
        for (std::size_t k = 0; k < Nt; ++k) g1[k] = static_cast<double>(k) * dt * fhat[k];
        auto G0 = antiderivative(fhat);
        auto G1 = antiderivative(g1);
        for (std::size_t q = 0; q < times.size(); ++q) u[q] = -(times[q] * G0[q] - G1[q]);
        return u;
    }
    std::vector<cplx> gm(Nt), gp(Nt);
    for (std::size_t k = 0; k < Nt; ++k) {
        double s = k * dt;
        gm[k] = std::polar(1.0, -r * s) * fhat[k];
        gp[k] = std::polar(1.0, r * s) * fhat[k];
    }
    auto Gm = antiderivative(gm);
    auto Gp = antiderivative(gp);
    for (std::size_t q = 0; q < times.size(); ++q) {
        double t = times[q];
        u[q] = -(std::polar(1.0, r * t) * Gm[q] - std::polar(1.0, -r * t) * Gp[q]) / (2.0 * I * r);
    }
    return u;
}

namespace {

// Grid-time version of the trigonometric antiderivative: values at t_k, k < Nt.
void antiderivative_grid(std::vector<cplx>& buf, std::size_t Nt, double dt) {
    const std::size_t P = buf.size();
    const double period = P * dt;
    dft1d(buf, true);
    cplx mean = buf[0];
    cplx c0 = 0.0;
    buf[0] = 0.0;
    for (std::size_t m = 1; m < P; ++m) {
        if (2 * m == P) {
            buf[m] = 0.0;
            continue;
        }
        long ms = m < P / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(P);
        double w = 2.0 * kPi * ms / period;
        buf[m] /= I * w;
        c0 += buf[m];
    }
    dft1d(buf, false);
    // buf[k] = sum_m a_m e^{i w_m t_k} / (i w_m); interpolant carries 1/P = dt/period
    for (std::size_t k = 0; k < Nt; ++k) buf[k] = (mean * (k * dt) + buf[k] - c0) * (dt / period);
}

}  // namespace

ScalarField solve_source_flat(const ScalarField& f) {
    const GridSpec& g = f.spec;
    check_finite(f.v, "solve_source_flat");
    ScalarField F = f;
    fft_slices(F);
    const std::size_t Nt = g.Nt, P = 2 * Nt;
    const double dt = g.dt();
    auto r = radii(g);
    ScalarField U(g);
    parallel_for(r.size(), [&](std::size_t b, std::size_t e) {
        std::vector<cplx> a(P), c(P);
        for (std::size_t i = b; i < e; ++i) {
            if (r[i] == 0.0) {
                std::fill(a.begin(), a.end(), 0.0);
                std::fill(c.begin(), c.end(), 0.0);
                for (std::size_t k = 0; k < Nt; ++k) {
                    a[k] = F.slice(static_cast<int>(k))[i];
                    c[k] = static_cast<double>(k) * dt * a[k];
                }
                antiderivative_grid(a, Nt, dt);
                antiderivative_grid(c, Nt, dt);
                for (std::size_t k = 0; k < Nt; ++k) U.slice(static_cast<int>(k))[i] = -(static_cast<double>(k) * dt * a[k] - c[k]);
                continue;
            }
            std::fill(a.begin(), a.end(), 0.0);
            std::fill(c.begin(), c.end(), 0.0);
            for (std::size_t k = 0; k < Nt; ++k) {
                cplx fk = F.slice(static_cast<int>(k))[i];
                double s = k * dt;
                a[k] = std::polar(1.0, -r[i] * s) * fk;
                c[k] = std::polar(1.0, r[i] * s) * fk;
            }
            antiderivative_grid(a, Nt, dt);
            antiderivative_grid(c, Nt, dt);
            for (std::size_t k = 0; k < Nt; ++k) {
                double t = k * dt;
                U.slice(static_cast<int>(k))[i] =
                    -(std::polar(1.0, r[i] * t) * a[k] - std::polar(1.0, -r[i] * t) * c[k]) / (2.0 * I * r[i]);
            }
        }
    });
    ifft_slices(U);
    U.supportRadius = f.supportRadius;
    return U;
}

ScalarField solve_cauchy_fd(const CauchyData& d, const WaveCoefficients& c, const GridSpec& spec) {
    require_same(d.f1.spec, spec, "solve_cauchy_fd");
    const double dt = spec.dt(), dx = spec.dx();
    if (dt > 0.5 * dx * (1 + 1e-12)) throw ContractError("solve_cauchy_fd: CFL violated (need dt <= dx/2)");
    const int n = spec.n, N = spec.Nx;
    const std::size_t M = spec.spatial_size();
    if (c.variableA && static_cast<int>(c.variableA->size()) != n + 1)
        throw ContractError("solve_cauchy_fd: need n+1 variable A fields");
    std::size_t stride[3] = {1, 1, 1};
    for (int dd = n - 2; dd >= 0; --dd) stride[dd] = stride[dd + 1] * N;

    auto coefA = [&](int j, int k, std::size_t i) -> double {
        if (c.variableA) return (*c.variableA)[j].slice(k)[i].real();
        return c.a(j);
    };
    auto coefB = [&](int k, std::size_t i) -> cplx {
        if (c.variableB) return c.variableB->slice(k)[i];
        return c.B;
    };
    // spatial part: Laplacian + A'.grad + B, second-order centred, periodic
    auto spatial = [&](const cplx* u, int k, cplx* out) {
        parallel_for(M, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                cplx lap = 0, adv = 0;
                std::size_t r = i;
                for (int dd = n - 1; dd >= 0; --dd) {
                    int idx = static_cast<int>(r % N);
                    r /= N;
                    std::size_t ip = i - idx * stride[dd] + ((idx + 1) % N) * stride[dd];
                    std::size_t im = i - idx * stride[dd] + ((idx + N - 1) % N) * stride[dd];
                    lap += (u[ip] - 2.0 * u[i] + u[im]) / (dx * dx);
                    adv += coefA(dd + 1, k, i) * (u[ip] - u[im]) / (2.0 * dx);
                }
                out[i] = lap + adv + coefB(k, i) * u[i];
            }
        });
    };

    ScalarField U(spec);
    std::copy(d.f1.v.begin(), d.f1.v.end(), U.slice(0));
    std::vector<cplx> S(M);
    spatial(U.slice(0), 0, S.data());
    // Taylor start: u1 = u0 + dt f2 + dt^2/2 (S u0 + A0 f2)
    cplx* u1 = U.slice(1);
    for (std::size_t i = 0; i < M; ++i)
        u1[i] = d.f1.v[i] + dt * d.f2.v[i] + 0.5 * dt * dt * (S[i] + coefA(0, 0, i) * d.f2.v[i]);
    for (int k = 1; k + 1 < spec.Nt; ++k) {
        spatial(U.slice(k), k, S.data());
        const cplx* um = U.slice(k - 1);
        const cplx* u0 = U.slice(k);
        cplx* up = U.slice(k + 1);
        for (std::size_t i = 0; i < M; ++i) {
            // u_tt = S u + A0 u_t with centred u_t
            double h = 0.5 * dt * coefA(0, k, i);
            up[i] = (2.0 * u0[i] - (1.0 + h) * um[i] + dt * dt * S[i]) / (1.0 - h);
        }
    }
    U.supportRadius = d.R0;
    return U;
}

}  // namespace minkray
