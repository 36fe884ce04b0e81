#include "minkray/lightray.hpp"

#include "minkray/parallel.hpp"
#include "minkray/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace minkray {

double sphere_area(int n) {
    // |S^{n-1}|
    if (n == 1) return 2.0;
    if (n == 2) return 2.0 * kPi;
    if (n == 3) return 4.0 * kPi;
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

namespace {

double default_step(const GridSpec& g) {
    int m = static_cast<int>(std::ceil(g.dt() / (0.5 * g.dx()) - 1e-12));
    return g.dt() / std::max(m, 1);
}

}  // namespace

void RayChart::validate() const {
    ySpec.validate();
    if (directions.empty() || directions.size() != weights.size()) throw ContractError("chart: direction/weight mismatch");
    double wsum = 0;
    for (std::size_t j = 0; j < size(); ++j) {
        const auto& th = directions[j];
        double nrm = 0;
        for (int d = 0; d < ySpec.n; ++d) nrm += th[d] * th[d];
        if (std::abs(std::sqrt(nrm) - 1.0) > 1e-14) throw ContractError("chart: direction not unit length");
        if (!(weights[j] > 0)) throw ContractError("chart: weights must be positive");
        wsum += weights[j];
    }
    if (std::abs(wsum - sphere_area(ySpec.n)) > 1e-10) throw ContractError("chart: weights do not sum to the sphere area");
    if (!(sStep > 0) || sStep > 0.5 * ySpec.dx() * (1 + 1e-12)) throw ContractError("chart: need 0 < sStep <= dx/2");
}

RayChart make_chart_uniform(const GridSpec& g, int Ntheta) {
    if (g.n != 2) throw ContractError("make_chart_uniform: n must be 2");
    if (Ntheta < 1) throw ContractError("make_chart_uniform: need directions");
    RayChart c;
    c.ySpec = g;
    c.scheme = DirectionScheme::UniformAngle;
    for (int j = 0; j < Ntheta; ++j) {
        double a = 2.0 * kPi * j / Ntheta;
        c.directions.push_back({std::cos(a), std::sin(a), 0.0});
        c.weights.push_back(2.0 * kPi / Ntheta);
    }
    c.sStep = default_step(g);
    return c;
}

RayChart make_chart_gl(const GridSpec& g, int nPolar, int nAzimuth) {
    if (g.n != 3) throw ContractError("make_chart_gl: n must be 3");
    if (nPolar < 1 || nAzimuth < 1) throw ContractError("make_chart_gl: need directions");
    RayChart c;
    c.ySpec = g;
    c.scheme = DirectionScheme::GaussLegendreAzimuth;
    QuadRule gl = gauss_legendre(nPolar);
    for (int i = 0; i < nPolar; ++i) {
        double z = gl.x[i];
        double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int j = 0; j < nAzimuth; ++j) {
            double a = 2.0 * kPi * (j + 0.5) / nAzimuth;
            std::array<double, 3> th{rho * std::cos(a), rho * std::sin(a), z};
            double nrm = std::sqrt(th[0] * th[0] + th[1] * th[1] + th[2] * th[2]);
            for (auto& x : th) x /= nrm;
            c.directions.push_back(th);
            c.weights.push_back(gl.w[i] * 2.0 * kPi / nAzimuth);
        }
    }
    c.sStep = default_step(g);
    return c;
}

namespace {

// dst[i] += w * src[i + off] over all i with i + off inside the box.
void add_shifted(cplx* dst, const cplx* src, int n, int N, const int* off, double w) {
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int d = 0; d < n; ++d) {
        lo[d] = std::max(0, -off[d]);
        hi[d] = std::min(N, N - off[d]);
        if (lo[d] >= hi[d]) return;
    }
    if (n == 2) {
        for (int i0 = lo[0]; i0 < hi[0]; ++i0) {
            cplx* d = dst + static_cast<std::size_t>(i0) * N;
            const cplx* s = src + static_cast<std::ptrdiff_t>(i0 + off[0]) * N + off[1];
            for (int i1 = lo[1]; i1 < hi[1]; ++i1) d[i1] += w * s[i1];
        }
    } else {
        for (int i0 = lo[0]; i0 < hi[0]; ++i0)
            for (int i1 = lo[1]; i1 < hi[1]; ++i1) {
                cplx* d = dst + (static_cast<std::size_t>(i0) * N + i1) * N;
                const cplx* s = src + (static_cast<std::ptrdiff_t>(i0 + off[0]) * N + (i1 + off[1])) * N + off[2];
                for (int i2 = lo[2]; i2 < hi[2]; ++i2) d[i2] += w * s[i2];
            }
    }
}

// dst += w * (src sampled at i + shift) with multilinear interpolation; shift in grid units.
void add_interpolated(cplx* dst, const cplx* src, int n, int N, const double* shift, double w) {
    int base[3];
    double frac[3];
    for (int d = 0; d < n; ++d) {
        double fl = std::floor(shift[d]);
        base[d] = static_cast<int>(fl);
        frac[d] = shift[d] - fl;
    }
    int corners = 1 << n;
    for (int c = 0; c < corners; ++c) {
        int off[3];
        double wc = w;
        for (int d = 0; d < n; ++d) {
            int bit = (c >> d) & 1;
            off[d] = base[d] + bit;
            wc *= bit ? frac[d] : 1.0 - frac[d];
        }
        if (wc != 0.0) add_shifted(dst, src, n, N, off, wc);
    }
}

}  // namespace

Sinogram ray_transform(const ScalarField& f, const RayChart& chart) {
    return ray_transform(f, chart, 0.0, f.spec.t1_grid());
}

Sinogram ray_transform(const ScalarField& f, const RayChart& chart, double s0, double s1) {
    const GridSpec& g = f.spec;
    if (f.v.size() != g.spacetime_size()) throw ContractError("ray_transform: field shape mismatch");
    if (chart.ySpec.n != g.n || chart.ySpec.Nx != g.Nx || chart.ySpec.Lx != g.Lx)
        throw ContractError("ray_transform: chart grid does not match the field grid");
    double tol = 1e-12 * g.T;
    if (s0 < -tol || s1 > g.T + tol || !(s1 > s0)) throw ContractError("ray_transform: sRange outside the time grid");
    check_finite(f.v, "ray_transform");

    int J = static_cast<int>(std::ceil((s1 - s0) / chart.sStep - 1e-9));
    double h = (s1 - s0) / J;
    Sinogram S(chart);
    const int n = g.n, N = g.Nx;
    const double dx = g.dx(), dt = g.dt();
    parallel_for(chart.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t j = b; j < e; ++j) {
            const auto& th = chart.directions[j];
            cplx* row = S.row(j);
            for (int q = 0; q <= J; ++q) {
                double s = s0 + q * h;
                double wq = (q == 0 || q == J) ? 0.5 * h : h;
                double shift[3];
                for (int d = 0; d < n; ++d) shift[d] = s * th[d] / dx;
                double tc = s / dt;
                int k = static_cast<int>(std::floor(tc + 1e-9));
                double a = tc - k;
                if (a < 1e-9) a = 0.0;
                k = std::min(k, g.Nt - 1);
                add_interpolated(row, f.slice(k), n, N, shift, wq * (1.0 - a));
                if (a > 0.0 && k + 1 < g.Nt) add_interpolated(row, f.slice(k + 1), n, N, shift, wq * a);
            }
        }
    });
    return S;
}

ScalarField backproject(const Sinogram& S, const GridSpec& spec, int kBegin, int kEnd) {
    const RayChart& c = S.chart;
    if (c.ySpec.n != spec.n || c.ySpec.Nx != spec.Nx || c.ySpec.Lx != spec.Lx)
        throw ContractError("backproject: chart grid does not match the target grid");
    if (kEnd < 0) kEnd = spec.Nt;
    kBegin = std::max(kBegin, 0);
    kEnd = std::min(kEnd, spec.Nt);
    check_finite(S.v, "backproject");
    ScalarField out(spec);
    const int n = spec.n, N = spec.Nx;
    const double dx = spec.dx();
    std::size_t count = kEnd > kBegin ? static_cast<std::size_t>(kEnd - kBegin) : 0;
    parallel_for(count, [&](std::size_t b, std::size_t e) {
        for (std::size_t kk = b; kk < e; ++kk) {
            int k = kBegin + static_cast<int>(kk);
            double t = spec.t(k);
            cplx* dst = out.slice(k);
            for (std::size_t j = 0; j < c.size(); ++j) {
                double shift[3];
                for (int d = 0; d < n; ++d) shift[d] = -t * c.directions[j][d] / dx;
                add_interpolated(dst, S.row(j), n, N, shift, c.weights[j]);
            }
        }
    });
    return out;
}

std::vector<SpatialField> backproject_at(const Sinogram& S, const GridSpec& spec, const std::vector<int>& ks) {
    const RayChart& c = S.chart;
    if (c.ySpec.n != spec.n || c.ySpec.Nx != spec.Nx || c.ySpec.Lx != spec.Lx)
        throw ContractError("backproject_at: chart grid does not match the target grid");
    for (int k : ks)
        if (k < 0 || k >= spec.Nt) throw ContractError("backproject_at: time index out of range");
    std::vector<SpatialField> out(ks.size(), SpatialField(spec));
    const int n = spec.n, N = spec.Nx;
    const double dx = spec.dx();
    parallel_for(ks.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) {
            double t = spec.t(ks[q]);
            for (std::size_t j = 0; j < c.size(); ++j) {
                double shift[3];
                for (int d = 0; d < n; ++d) shift[d] = -t * c.directions[j][d] / dx;
                add_interpolated(out[q].v.data(), S.row(j), n, N, shift, c.weights[j]);
            }
        }
    });
    return out;
}

double fourier_slice_check(const ScalarField& f, const RayChart& chart, std::size_t thetaIndex) {
    const GridSpec& g = f.spec;
    if (thetaIndex >= chart.size()) throw ContractError("fourier_slice_check: direction index out of range");
    RayChart one = chart;
    one.directions = {chart.directions[thetaIndex]};
    one.weights = {chart.weights[thetaIndex]};
    Sinogram S = ray_transform(f, one);
    SpatialField row(g);
    std::copy(S.row(0), S.row(0) + S.row_size(), row.v.begin());
    Spectrum lhs = fft_spatial(row);

    ScalarField F = f;
    fft_slices(F);
    const auto& th = chart.directions[thetaIndex];
    double limit = 0.25 * g.nyquist();
    double dt = g.dt();
    double maxdiff = 0, maxref = 0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        auto xi = frequency(g, i);
        bool inband = true;
        double tx = 0;
        for (int d = 0; d < g.n; ++d) {
            inband = inband && std::abs(xi[d]) <= limit;
            tx += th[d] * xi[d];
        }
        if (!inband) continue;
        cplx acc = 0;
        for (int k = 0; k < g.Nt; ++k) {
            double w = (k == 0 || k == g.Nt - 1) ? 0.5 * dt : dt;
            acc += w * std::polar(1.0, g.t(k) * tx) * F.slice(k)[i];
        }
        maxdiff = std::max(maxdiff, std::abs(lhs[i] - acc));
        maxref = std::max(maxref, std::abs(acc));
    }
    return maxref > 0 ? maxdiff / maxref : maxdiff;
}

cplx inner(const ScalarField& a, const ScalarField& b) {
    if (a.v.size() != b.v.size()) throw ContractError("inner: shape mismatch");
    const GridSpec& g = a.spec;
    cplx acc = 0;
    for (int k = 0; k < g.Nt; ++k) {
        double w = (k == 0 || k == g.Nt - 1) ? 0.5 * g.dt() : g.dt();
        cplx sk = 0;
        const cplx* pa = a.slice(k);
        const cplx* pb = b.slice(k);
        for (std::size_t i = 0; i < a.slice_size(); ++i) sk += pa[i] * std::conj(pb[i]);
        acc += w * sk;
    }
    return acc * g.cell_volume();
}

cplx inner(const Sinogram& a, const Sinogram& b) {
    if (a.v.size() != b.v.size()) throw ContractError("inner: shape mismatch");
    cplx acc = 0;
    for (std::size_t j = 0; j < a.chart.size(); ++j) {
        cplx sj = 0;
        for (std::size_t i = 0; i < a.row_size(); ++i) sj += a.row(j)[i] * std::conj(b.row(j)[i]);
        acc += a.chart.weights[j] * sj;
    }
    return acc * a.chart.ySpec.cell_volume();
}

double l2_norm(const Sinogram& S) {
    return std::sqrt(std::max(0.0, inner(S, S).real()));
}

double sobolev_norm_sinogram(const Sinogram& S, double s) {
    double acc = 0;
    SpatialField row(S.chart.ySpec);
    for (std::size_t j = 0; j < S.chart.size(); ++j) {
        std::copy(S.row(j), S.row(j) + S.row_size(), row.v.begin());
        double nj = sobolev_norm(row, s);
        acc += S.chart.weights[j] * nj * nj;
    }
    return std::sqrt(acc);
}

namespace {

constexpr char kSinoMagic[8] = {'M', 'R', 'A', 'Y', 'S', 'I', 'N', '1'};

template <class T>
void put(std::ostream& os, T x) {
    os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T x{};
    is.read(reinterpret_cast<char*>(&x), sizeof(T));
    if (!is) throw ContractError("sinogram file: truncated");
    return x;
}

}  // namespace

void write_sinogram(const std::string& path, const Sinogram& S) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ContractError("cannot open " + path);
    const RayChart& c = S.chart;
    os.write(kSinoMagic, 8);
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(c.ySpec.n));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(c.ySpec.Nx));
    put<double>(os, c.ySpec.Lx);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(c.size()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(c.scheme));
    for (const auto& th : c.directions)
        for (int d = 0; d < c.ySpec.n; ++d) put<double>(os, th[d]);
    for (double w : c.weights) put<double>(os, w);
    os.write(reinterpret_cast<const char*>(S.v.data()), static_cast<std::streamsize>(S.v.size() * sizeof(cplx)));
    if (!os) throw ContractError("write failed: " + path);
}

Sinogram read_sinogram(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ContractError("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kSinoMagic, 8) != 0) throw ContractError("not an MRAYSIN1 file: " + path);
    if (get<std::uint32_t>(is) != 1) throw ContractError("unsupported sinogram file version");
    RayChart c;
    c.ySpec.n = static_cast<int>(get<std::uint32_t>(is));
    c.ySpec.Nx = static_cast<int>(get<std::uint32_t>(is));
    c.ySpec.Lx = get<double>(is);
    auto Ntheta = get<std::uint32_t>(is);
    c.scheme = static_cast<DirectionScheme>(get<std::uint32_t>(is));
    if (c.ySpec.n != 2 && c.ySpec.n != 3) throw ContractError("sinogram file: bad dimension");
    c.directions.resize(Ntheta, {0, 0, 0});
    for (auto& th : c.directions)
        for (int d = 0; d < c.ySpec.n; ++d) th[d] = get<double>(is);
    c.weights.resize(Ntheta);
    for (auto& w : c.weights) w = get<double>(is);
    c.sStep = 0.5 * c.ySpec.dx();
    Sinogram S(c);
    is.read(reinterpret_cast<char*>(S.v.data()), static_cast<std::streamsize>(S.v.size() * sizeof(cplx)));
    if (!is) throw ContractError("sinogram file: truncated data");
    return S;
}

}  // namespace minkray
