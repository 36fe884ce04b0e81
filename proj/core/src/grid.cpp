#include "minkray/grid.hpp"

#include "minkray/parallel.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <tuple>

static_assert(std::endian::native == std::endian::little, "field files are written in host order");

namespace minkray {

int GridSpec::t1_index() const {
    return static_cast<int>(std::lround(t1 / dt()));
}

std::size_t GridSpec::spatial_size() const {
    std::size_t s = 1;
    for (int d = 0; d < n; ++d) s *= static_cast<std::size_t>(Nx);
    return s;
}

double GridSpec::cell_volume() const {
    return std::pow(dx(), n);
}

bool fft_friendly(int N) {
    if (N < 1) return false;
    for (int p : {2, 3, 5})
        while (N % p == 0) N /= p;
    return N == 1;
}

void GridSpec::validate() const {
    if (n != 2 && n != 3) throw ContractError("grid: n must be 2 or 3");
    if (Nx < 4 || Nx % 2 != 0 || !fft_friendly(Nx))
        throw ContractError("grid: Nx must be even and of the form 2^a 3^b 5^c");
    if (Nt < 3 || !fft_friendly(Nt)) throw ContractError("grid: Nt must be >= 3 and of the form 2^a 3^b 5^c");
    if (!(Lx > 0) || !(T > 0) || !std::isfinite(Lx) || !std::isfinite(T)) throw ContractError("grid: Lx and T must be positive");
    if (t0 != 0.0) throw ContractError("grid: t0 is fixed at 0");
    if (!(t1 > 0) || !(t1 < T)) throw ContractError("grid: need 0 < t1 < T");
    if (t1_index() < 1 || t1_index() >= Nt - 1) throw ContractError("grid: t1 does not resolve on the time grid");
    if (!(R0 >= 0)) throw ContractError("grid: R0 must be nonnegative");
}

void GridSpec::validate_support() const {
    if (Lx < R0 + T + 4.0 * dx())
        throw ContractError("grid: support invariant violated (need Lx >= R0 + T + 4 dx)");
}

SpatialField ScalarField::slice_field(int k) const {
    SpatialField f(spec);
    std::memcpy(static_cast<void*>(f.v.data()), slice(k), slice_size() * sizeof(cplx));
    return f;
}

void ScalarField::set_slice(int k, const SpatialField& f) {
    if (f.size() != slice_size()) throw ContractError("field: slice shape mismatch");
    std::memcpy(static_cast<void*>(slice(k)), f.v.data(), slice_size() * sizeof(cplx));
}

std::array<double, 3> position(const GridSpec& s, std::size_t i) {
    std::array<double, 3> p{0, 0, 0};
    for (int d = s.n - 1; d >= 0; --d) {
        p[d] = s.x(static_cast<int>(i % s.Nx));
        i /= s.Nx;
    }
    return p;
}

std::array<double, 3> frequency(const GridSpec& s, std::size_t i) {
    std::array<double, 3> k{0, 0, 0};
    for (int d = s.n - 1; d >= 0; --d) {
        k[d] = s.xi(static_cast<int>(i % s.Nx));
        i /= s.Nx;
    }
    return k;
}

long frequency_key(const GridSpec& s, std::size_t i) {
    long key = 0;
    for (int d = 0; d < s.n; ++d) {
        long m = s.freq_index(static_cast<int>(i % s.Nx));
        key += m * m;
        i /= s.Nx;
    }
    return key;
}

double frequency_norm2(const GridSpec& s, std::size_t i) {
    return static_cast<double>(frequency_key(s, i)) * s.dxi() * s.dxi();
}

namespace {

struct PlanCache {
    std::mutex m;
    std::map<std::tuple<int, int, int>, fftw_plan> plans;

    fftw_plan get(int rank, int N, int sign) {
        std::lock_guard<std::mutex> lock(m);
        auto key = std::make_tuple(rank, N, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        int dims[3] = {N, N, N};
        std::size_t total = 1;
        for (int d = 0; d < rank; ++d) total *= static_cast<std::size_t>(N);
        fftw_complex* buf = fftw_alloc_complex(total);
        // ESTIMATE keeps the chosen algorithm, and therefore the rounding, identical between runs
        fftw_plan p = fftw_plan_dft(rank, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        plans.emplace(key, p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void raw_dft(cplx* data, int rank, int N, int sign) {
    fftw_plan p = cache().get(rank, N, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, ptr, ptr);
}

// (-1)^{sum of signed frequency indices}; the grid origin sits at -Lx
void alternate(const GridSpec& s, cplx* data) {
    std::size_t N = s.spatial_size();
    for (std::size_t i = 0; i < N; ++i) {
        std::size_t r = i;
        int parity = 0;
        for (int d = 0; d < s.n; ++d) {
            parity += static_cast<int>(r % s.Nx);
            r /= s.Nx;
        }
        if (parity & 1) data[i] = -data[i];
    }
}

void forward_inplace(const GridSpec& s, cplx* data) {
    raw_dft(data, s.n, s.Nx, FFTW_FORWARD);
    alternate(s, data);
    double vol = s.cell_volume();
    std::size_t N = s.spatial_size();
    for (std::size_t i = 0; i < N; ++i) data[i] *= vol;
}

void inverse_inplace(const GridSpec& s, cplx* data) {
    alternate(s, data);
    raw_dft(data, s.n, s.Nx, FFTW_BACKWARD);
    std::size_t N = s.spatial_size();
    double scale = 1.0 / (static_cast<double>(N) * s.cell_volume());
    for (std::size_t i = 0; i < N; ++i) data[i] *= scale;
}

}  // namespace

Spectrum fft_spatial(const SpatialField& f) {
    if (f.size() != f.spec.spatial_size()) throw ContractError("fft_spatial: shape mismatch");
    Spectrum F(f.spec);
    F.v = f.v;
    forward_inplace(F.spec, F.v.data());
    return F;
}

SpatialField ifft_spatial(const Spectrum& F) {
    if (F.size() != F.spec.spatial_size()) throw ContractError("ifft_spatial: shape mismatch");
    SpatialField f(F.spec);
    f.v = F.v;
    inverse_inplace(f.spec, f.v.data());
    return f;
}

void fft_slices(ScalarField& f) {
    if (f.v.size() != f.spec.spacetime_size()) throw ContractError("fft_slices: shape mismatch");
    parallel_for(static_cast<std::size_t>(f.spec.Nt), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) forward_inplace(f.spec, f.slice(static_cast<int>(k)));
    });
}

void ifft_slices(ScalarField& f) {
    if (f.v.size() != f.spec.spacetime_size()) throw ContractError("ifft_slices: shape mismatch");
    parallel_for(static_cast<std::size_t>(f.spec.Nt), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) inverse_inplace(f.spec, f.slice(static_cast<int>(k)));
    });
}

void dft1d(std::vector<cplx>& a, bool forward) {
    raw_dft(a.data(), 1, static_cast<int>(a.size()), forward ? FFTW_FORWARD : FFTW_BACKWARD);
}

double l2_norm(const SpatialField& f) {
    double s = 0;
    for (const auto& z : f.v) s += std::norm(z);
    return std::sqrt(s * f.spec.cell_volume());
}

double l2_norm(const ScalarField& f) {
    double s = 0;
    for (const auto& z : f.v) s += std::norm(z);
    return std::sqrt(s * f.spec.cell_volume() * f.spec.dt());
}

double sobolev_norm(const Spectrum& F, double s) {
    const GridSpec& g = F.spec;
    double dxi_n = std::pow(g.dxi(), g.n);
    double acc = 0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        double w = s == 0.0 ? 1.0 : std::pow(1.0 + frequency_norm2(g, i), s);
        acc += w * std::norm(F[i]);
    }
    return std::sqrt(acc * dxi_n / std::pow(2.0 * kPi, g.n));
}

double sobolev_norm(const SpatialField& f, double s) {
    return sobolev_norm(fft_spatial(f), s);
}

void check_finite(const std::vector<cplx>& v, const char* what) {
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ContractError(std::string(what) + ": non-finite value");
}

namespace {

constexpr char kFieldMagic[8] = {'M', 'R', 'A', 'Y', 'F', 'L', 'D', '1'};

template <class T>
void put(std::ostream& os, T x) {
    os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T x{};
    is.read(reinterpret_cast<char*>(&x), sizeof(T));
    if (!is) throw ContractError("field file: truncated header");
    return x;
}

void write_impl(const std::string& path, const GridSpec& s, std::uint32_t Nt, double R0,
                const std::vector<cplx>& v) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ContractError("cannot open " + path);
    os.write(kFieldMagic, 8);
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.n));
    put<std::uint32_t>(os, Nt);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.Nx));
    put<double>(os, s.Lx);
    put<double>(os, s.T);
    put<double>(os, s.t1);
    put<double>(os, R0);
    put<std::uint8_t>(os, 1);
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
    if (!os) throw ContractError("write failed: " + path);
}

struct RawField {
    GridSpec spec;
    std::uint32_t Nt = 0;
    double R0 = 0;
    std::vector<cplx> v;
};

RawField read_impl(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ContractError("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kFieldMagic, 8) != 0) throw ContractError("not an MRAYFLD1 file: " + path);
    if (get<std::uint32_t>(is) != 1) throw ContractError("unsupported field file version");
    RawField r;
    r.spec.n = static_cast<int>(get<std::uint32_t>(is));
    r.Nt = get<std::uint32_t>(is);
    r.spec.Nx = static_cast<int>(get<std::uint32_t>(is));
    r.spec.Lx = get<double>(is);
    r.spec.T = get<double>(is);
    r.spec.t1 = get<double>(is);
    r.R0 = get<double>(is);
    r.spec.R0 = r.R0;
    auto isComplex = get<std::uint8_t>(is);
    if (r.spec.n != 2 && r.spec.n != 3) throw ContractError("field file: bad dimension");
    std::size_t count = r.spec.spatial_size() * std::max<std::uint32_t>(r.Nt, 1);
    r.v.resize(count);
    if (isComplex) {
        is.read(reinterpret_cast<char*>(r.v.data()), static_cast<std::streamsize>(count * sizeof(cplx)));
    } else {
        std::vector<double> re(count);
        is.read(reinterpret_cast<char*>(re.data()), static_cast<std::streamsize>(count * sizeof(double)));
        for (std::size_t i = 0; i < count; ++i) r.v[i] = re[i];
    }
    if (!is) throw ContractError("field file: truncated data");
    return r;
}

}  // namespace

void write_field(const std::string& path, const ScalarField& f) {
    write_impl(path, f.spec, static_cast<std::uint32_t>(f.spec.Nt), f.supportRadius, f.v);
}

// Spatial fields are stored with Nt = 0.
void write_field(const std::string& path, const SpatialField& f) {
    write_impl(path, f.spec, 0, f.spec.R0, f.v);
}

ScalarField read_field(const std::string& path) {
    RawField r = read_impl(path);
    if (r.Nt == 0) throw ContractError("field file holds a spatial field: " + path);
    r.spec.Nt = static_cast<int>(r.Nt);
    ScalarField f;
    f.spec = r.spec;
    f.supportRadius = r.R0;
    f.v = std::move(r.v);
    return f;
}

SpatialField read_spatial_field(const std::string& path) {
    RawField r = read_impl(path);
    if (r.Nt != 0) throw ContractError("field file holds a spacetime field: " + path);
    SpatialField f;
    f.spec = r.spec;
    f.v = std::move(r.v);
    return f;
}

}  // namespace minkray
