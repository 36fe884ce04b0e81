#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace minkray {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Periodic box [-Lx, Lx)^n sampled at Nx points per axis, time grid [0, T] with Nt samples.
struct GridSpec {
    int n = 2;
    int Nx = 64;
    int Nt = 64;
    double Lx = 4.0;
    double T = 2.0;
    double t0 = 0.0;
    double t1 = 0.5;
    double R0 = 1.0;

    double dx() const { return 2.0 * Lx / Nx; }
    double dt() const { return T / (Nt - 1); }
    double dxi() const { return kPi / Lx; }
    double nyquist() const { return kPi / dx(); }
    double x(int j) const { return -Lx + j * dx(); }
    double t(int k) const { return k * dt(); }
    // signed frequency index for FFT slot m
    int freq_index(int m) const { return m < Nx / 2 ? m : m - Nx; }
    double xi(int m) const { return dxi() * freq_index(m); }
    // grid index of the data window end; t1 is snapped to the nearest sample
    int t1_index() const;
    double t1_grid() const { return t1_index() * dt(); }
    std::size_t spatial_size() const;
    std::size_t spacetime_size() const { return spatial_size() * static_cast<std::size_t>(Nt); }
    double cell_volume() const;

    // shape checks (sizes, dimension, t1 inside (0,T))
    void validate() const;
    // Lx >= R0 + T + 4 dx: the light cone of the data never wraps around the box
    void validate_support() const;
    bool operator==(const GridSpec&) const = default;
};

// True for sizes of the form 2^a 3^b 5^c.
bool fft_friendly(int N);

struct SpatialField {
    GridSpec spec;
    std::vector<cplx> v;

    SpatialField() = default;
    explicit SpatialField(const GridSpec& s) : spec(s), v(s.spatial_size()) {}
    std::size_t size() const { return v.size(); }
    cplx& operator[](std::size_t i) { return v[i]; }
    const cplx& operator[](std::size_t i) const { return v[i]; }
};

// Spatial spectrum, FFT slot order, same layout as SpatialField.
struct Spectrum {
    GridSpec spec;
    std::vector<cplx> v;

    Spectrum() = default;
    explicit Spectrum(const GridSpec& s) : spec(s), v(s.spatial_size()) {}
    std::size_t size() const { return v.size(); }
    cplx& operator[](std::size_t i) { return v[i]; }
    const cplx& operator[](std::size_t i) const { return v[i]; }
};

// Values indexed (time, space...), time-major.
struct ScalarField {
    GridSpec spec;
    double supportRadius = 0.0;
    std::vector<cplx> v;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& s) : spec(s), supportRadius(s.R0), v(s.spacetime_size()) {}
    std::size_t slice_size() const { return spec.spatial_size(); }
    cplx* slice(int k) { return v.data() + static_cast<std::size_t>(k) * slice_size(); }
    const cplx* slice(int k) const { return v.data() + static_cast<std::size_t>(k) * slice_size(); }
    SpatialField slice_field(int k) const;
    void set_slice(int k, const SpatialField& f);
};

// Physical coordinates of spatial sample i.
std::array<double, 3> position(const GridSpec& s, std::size_t i);
// Frequency vector of spectrum slot i.
std::array<double, 3> frequency(const GridSpec& s, std::size_t i);
double frequency_norm2(const GridSpec& s, std::size_t i);
// Integer |m|^2 of slot i, used as a cache key for radial quantities.
long frequency_key(const GridSpec& s, std::size_t i);

Spectrum fft_spatial(const SpatialField& f);
SpatialField ifft_spatial(const Spectrum& F);
// Spatial transform of every time slice in place (forward) and its inverse.
void fft_slices(ScalarField& f);
void ifft_slices(ScalarField& f);
// Plain 1-D complex DFT, e^{-i} sign for forward, unnormalized both ways.
void dft1d(std::vector<cplx>& a, bool forward);

double l2_norm(const SpatialField& f);
double l2_norm(const ScalarField& f);
double sobolev_norm(const SpatialField& f, double s);
double sobolev_norm(const Spectrum& F, double s);

void check_finite(const std::vector<cplx>& v, const char* what);

void write_field(const std::string& path, const ScalarField& f);
void write_field(const std::string& path, const SpatialField& f);
ScalarField read_field(const std::string& path);
SpatialField read_spatial_field(const std::string& path);

}  // namespace minkray
