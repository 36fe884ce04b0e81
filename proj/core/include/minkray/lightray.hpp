#pragma once

#include "minkray/grid.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace minkray {

enum class DirectionScheme : std::uint32_t { UniformAngle = 0, GaussLegendreAzimuth = 1 };

// Chart C = (y-grid) x (direction set). y shares the spatial grid of ySpec.
struct RayChart {
    GridSpec ySpec;
    DirectionScheme scheme = DirectionScheme::UniformAngle;
    std::vector<std::array<double, 3>> directions;
    std::vector<double> weights;
    double sStep = 0.0;

    std::size_t size() const { return directions.size(); }
    void validate() const;
};

// n = 2: Ntheta equispaced angles. sStep defaults to the largest divisor of dt not above dx/2.
RayChart make_chart_uniform(const GridSpec& g, int Ntheta);
// n = 3: Gauss-Legendre in cos(polar) times equispaced azimuth.
RayChart make_chart_gl(const GridSpec& g, int nPolar, int nAzimuth);
double sphere_area(int n);

// Values indexed (theta, y...), theta-major.
struct Sinogram {
    RayChart chart;
    std::vector<cplx> v;

    Sinogram() = default;
    explicit Sinogram(const RayChart& c) : chart(c), v(c.size() * c.ySpec.spatial_size()) {}
    std::size_t row_size() const { return chart.ySpec.spatial_size(); }
    cplx* row(std::size_t j) { return v.data() + j * row_size(); }
    const cplx* row(std::size_t j) const { return v.data() + j * row_size(); }
};

// S(y, theta) = sum_k f(s_k, y + s_k theta) ds over s in [s0, s1], composite trapezoid,
// multilinear interpolation in (t, x). Samples outside the box count as zero.
Sinogram ray_transform(const ScalarField& f, const RayChart& chart, double s0, double s1);
Sinogram ray_transform(const ScalarField& f, const RayChart& chart);

// (L*S)(t, x) = sum_theta w_theta S(x - t theta, theta) for time samples [kBegin, kEnd).
// Other time samples are left at zero.
ScalarField backproject(const Sinogram& S, const GridSpec& spec, int kBegin = 0, int kEnd = -1);

// L*S at the listed time indices only; bounded memory for long time grids.
std::vector<SpatialField> backproject_at(const Sinogram& S, const GridSpec& spec, const std::vector<int>& ks);

// Max over frequencies below Nyquist/4 of |FT_y(Lf)(xi, theta) - f^(-theta.xi, xi)|,
// relative to the largest |f^| on the same set. f must vanish outside [0, t1].
double fourier_slice_check(const ScalarField& f, const RayChart& chart, std::size_t thetaIndex);

// Spacetime inner product with trapezoid weights in t.
cplx inner(const ScalarField& a, const ScalarField& b);
cplx inner(const Sinogram& a, const Sinogram& b);
double l2_norm(const Sinogram& S);
// Weighted sum over theta of the squared H^s(y) norms.
double sobolev_norm_sinogram(const Sinogram& S, double s);

void write_sinogram(const std::string& path, const Sinogram& S);
Sinogram read_sinogram(const std::string& path);

}  // namespace minkray
