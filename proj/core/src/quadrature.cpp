#include "minkray/quadrature.hpp"

#include "minkray/grid.hpp"

#include <cmath>

namespace minkray {

QuadRule gauss_legendre(int m, double a, double b) {
    if (m < 1) throw ContractError("gauss_legendre: need at least one node");
    QuadRule r;
    r.x.resize(m);
    r.w.resize(m);
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = 0;
            for (int j = 1; j <= m; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = m * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute the derivative at the converged node
        double p0 = 1, p1 = 0;
        for (int j = 1; j <= m; ++j) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = m * (z * p0 - p1) / (z * z - 1.0);
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = mid - half * z;
        r.x[m - 1 - i] = mid + half * z;
        r.w[i] = r.w[m - 1 - i] = half * w;
    }
    return r;
}

QuadRule composite_gauss_legendre(int panels, int m, double a, double b) {
    QuadRule r;
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        QuadRule g = gauss_legendre(m, a + p * h, a + (p + 1) * h);
        r.x.insert(r.x.end(), g.x.begin(), g.x.end());
        r.w.insert(r.w.end(), g.w.begin(), g.w.end());
    }
    return r;
}

}  // namespace minkray
