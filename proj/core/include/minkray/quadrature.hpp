#pragma once

#include <vector>

namespace minkray {

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule with m nodes on [a, b].
QuadRule gauss_legendre(int m, double a = -1.0, double b = 1.0);

// Composite Gauss-Legendre: `panels` equal panels of `m` nodes each.
QuadRule composite_gauss_legendre(int panels, int m, double a, double b);

}  // namespace minkray
