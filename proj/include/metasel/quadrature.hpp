#pragma once

#include <functional>
#include <vector>

namespace metasel {

// Adaptive Gauss-Kronrod on [a, b]; infinite endpoints allowed.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

// Integrate a density that may be discontinuous at the given break points:
// the interval is split there and each piece integrated separately.
double integrate_piecewise(const std::function<double(double)>& f, double a,
                           double b, std::vector<double> breaks,
                           double tol = 1e-10);

}  // namespace metasel
