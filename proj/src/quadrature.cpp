#include "metasel/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace metasel {

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 12, tol);
}

double integrate_piecewise(const std::function<double(double)>& f, double a,
                           double b, std::vector<double> breaks, double tol) {
  breaks.erase(
      std::remove_if(breaks.begin(), breaks.end(),
                     [&](double x) { return !(x > a) || !(x < b); }),
      breaks.end());
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  double lo = a;
  for (double brk : breaks) {
    total += integrate(f, lo, brk, tol);
    lo = brk;
  }
  total += integrate(f, lo, b, tol);
  return total;
}

}  // namespace metasel
