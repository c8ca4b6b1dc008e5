#include "metasel/samplers.hpp"

#include <cmath>
#include <stdexcept>

#include "metasel/special.hpp"

namespace metasel {

double sample_normal(Rng& rng) { return normal_quantile(rng.uniform()); }

double sample_normal(Rng& rng, double mean, double sd) {
  return mean + sd * sample_normal(rng);
}

double sample_gamma(Rng& rng, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("sample_gamma: shape and scale must be > 0");
  if (shape < 1.0) {
    // Boost to shape+1 and rescale by u^{1/shape}.
    const double u = rng.uniform();
    return sample_gamma(rng, shape + 1.0, scale) *
           std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return scale * d * v;
  }
}

namespace {

// One-sided tail sampler on [a, b), a >= 0 large: shifted-exponential
// proposal truncated to [a, b) with Robert's acceptance ratio.
double sample_std_tail(Rng& rng, double a, double b) {
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  const double span_mass =
      (b == kPosInf) ? 1.0 : -std::expm1(-lambda * (b - a));
  for (;;) {
    const double u = rng.uniform();
    const double x = a - std::log1p(-u * span_mass) / lambda;
    const double diff = x - lambda;
    if (std::log(rng.uniform()) <= -0.5 * diff * diff) return x;
  }
}

// Standardized truncation to [a, b), with b > 0.
double sample_std_trunc(Rng& rng, double a, double b) {
  if (a >= 5.0) return sample_std_tail(rng, a, b);
  if (a <= 0.0) {
    // Bulk interval: plain inverse CDF keeps ample precision.
    const double fa = normal_cdf(a);
    const double fb = normal_cdf(b);
    return normal_quantile(rng.uniform(fa, fb));
  }
  // Right-of-center: invert through the upper tail for precision.
  const double pa = normal_cdf(-a);
  const double pb = normal_cdf(-b);
  return -normal_quantile(rng.uniform(pb, pa));
}

}  // namespace

double sample_truncated_normal(Rng& rng, double mean, double sd, double lo,
                               double hi) {
  if (!(sd > 0.0))
    throw std::domain_error("sample_truncated_normal: sd must be > 0");
  if (!(lo < hi))
    throw std::domain_error("sample_truncated_normal: lo >= hi");
  const double a = (lo == kNegInf) ? kNegInf : (lo - mean) / sd;
  const double b = (hi == kPosInf) ? kPosInf : (hi - mean) / sd;
  if (a == kNegInf && b == kPosInf) return mean + sd * sample_normal(rng);
  double z;
  if (b <= 0.0) {
    z = -sample_std_trunc(rng, -b, a == kNegInf ? kPosInf : -a);
  } else if (a == kNegInf) {
    z = normal_quantile(rng.uniform(0.0, normal_cdf(b)));
  } else {
    z = sample_std_trunc(rng, a, b);
  }
  return mean + sd * z;
}

std::vector<double> sample_dirichlet(Rng& rng,
                                     std::span<const double> concentrations) {
  if (concentrations.empty())
    throw std::domain_error("sample_dirichlet: empty concentration vector");
  std::vector<double> out(concentrations.size());
  double total = 0.0;
  for (std::size_t i = 0; i < concentrations.size(); ++i) {
    if (!(concentrations[i] > 0.0))
      throw std::domain_error("sample_dirichlet: concentrations must be > 0");
    out[i] = sample_gamma(rng, concentrations[i]);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace metasel
