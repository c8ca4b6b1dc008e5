#include "metasel/selection_lab.hpp"

#include <cmath>
#include <stdexcept>

#include "metasel/quadrature.hpp"
#include "metasel/samplers.hpp"
#include "metasel/special.hpp"

namespace metasel {

namespace {

double weight_at_x(const SelectionSpec& spec, double x) {
  const double u = normal_cdf(-x);
  const double w = spec.weight(u);
  if (!(w >= 0.0 && w <= 1.0))
    throw std::domain_error("SelectionSpec: weight outside [0,1]");
  return w;
}

// x-locations where a p-value-threshold weight is discontinuous; a small
// fixed set of candidate thresholds covers the step rules used here.
std::vector<double> weight_breaks(const SelectionSpec& spec) {
  std::vector<double> breaks;
  // Detect jumps numerically on a fine grid; cheap and rule-agnostic.
  const double lo = -6.0, hi = 6.0;
  const int grid = 4800;
  double prev = weight_at_x(spec, lo);
  double xprev = lo;
  for (int i = 1; i <= grid; ++i) {
    const double x = lo + (hi - lo) * i / grid;
    const double w = weight_at_x(spec, x);
    if (std::abs(w - prev) > 1e-9) {
      // bisect the bracketing cell so the split lands on the jump itself
      double a = xprev, b = x;
      const double wa = prev;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (a + b);
        if (std::abs(weight_at_x(spec, mid) - wa) > 1e-9)
          b = mid;
        else
          a = mid;
      }
      breaks.push_back(0.5 * (a + b));
    }
    prev = w;
    xprev = x;
  }
  return breaks;
}

}  // namespace

std::function<double(double)> step_weight_rule(double alpha, double rho_rest) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(rho_rest >= 0.0 && rho_rest <= 1.0))
    throw std::domain_error("step_weight_rule: invalid parameters");
  return [alpha, rho_rest](double u) { return u < alpha ? 1.0 : rho_rest; };
}

double accept_prob_given_theta(const SelectionSpec& spec, double theta) {
  const double a = theta - 10.0 * spec.sdx;
  const double b = theta + 10.0 * spec.sdx;
  const double p = integrate_piecewise(
      [&](double x) {
        return weight_at_x(spec, x) *
               std::exp(log_normal_pdf((x - theta) / spec.sdx)) / spec.sdx;
      },
      a, b, weight_breaks(spec), 1e-11);
  if (!(p > 0.0))
    throw std::runtime_error("selection_lab: p(s=1 | theta) is zero");
  return p;
}

double accept_prob_marginal(const SelectionSpec& spec) {
  const double sd = std::sqrt(spec.sd0 * spec.sd0 + spec.sdx * spec.sdx);
  const double a = spec.mu0 - 10.0 * sd;
  const double b = spec.mu0 + 10.0 * sd;
  const double p = integrate_piecewise(
      [&](double x) {
        return weight_at_x(spec, x) *
               std::exp(log_normal_pdf((x - spec.mu0) / sd)) / sd;
      },
      a, b, weight_breaks(spec), 1e-11);
  if (!(p > 0.0))
    throw std::runtime_error("selection_lab: p(s=1) is zero");
  return p;
}

double q_H_density(const SelectionSpec& spec, double x, double theta) {
  const double joint =
      std::exp(log_normal_pdf((theta - spec.mu0) / spec.sd0)) / spec.sd0 *
      std::exp(log_normal_pdf((x - theta) / spec.sdx)) / spec.sdx;
  switch (spec.H) {
    case SelectionSet::none:
      return joint;
    case SelectionSet::both:
      return weight_at_x(spec, x) / accept_prob_marginal(spec) * joint;
    case SelectionSet::x_only:
      return weight_at_x(spec, x) / accept_prob_given_theta(spec, theta) *
             joint;
  }
  return joint;
}

SelectionDraws q_H_sampler(Rng& rng, const SelectionSpec& spec,
                           std::size_t n) {
  SelectionDraws out;
  out.x.reserve(n);
  out.theta.reserve(n);
  constexpr long kMaxAttempts = 10000000L;
  for (std::size_t d = 0; d < n; ++d) {
    double theta = spec.mu0 + spec.sd0 * sample_normal(rng);
    double x = theta + spec.sdx * sample_normal(rng);
    long attempts = 1;
    while (rng.uniform() >= weight_at_x(spec, x)) {
      if (++attempts > kMaxAttempts)
        throw std::runtime_error("q_H_sampler: acceptance too small");
      switch (spec.H) {
        case SelectionSet::both:
          theta = spec.mu0 + spec.sd0 * sample_normal(rng);
          x = theta + spec.sdx * sample_normal(rng);
          break;
        case SelectionSet::x_only:
          x = theta + spec.sdx * sample_normal(rng);
          break;
        case SelectionSet::none:
          break;
      }
    }
    out.x.push_back(x);
    out.theta.push_back(theta);
  }
  return out;
}

}  // namespace metasel
