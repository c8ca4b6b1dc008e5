#pragma once

#include <functional>
#include <vector>

#include "metasel/rng.hpp"
#include "metasel/simulate.hpp"

namespace metasel {

// Two-variable normal-normal selection-set calculus: p(theta) = N(mu0, sd0),
// x | theta ~ N(theta, sdx), acceptance probability weight(u) with
// u = 1 - Phi(x / se_for_u). The selection set H controls which variables are
// resampled until acceptance.
struct SelectionSpec {
  double mu0 = 0.0;
  double sd0 = 1.0;
  double sdx = 1.0;
  std::function<double(double)> weight;  // u -> p(s=1 | u) in [0,1]
  SelectionSet H = SelectionSet::both;
};

// p(s=1 | theta) = \int w(u(x)) phi(x; theta, sdx) dx.
double accept_prob_given_theta(const SelectionSpec& spec, double theta);

// p(s=1) marginal over (x, theta).
double accept_prob_marginal(const SelectionSpec& spec);

// q_H(x, theta) per the selection-set construction.
double q_H_density(const SelectionSpec& spec, double x, double theta);

// Algorithm-1 sampler matching q_H_density.
SelectionDraws q_H_sampler(Rng& rng, const SelectionSpec& spec, std::size_t n);

// Step weight rule "step:alpha:rho": 1 for u < alpha, rho otherwise.
std::function<double(double)> step_weight_rule(double alpha, double rho_rest);

}  // namespace metasel
