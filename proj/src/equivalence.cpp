#include "metasel/equivalence.hpp"

#include <cmath>
#include <stdexcept>

#include "metasel/densities.hpp"

namespace metasel {

HackingProbs rho_to_pi(const SelectionProbs& rho, double theta0, double tau,
                       double sigma, const CutoffGrid& cutoffs) {
  const double sd = std::sqrt(tau * tau + sigma * sigma);
  HackingProbs pi;
  pi.pi = mixture_weights_pistar(theta0, sd, sigma, rho, cutoffs);
  return pi;
}

PiToRhoResult pi_to_rho(const HackingProbs& pi, double theta0, double tau,
                        double sigma, const CutoffGrid& cutoffs) {
  pi.validate();
  if (pi.pi.size() != cutoffs.intervals())
    throw std::domain_error("pi_to_rho: pi length mismatch");
  if (!(pi.pi.front() > 0.0))
    throw std::runtime_error("pi_to_rho: pi_1 = 0, rho is non-normalizable");
  const double sd = std::sqrt(tau * tau + sigma * sigma);
  const auto m = interval_masses(theta0, sd, sigma, cutoffs);
  for (std::size_t j = 0; j < m.size(); ++j)
    if (m[j] <= 0.0 && pi.pi[j] > 0.0)
      throw std::runtime_error("pi_to_rho: zero interval mass with pi_j > 0");
  const double base = pi.pi.front() / m.front();
  PiToRhoResult out;
  out.rho.rho.resize(m.size());
  for (std::size_t j = 0; j < m.size(); ++j)
    out.rho.rho[j] = (pi.pi[j] / m[j]) / base;
  out.rho.rho.front() = 1.0;
  out.satisfies_decreasing = out.rho.is_valid();
  return out;
}

}  // namespace metasel
