#pragma once

#include "metasel/rng.hpp"
#include "metasel/types.hpp"

namespace metasel {

struct PriorConfig {
  double theta0_sd = 1.0;
  double tau_scale = 1.0;
  // Dirichlet concentration shared by all simplex components (pi, and the
  // increments generating rho).
  double simplex_concentration = 1.0;

  void validate() const {
    if (!(theta0_sd > 0.0) || !(tau_scale > 0.0) ||
        !(simplex_concentration > 0.0))
      throw std::domain_error("PriorConfig: all hyperparameters must be > 0");
  }
};

// Joint log prior of a constrained state under the given spec. Returns -inf
// when ordering or simplex constraints are violated.
double log_prior(const ParamState& state, const PriorConfig& config,
                 const ModelSpec& spec);

// Draw a state from the prior; always has finite log_prior. Latent thetas are
// included only for random-effects p-hacking models.
ParamState sample_prior(Rng& rng, const PriorConfig& config,
                        const ModelSpec& spec, std::size_t n_studies);

double log_half_normal_pdf(double x, double scale);

}  // namespace metasel
