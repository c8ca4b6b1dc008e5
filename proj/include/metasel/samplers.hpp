#pragma once

#include <span>
#include <vector>

#include "metasel/rng.hpp"

namespace metasel {

// Standard normal draw via the inverse CDF (deterministic per stream).
double sample_normal(Rng& rng);
double sample_normal(Rng& rng, double mean, double sd);

// Marsaglia-Tsang, valid for any shape > 0.
double sample_gamma(Rng& rng, double shape, double scale = 1.0);

// Draw from normal(mean, sd) restricted to [lo, hi). Uses inverse-CDF in the
// bulk and exponential rejection in the far tails.
double sample_truncated_normal(Rng& rng, double mean, double sd, double lo,
                               double hi);

std::vector<double> sample_dirichlet(Rng& rng,
                                     std::span<const double> concentrations);

}  // namespace metasel
