#pragma once

#include <iosfwd>
#include <vector>

#include "metasel/mcmc.hpp"
#include "metasel/types.hpp"

namespace metasel {

struct LooResult {
  double elpd_loo = 0.0;
  double looic = 0.0;       // identically -2 * elpd_loo
  double se_looic = 0.0;
  std::vector<double> pointwise_elpd;
  std::vector<double> pareto_k;
  std::vector<std::string> flags;  // per-study notes ("high_k", "unsmoothed")
};

// Marginal pointwise log-likelihood matrix [draw][study] for stored draws.
std::vector<std::vector<double>> pointwise_loglik(const PosteriorDraws& draws,
                                                  const Dataset& dataset,
                                                  const ModelSpec& spec,
                                                  int quad_order = 41);

// Pareto-smoothed importance-sampling LOO from a pointwise matrix.
LooResult importance_loo(const std::vector<std::vector<double>>& pointwise);

// Exact leave-one-out by refitting n times; the verification fallback for
// small datasets.
LooResult exact_loo(const Dataset& dataset, const ModelSpec& spec,
                    const PriorConfig& prior, const SamplerConfig& config);

// Generalized Pareto fit by probability-weighted moments; exposed for tests.
struct GpdFit {
  double k = 0.0;      // shape (positive = heavy tail)
  double sigma = 1.0;  // scale
};
GpdFit fit_gpd_pwm(std::vector<double> exceedances);
double gpd_quantile(double p, const GpdFit& fit);

void write_loo_json(std::ostream& os, const std::string& model,
                    const LooResult& loo);

}  // namespace metasel
