#pragma once

#include <vector>

#include "metasel/types.hpp"

namespace metasel {

// Bijection between constrained ParamState and an unconstrained real vector:
// theta0 and latent thetas identity, tau -> log tau, simplexes (pi, and the
// increments of rho) -> stick-breaking logits.
std::size_t unconstrained_dim(const ModelSpec& spec, std::size_t n_studies);

std::vector<double> to_unconstrained(const ParamState& state,
                                     const ModelSpec& spec);

ParamState from_unconstrained(const std::vector<double>& v,
                              const ModelSpec& spec, std::size_t n_studies);

// log |d(constrained)/d(unconstrained)| at the given unconstrained point.
double log_jacobian(const std::vector<double>& v, const ModelSpec& spec,
                    std::size_t n_studies);

std::vector<std::string> param_names(const ModelSpec& spec,
                                     std::size_t n_studies);

// Stick-breaking helpers shared with tests.
std::vector<double> simplex_to_logits(const std::vector<double>& simplex);
std::vector<double> logits_to_simplex(const std::vector<double>& logits);
double simplex_log_jacobian(const std::vector<double>& logits);

}  // namespace metasel
