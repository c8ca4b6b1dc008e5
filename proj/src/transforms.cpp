#include "metasel/transforms.hpp"

#include <cmath>
#include <stdexcept>

#include "metasel/special.hpp"

namespace metasel {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                  : std::exp(z) / (1.0 + std::exp(z));
}

bool has_latents(const ModelSpec& spec) {
  return spec.family == Family::phack && spec.effects == Effects::random;
}

std::size_t simplex_coords(const ModelSpec& spec) {
  return spec.family == Family::uncorrected ? 0 : spec.cutoffs.intervals() - 1;
}

std::vector<double> rho_to_increments(const std::vector<double>& rho) {
  std::vector<double> d(rho.size());
  for (std::size_t j = 0; j < rho.size(); ++j)
    d[j] = rho[j] - (j + 1 < rho.size() ? rho[j + 1] : 0.0);
  return d;
}

std::vector<double> increments_to_rho(const std::vector<double>& d) {
  std::vector<double> rho(d.size());
  double acc = 0.0;
  for (std::size_t j = d.size(); j-- > 0;) {
    acc += d[j];
    rho[j] = acc;
  }
  rho.front() = 1.0;
  return rho;
}

}  // namespace

std::vector<double> simplex_to_logits(const std::vector<double>& simplex) {
  if (simplex.size() < 2)
    throw std::domain_error("simplex_to_logits: need length >= 2");
  std::vector<double> z(simplex.size() - 1);
  double remaining = 1.0;
  for (std::size_t k = 0; k + 1 < simplex.size(); ++k) {
    const double v = simplex[k] / remaining;
    z[k] = logit(std::min(std::max(v, 1e-300), 1.0 - 1e-16));
    remaining *= (1.0 - v);
  }
  return z;
}

std::vector<double> logits_to_simplex(const std::vector<double>& logits) {
  std::vector<double> p(logits.size() + 1);
  double remaining = 1.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const double v = sigmoid(logits[k]);
    p[k] = v * remaining;
    remaining *= (1.0 - v);
  }
  p.back() = remaining;
  return p;
}

double simplex_log_jacobian(const std::vector<double>& logits) {
  double lj = 0.0;
  double log_remaining = 0.0;
  for (double z : logits) {
    const double v = sigmoid(z);
    lj += std::log(v) + std::log1p(-v) + log_remaining;
    log_remaining += std::log1p(-v);
  }
  return lj;
}

std::size_t unconstrained_dim(const ModelSpec& spec, std::size_t n_studies) {
  std::size_t d = 1;  // theta0
  if (spec.effects == Effects::random) ++d;
  d += simplex_coords(spec);
  if (has_latents(spec)) d += n_studies;
  return d;
}

std::vector<double> to_unconstrained(const ParamState& state,
                                     const ModelSpec& spec) {
  std::vector<double> v;
  v.push_back(state.theta0);
  if (spec.effects == Effects::random) {
    if (!(state.tau > 0.0))
      throw std::domain_error("to_unconstrained: tau must be > 0");
    v.push_back(std::log(state.tau));
  }
  if (spec.family == Family::pubbias) {
    const auto z = simplex_to_logits(rho_to_increments(state.rho.rho));
    v.insert(v.end(), z.begin(), z.end());
  } else if (spec.family == Family::phack) {
    const auto z = simplex_to_logits(state.pi.pi);
    v.insert(v.end(), z.begin(), z.end());
  }
  if (has_latents(spec))
    v.insert(v.end(), state.latent_thetas.begin(), state.latent_thetas.end());
  return v;
}

ParamState from_unconstrained(const std::vector<double>& v,
                              const ModelSpec& spec, std::size_t n_studies) {
  if (v.size() != unconstrained_dim(spec, n_studies))
    throw std::domain_error("from_unconstrained: dimension mismatch");
  ParamState state;
  std::size_t i = 0;
  state.theta0 = v[i++];
  if (spec.effects == Effects::random) state.tau = std::exp(v[i++]);
  const std::size_t sc = simplex_coords(spec);
  if (sc > 0) {
    const std::vector<double> z(v.begin() + i, v.begin() + i + sc);
    i += sc;
    if (spec.family == Family::pubbias)
      state.rho.rho = increments_to_rho(logits_to_simplex(z));
    else
      state.pi.pi = logits_to_simplex(z);
  }
  if (has_latents(spec))
    state.latent_thetas.assign(v.begin() + i, v.end());
  return state;
}

double log_jacobian(const std::vector<double>& v, const ModelSpec& spec,
                    std::size_t n_studies) {
  if (v.size() != unconstrained_dim(spec, n_studies))
    throw std::domain_error("log_jacobian: dimension mismatch");
  double lj = 0.0;
  std::size_t i = 1;
  if (spec.effects == Effects::random) lj += v[i++];  // d tau / d log tau
  const std::size_t sc = simplex_coords(spec);
  if (sc > 0) {
    const std::vector<double> z(v.begin() + i, v.begin() + i + sc);
    lj += simplex_log_jacobian(z);
  }
  return lj;
}

std::vector<std::string> param_names(const ModelSpec& spec,
                                     std::size_t n_studies) {
  std::vector<std::string> names{"theta0"};
  if (spec.effects == Effects::random) names.push_back("tau");
  const std::size_t J = spec.cutoffs.intervals();
  if (spec.family == Family::pubbias) {
    for (std::size_t j = 2; j <= J; ++j)
      names.push_back("rho[" + std::to_string(j) + "]");
  } else if (spec.family == Family::phack) {
    for (std::size_t j = 1; j <= J; ++j)
      names.push_back("pi[" + std::to_string(j) + "]");
  }
  if (has_latents(spec))
    for (std::size_t k = 1; k <= n_studies; ++k)
      names.push_back("theta[" + std::to_string(k) + "]");
  return names;
}

}  // namespace metasel
