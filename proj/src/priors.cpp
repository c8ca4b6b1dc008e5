#include "metasel/priors.hpp"

#include <cmath>

#include "metasel/samplers.hpp"
#include "metasel/special.hpp"

namespace metasel {

double log_half_normal_pdf(double x, double scale) {
  if (x < 0.0) return kNegInf;
  return std::log(2.0) + log_normal_pdf(x / scale) - std::log(scale);
}

namespace {

double log_dirichlet_pdf(const std::vector<double>& x, double conc) {
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  double log_terms = 0.0;
  for (double v : x) {
    if (!(v >= 0.0) || v > 1.0) return kNegInf;
    sum += v;
    if (conc != 1.0) {
      if (v <= 0.0) return kNegInf;
      log_terms += (conc - 1.0) * std::log(v);
    }
  }
  if (std::abs(sum - 1.0) > 1e-9) return kNegInf;
  return std::lgamma(n * conc) - n * std::lgamma(conc) + log_terms;
}

// Increments d_j = rho_j - rho_{j+1} (rho_{J+1} = 0); the rho prior is the
// Dirichlet on these increments, Jacobian 1.
std::vector<double> rho_increments(const std::vector<double>& rho) {
  std::vector<double> d(rho.size());
  for (std::size_t j = 0; j < rho.size(); ++j)
    d[j] = rho[j] - (j + 1 < rho.size() ? rho[j + 1] : 0.0);
  return d;
}

}  // namespace

double log_prior(const ParamState& state, const PriorConfig& config,
                 const ModelSpec& spec) {
  config.validate();
  double lp = log_normal_pdf(state.theta0 / config.theta0_sd) -
              std::log(config.theta0_sd);
  if (spec.effects == Effects::random) {
    if (!(state.tau >= 0.0)) return kNegInf;
    lp += log_half_normal_pdf(state.tau, config.tau_scale);
  }
  if (spec.family == Family::pubbias) {
    if (state.rho.rho.size() != spec.cutoffs.intervals()) return kNegInf;
    if (state.rho.rho.front() != 1.0) return kNegInf;
    lp += log_dirichlet_pdf(rho_increments(state.rho.rho),
                            config.simplex_concentration);
  } else if (spec.family == Family::phack) {
    if (state.pi.pi.size() != spec.cutoffs.intervals()) return kNegInf;
    lp += log_dirichlet_pdf(state.pi.pi, config.simplex_concentration);
  }
  if (!state.latent_thetas.empty()) {
    if (!(state.tau > 0.0)) return kNegInf;
    for (double t : state.latent_thetas)
      lp += log_normal_pdf((t - state.theta0) / state.tau) -
            std::log(state.tau);
  }
  return lp;
}

ParamState sample_prior(Rng& rng, const PriorConfig& config,
                        const ModelSpec& spec, std::size_t n_studies) {
  config.validate();
  if (n_studies < 1) throw std::domain_error("sample_prior: n_studies >= 1");
  ParamState state;
  state.theta0 = sample_normal(rng, 0.0, config.theta0_sd);
  state.tau = spec.effects == Effects::random
                  ? std::abs(sample_normal(rng)) * config.tau_scale
                  : 0.0;
  const std::size_t J = spec.cutoffs.intervals();
  const std::vector<double> conc(J, config.simplex_concentration);
  if (spec.family == Family::pubbias) {
    const auto d = sample_dirichlet(rng, conc);
    std::vector<double> rho(J);
    double acc = 0.0;
    for (std::size_t j = J; j-- > 0;) {
      acc += d[j];
      rho[j] = acc;
    }
    rho.front() = 1.0;
    state.rho = SelectionProbs(std::move(rho));
  } else if (spec.family == Family::phack) {
    state.pi = HackingProbs(sample_dirichlet(rng, conc));
    if (spec.effects == Effects::random) {
      state.latent_thetas.resize(n_studies);
      for (double& t : state.latent_thetas)
        t = sample_normal(rng, state.theta0, state.tau);
    }
  }
  return state;
}

}  // namespace metasel
