#pragma once

#include <functional>
#include <vector>

#include "metasel/types.hpp"

namespace metasel {

// One-sided normal p-value u = 1 - Phi(effect / se).
double p_value_one_sided(const Study& study);

// Effect-space thresholds c_j = se * Phi^{-1}(1 - alpha_j), j = 1..J-1,
// bracketed by c_0 = +inf and c_J = -inf. Interval j in x-space is
// [c_j, c_{j-1}), matching u in (alpha_{j-1}, alpha_j].
std::vector<double> cutoffs_in_effect_space(const CutoffGrid& cutoffs,
                                            double se);

// log rho_j for the interval containing u.
double log_step_weight(double u, const SelectionProbs& rho,
                       const CutoffGrid& cutoffs);

// m_j = P(x lands in interval j) for x ~ N(mean, sd) with thresholds scaled
// by study_se. Sums to 1.
std::vector<double> interval_masses(double mean, double sd, double study_se,
                                    const CutoffGrid& cutoffs);

// Same in log space, tail-safe.
std::vector<double> log_interval_masses(double mean, double sd,
                                        double study_se,
                                        const CutoffGrid& cutoffs);

// pi*_j = rho_j m_j / sum_k rho_k m_k (Hedges-type mixture weights).
std::vector<double> mixture_weights_pistar(double mean, double sd,
                                           double study_se,
                                           const SelectionProbs& rho,
                                           const CutoffGrid& cutoffs);

double loglik_uncorrected(const Study& study, double theta0, double tau);

double loglik_pubbias(const Study& study, double theta0, double tau,
                      const SelectionProbs& rho, const CutoffGrid& cutoffs);

// Truncated-mixture route to the same density; agrees with loglik_pubbias
// pointwise and exists as an independently computed cross-check.
double loglik_pubbias_mixture_form(const Study& study, double theta0,
                                   double tau, const SelectionProbs& rho,
                                   const CutoffGrid& cutoffs);

double loglik_phack_fixed(const Study& study, double theta,
                          const HackingProbs& pi, const CutoffGrid& cutoffs);

// Random-effects p-hacking marginal in x, Gauss-Hermite in the latent theta.
double loglik_phack_random_marginal(const Study& study, double theta0,
                                    double tau, const HackingProbs& pi,
                                    const CutoffGrid& cutoffs,
                                    int quad_order = 41);

// CDF companions used by simulation goodness-of-fit checks.
double cdf_uncorrected(double x, const Study& study, double theta0, double tau);
double cdf_pubbias(double x, const Study& study, double theta0, double tau,
                   const SelectionProbs& rho, const CutoffGrid& cutoffs);
double cdf_phack_fixed(double x, const Study& study, double theta,
                       const HackingProbs& pi, const CutoffGrid& cutoffs);

struct PosteriorThetaSummary {
  double mean = 0.0;
  double sd = 0.0;
  std::function<double(double)> density;
};

// Posterior of the study-level theta_i given x under a random-effects spec
// with parameters (theta0, tau) and the spec's weights.
PosteriorThetaSummary posterior_theta_given_x(const Study& study,
                                              double theta0, double tau,
                                              const ModelSpec& spec,
                                              const SelectionProbs& rho,
                                              const HackingProbs& pi);

}  // namespace metasel
